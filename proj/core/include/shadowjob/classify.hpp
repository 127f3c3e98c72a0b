#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <shadowjob/logparse.hpp>

namespace shadowjob {

/// The 14 compilation error types, in descending frequency order, plus a
/// sentinel for messages matching none of them. The declaration order is
/// the classifier's precedence order: first match wins.
enum class ErrorType {
    WasNotDeclared,
    HasNoMemberNamed,
    ExpectedBeforeToken,
    DoesNotNameAType,
    NoDeclarationMatches,
    NoSuchFileOrDirectory,
    LdReturned,
    InvalidConversion,
    UnusedVariable,
    DoesNotHaveAnyFieldNamed,
    CannotAllocateAnObjectOf,
    OfNonClassType,
    CannotConvert,
    StaticAssertionFailed,
    Unclassified,
};

inline constexpr int kClassifiedTypeCount = 14;
inline constexpr int kErrorTypeCount = 15; // 14 classified + sentinel

enum class ErrorClass {
    Dependency,
    Syntax,
    TypeMismatch,
    Semantic,
    Other,
    Unclassified,
};

inline constexpr int kErrorClassCount = 6;

struct ClassifiedError {
    Diagnostic diagnostic;
    ErrorType error_type = ErrorType::Unclassified;
    ErrorClass error_class = ErrorClass::Unclassified;

    friend bool operator==(const ClassifiedError&, const ClassifiedError&) = default;
};

/// Maps a normalized message to its error type. Matching is case-sensitive
/// literal fragment containment, tried in declaration (frequency) order;
/// ExpectedBeforeToken instead matches the three-anchor template
/// "expected ... before ... token". No match yields Unclassified.
ErrorType classify_message(std::string_view message);

/// Total, fixed type-to-class mapping.
ErrorClass class_of(ErrorType type);

ClassifiedError classify(Diagnostic diagnostic);

std::string_view to_string(ErrorType type);
std::string_view to_string(ErrorClass cls);
std::optional<ErrorType> error_type_from_string(std::string_view name);

/// The message fragment identifying a type, as listed in the taxonomy.
std::string_view fragment_of(ErrorType type);

/// Machine-readable taxonomy listing: header `type,fragment,class` plus one
/// row per classified type.
std::string taxonomy_csv();

} // namespace shadowjob

#include <shadowjob/classify.hpp>

#include <string>

namespace shadowjob {

namespace {

struct TypeInfo {
    ErrorType type;
    std::string_view name;
    std::string_view fragment; // taxonomy label
    ErrorClass cls;
};

// Precedence order == declaration order == descending frequency.
constexpr TypeInfo kTypes[kClassifiedTypeCount] = {
    {ErrorType::WasNotDeclared, "WasNotDeclared", "was not declared", ErrorClass::Dependency},
    {ErrorType::HasNoMemberNamed, "HasNoMemberNamed", "has no member named", ErrorClass::Dependency},
    {ErrorType::ExpectedBeforeToken, "ExpectedBeforeToken", "expected X before Y token", ErrorClass::Syntax},
    {ErrorType::DoesNotNameAType, "DoesNotNameAType", "does not name a type", ErrorClass::Dependency},
    {ErrorType::NoDeclarationMatches, "NoDeclarationMatches", "no declaration matches", ErrorClass::TypeMismatch},
    {ErrorType::NoSuchFileOrDirectory, "NoSuchFileOrDirectory", "no such file or directory", ErrorClass::Dependency},
    {ErrorType::LdReturned, "LdReturned", "ld returned", ErrorClass::Dependency},
    {ErrorType::InvalidConversion, "InvalidConversion", "invalid conversion", ErrorClass::TypeMismatch},
    {ErrorType::UnusedVariable, "UnusedVariable", "unused variable", ErrorClass::Dependency},
    {ErrorType::DoesNotHaveAnyFieldNamed, "DoesNotHaveAnyFieldNamed", "does not have any field named", ErrorClass::TypeMismatch},
    {ErrorType::CannotAllocateAnObjectOf, "CannotAllocateAnObjectOf", "cannot allocate an object of", ErrorClass::Semantic},
    {ErrorType::OfNonClassType, "OfNonClassType", "of non-class type", ErrorClass::Other},
    {ErrorType::CannotConvert, "CannotConvert", "cannot convert", ErrorClass::TypeMismatch},
    {ErrorType::StaticAssertionFailed, "StaticAssertionFailed", "static assertion failed", ErrorClass::Syntax},
};

bool contains(std::string_view haystack, std::string_view needle) {
    return haystack.find(needle) != std::string_view::npos;
}

// "expected ... before ... token", three anchors in order.
bool matches_expected_before_token(std::string_view msg) {
    std::size_t a = msg.find("expected ");
    if (a == std::string_view::npos) return false;
    std::size_t b = msg.find(" before ", a + 9);
    if (b == std::string_view::npos) return false;
    return msg.find("token", b + 8) != std::string_view::npos;
}

bool matches(ErrorType type, std::string_view msg) {
    switch (type) {
    case ErrorType::ExpectedBeforeToken:
        return matches_expected_before_token(msg);
    case ErrorType::NoSuchFileOrDirectory:
        // GCC prints strerror(ENOENT) capitalized; the taxonomy lists the
        // fragment in lowercase. Accept both casings of the first letter.
        return contains(msg, "No such file or directory") ||
               contains(msg, "no such file or directory");
    default:
        return contains(msg, fragment_of(type));
    }
}

} // namespace

ErrorType classify_message(std::string_view message) {
    for (const TypeInfo& info : kTypes) {
        if (matches(info.type, message)) return info.type;
    }
    return ErrorType::Unclassified;
}

ErrorClass class_of(ErrorType type) {
    if (type == ErrorType::Unclassified) return ErrorClass::Unclassified;
    return kTypes[static_cast<int>(type)].cls;
}

ClassifiedError classify(Diagnostic diagnostic) {
    ErrorType type = classify_message(diagnostic.message);
    return ClassifiedError{std::move(diagnostic), type, class_of(type)};
}

std::string_view to_string(ErrorType type) {
    if (type == ErrorType::Unclassified) return "Unclassified";
    return kTypes[static_cast<int>(type)].name;
}

std::string_view to_string(ErrorClass cls) {
    switch (cls) {
    case ErrorClass::Dependency: return "Dependency";
    case ErrorClass::Syntax: return "Syntax";
    case ErrorClass::TypeMismatch: return "TypeMismatch";
    case ErrorClass::Semantic: return "Semantic";
    case ErrorClass::Other: return "Other";
    case ErrorClass::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

std::optional<ErrorType> error_type_from_string(std::string_view name) {
    for (const TypeInfo& info : kTypes) {
        if (info.name == name) return info.type;
    }
    if (name == "Unclassified") return ErrorType::Unclassified;
    return std::nullopt;
}

std::string_view fragment_of(ErrorType type) {
    if (type == ErrorType::Unclassified) return "";
    return kTypes[static_cast<int>(type)].fragment;
}

std::string taxonomy_csv() {
    std::string out = "type,fragment,class\n";
    for (const TypeInfo& info : kTypes) {
        out.append(info.name);
        out.push_back(',');
        out.append(info.fragment);
        out.push_back(',');
        out.append(to_string(info.cls));
        out.push_back('\n');
    }
    return out;
}

} // namespace shadowjob

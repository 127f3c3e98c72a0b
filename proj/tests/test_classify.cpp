#include <doctest.h>

#include <shadowjob/classify.hpp>

#include <algorithm>
#include <array>
#include <string>
#include <vector>

using namespace shadowjob;

TEST_CASE("taxonomy examples classify to their listed types") {
    CHECK(classify_message("'err' was not declared in this scope") ==
          ErrorType::WasNotDeclared);
    CHECK(classify_message("expected ';' before '}' token") == ErrorType::ExpectedBeforeToken);
    CHECK(classify_message("static assertion failed: size mismatch") ==
          ErrorType::StaticAssertionFailed);
    CHECK(classify_message("some exotic diagnostic text") == ErrorType::Unclassified);
}

TEST_CASE("class mapping follows the taxonomy") {
    CHECK(class_of(ErrorType::LdReturned) == ErrorClass::Dependency);
    CHECK(class_of(ErrorType::CannotConvert) == ErrorClass::TypeMismatch);
    CHECK(class_of(ErrorType::OfNonClassType) == ErrorClass::Other);
    CHECK(class_of(ErrorType::CannotAllocateAnObjectOf) == ErrorClass::Semantic);
    CHECK(class_of(ErrorType::StaticAssertionFailed) == ErrorClass::Syntax);
    CHECK(class_of(ErrorType::Unclassified) == ErrorClass::Unclassified);
}

TEST_CASE("every type maps to exactly one class; Dependency has six members") {
    std::array<int, kErrorClassCount> per_class{};
    for (int i = 0; i < kClassifiedTypeCount; ++i) {
        ++per_class[static_cast<int>(class_of(static_cast<ErrorType>(i)))];
    }
    CHECK(per_class[static_cast<int>(ErrorClass::Dependency)] == 6);
    CHECK(per_class[static_cast<int>(ErrorClass::Syntax)] == 2);
    CHECK(per_class[static_cast<int>(ErrorClass::TypeMismatch)] == 4);
    CHECK(per_class[static_cast<int>(ErrorClass::Semantic)] == 1);
    CHECK(per_class[static_cast<int>(ErrorClass::Other)] == 1);
    CHECK(per_class[static_cast<int>(ErrorClass::Unclassified)] == 0);

    // The six Dependency members, by name.
    for (ErrorType t : {ErrorType::WasNotDeclared, ErrorType::HasNoMemberNamed,
                        ErrorType::DoesNotNameAType, ErrorType::NoSuchFileOrDirectory,
                        ErrorType::LdReturned, ErrorType::UnusedVariable}) {
        CHECK(class_of(t) == ErrorClass::Dependency);
    }
}

namespace {

// One message realization per type containing only its own pattern.
const std::vector<std::pair<ErrorType, std::string>>& representatives() {
    static const std::vector<std::pair<ErrorType, std::string>> reps = {
        {ErrorType::WasNotDeclared, "'x' was not declared in this scope"},
        {ErrorType::HasNoMemberNamed, "'struct S' has no member named 'm'"},
        {ErrorType::ExpectedBeforeToken, "expected ';' before '}' token"},
        {ErrorType::DoesNotNameAType, "'T' does not name a type"},
        {ErrorType::NoDeclarationMatches, "no declaration matches 'void S::f(int)'"},
        {ErrorType::NoSuchFileOrDirectory, "x.h: No such file or directory"},
        {ErrorType::LdReturned, "ld returned 1 exit status"},
        {ErrorType::InvalidConversion, "invalid conversion from 'int*' to 'int'"},
        {ErrorType::UnusedVariable, "unused variable 'q'"},
        {ErrorType::DoesNotHaveAnyFieldNamed, "class 'S' does not have any field named 'f'"},
        {ErrorType::CannotAllocateAnObjectOf, "cannot allocate an object of abstract type 'A'"},
        {ErrorType::OfNonClassType, "request for member 'm' in 'v', which is of non-class type 'int'"},
        {ErrorType::CannotConvert, "cannot convert 'A' to 'B'"},
        {ErrorType::StaticAssertionFailed, "static assertion failed: nope"},
    };
    return reps;
}

} // namespace

TEST_CASE("each representative classifies to its own type") {
    for (const auto& [type, message] : representatives()) {
        CAPTURE(message);
        CHECK(classify_message(message) == type);
    }
}

TEST_CASE("precedence: concatenated pairs resolve to the earlier type") {
    const auto& reps = representatives();
    for (const auto& [ta, ma] : reps) {
        for (const auto& [tb, mb] : reps) {
            ErrorType expected = std::min(ta, tb);
            CAPTURE(ma);
            CAPTURE(mb);
            CHECK(classify_message(ma + " " + mb) == expected);
        }
    }
}

TEST_CASE("invalid conversion and cannot convert stay distinct") {
    CHECK(classify_message("invalid conversion from 'HwRegister*' to 'int' [-fpermissive]") ==
          ErrorType::InvalidConversion);
    CHECK(classify_message("cannot convert 'ProductError' to 'const char*'") ==
          ErrorType::CannotConvert);
}

TEST_CASE("expected-before-token template needs all three anchors in order") {
    CHECK(classify_message("expected ')' before ';' token") == ErrorType::ExpectedBeforeToken);
    CHECK(classify_message("expected unqualified-id") == ErrorType::Unclassified);
    CHECK(classify_message("token seen before expected item") == ErrorType::Unclassified);
}

TEST_CASE("capitalized strerror casing of missing includes is recognized") {
    CHECK(classify_message("hw_regs.h: No such file or directory") ==
          ErrorType::NoSuchFileOrDirectory);
    CHECK(classify_message("hw_regs.h: no such file or directory") ==
          ErrorType::NoSuchFileOrDirectory);
}

TEST_CASE("classify() pairs the type with its class") {
    Diagnostic d;
    d.build_id = "b";
    d.message = "'q' does not name a type";
    ClassifiedError ce = classify(d);
    CHECK(ce.error_type == ErrorType::DoesNotNameAType);
    CHECK(ce.error_class == ErrorClass::Dependency);
}

TEST_CASE("type names round-trip through strings") {
    for (int i = 0; i < kErrorTypeCount; ++i) {
        ErrorType t = static_cast<ErrorType>(i);
        auto back = error_type_from_string(to_string(t));
        REQUIRE(back.has_value());
        CHECK(*back == t);
    }
    CHECK_FALSE(error_type_from_string("NotAType").has_value());
}

TEST_CASE("taxonomy CSV lists all fourteen classified types") {
    std::string csv = taxonomy_csv();
    CHECK(csv.rfind("type,fragment,class\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 15); // header + 14 rows
    CHECK(csv.find("WasNotDeclared,was not declared,Dependency\n") != std::string::npos);
    CHECK(csv.find("ExpectedBeforeToken,expected X before Y token,Syntax\n") !=
          std::string::npos);
    CHECK(csv.find("StaticAssertionFailed,static assertion failed,Syntax\n") !=
          std::string::npos);
}

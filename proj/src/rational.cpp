#include "rational.hpp"

#include <cctype>

namespace dlab {

namespace {

using boost::multiprecision::cpp_int;

// One decimal literal: [sign]digits[.digits]. Position is advanced past it.
std::optional<rational> parse_decimal(const std::string& s, size_t& pos) {
    size_t i = pos;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = s[i] == '-';
        ++i;
    }
    cpp_int num = 0;
    size_t digits = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        num = num * 10 + (s[i] - '0');
        ++i;
        ++digits;
    }
    cpp_int den = 1;
    if (i < s.size() && s[i] == '.') {
        ++i;
        size_t frac_digits = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            num = num * 10 + (s[i] - '0');
            den *= 10;
            ++i;
            ++frac_digits;
        }
        digits += frac_digits;
        if (frac_digits == 0 && digits == 0) return std::nullopt;
    }
    if (digits == 0) return std::nullopt;
    pos = i;
    rational r(num, den);
    if (neg) r = -r;
    return r;
}

} // namespace

std::optional<rational> parse_rational(const std::string& text) {
    size_t a = 0, b = text.size();
    while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
    std::string s = text.substr(a, b - a);
    if (s.empty()) return std::nullopt;

    size_t pos = 0;
    auto numer = parse_decimal(s, pos);
    if (!numer) return std::nullopt;
    if (pos == s.size()) return numer;
    if (s[pos] != '/') return std::nullopt;
    ++pos;
    auto denom = parse_decimal(s, pos);
    if (!denom || pos != s.size()) return std::nullopt;
    if (*denom == 0) return std::nullopt;
    return *numer / *denom;
}

std::string rational_string(const rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

double rational_to_double(const rational& r) { return static_cast<double>(r); }

} // namespace dlab

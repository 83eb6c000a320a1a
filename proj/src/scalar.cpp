#include "circnet/scalar.hpp"

#include <cctype>
#include <cstdio>

namespace circnet {

namespace {

bool all_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Integer pow10(unsigned long e)
{
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

// Decimal literal such as -12.5e-3, converted to the exact rational it denotes.
Rational parse_decimal(std::string_view s)
{
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_part = s.substr(e + 1);
        bool exp_negative = false;
        if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
            exp_negative = exp_part.front() == '-';
            exp_part.remove_prefix(1);
        }
        if (!all_digits(exp_part) || exp_part.size() > 6) throw ParseError("bad exponent in '" + std::string(s) + "'");
        exponent = std::stol(std::string(exp_part));
        if (exp_negative) exponent = -exponent;
        s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view whole = s.substr(0, dot);
        std::string_view frac = s.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
            (whole.empty() && frac.empty())) {
            throw ParseError("bad number '" + std::string(s) + "'");
        }
        digits = std::string(whole) + std::string(frac);
        exponent -= static_cast<long>(frac.size());
    } else {
        if (!all_digits(s)) throw ParseError("bad number '" + std::string(s) + "'");
        digits = std::string(s);
    }
    Rational value{Integer(digits, 10)};
    if (exponent > 0) value *= Rational(pow10(static_cast<unsigned long>(exponent)));
    if (exponent < 0) value /= Rational(pow10(static_cast<unsigned long>(-exponent)));
    value.canonicalize();
    return negative ? Rational(-value) : value;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw ParseError("empty number");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(text.substr(0, slash));
        Rational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        Rational q = num / den;
        q.canonicalize();
        return q;
    }
    return parse_decimal(text);
}

std::string format_rational(const Rational& value)
{
    if (value.get_den() == 1) return value.get_num().get_str();
    return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string ScalarOps<double>::format(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

} // namespace circnet

#ifndef CIRCNET_SCALAR_HPP
#define CIRCNET_SCALAR_HPP

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace circnet {

using Rational = mpq_class;
using Integer = mpz_class;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// Comparison policy for float mode. Exact mode ignores it.
struct Tolerance {
    double relative = 1e-9;
    double absolute_floor = 1e-12;

    double threshold(double scale) const
    {
        return std::max(relative * std::fabs(scale), absolute_floor);
    }
};

Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& value);

template <class T>
struct ScalarOps;

template <>
struct ScalarOps<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* name = "exact";

    static Rational parse(std::string_view text) { return parse_rational(text); }
    static Rational from_rational(const Rational& v) { return v; }
    static Rational from_int(long v) { return Rational(v); }
    static Rational to_rational(const Rational& v) { return v; }
    static std::string format(const Rational& v) { return format_rational(v); }
    static double to_double(const Rational& v) { return v.get_d(); }
    static Rational abs(const Rational& v) { return ::abs(v); }

    static int sign(const Rational& v, double /*scale*/, const Tolerance& /*tol*/) { return sgn(v); }
    static bool equal(const Rational& a, const Rational& b, double /*scale*/, const Tolerance& /*tol*/)
    {
        return a == b;
    }
};

template <>
struct ScalarOps<double> {
    static constexpr bool exact = false;
    static constexpr const char* name = "float";

    static double parse(std::string_view text) { return parse_rational(text).get_d(); }
    static double from_rational(const Rational& v) { return v.get_d(); }
    static double from_int(long v) { return static_cast<double>(v); }
    static Rational to_rational(double v) { return Rational(v); }
    static std::string format(double v);
    static double to_double(double v) { return v; }
    static double abs(double v) { return std::fabs(v); }

    // Three-way sign with |v| <= tol.threshold(scale) counted as zero.
    static int sign(double v, double scale, const Tolerance& tol)
    {
        const double t = tol.threshold(scale);
        if (v > t) return 1;
        if (v < -t) return -1;
        return 0;
    }
    static bool equal(double a, double b, double scale, const Tolerance& tol)
    {
        return sign(a - b, scale, tol) == 0;
    }
};

template <class T>
concept Scalar = requires { ScalarOps<T>::exact; };

} // namespace circnet

#endif

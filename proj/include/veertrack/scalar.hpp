#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <string>

#include "veertrack/error.hpp"

namespace veertrack {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class Mode { exact, floating };

inline const char* mode_name(Mode m) { return m == Mode::exact ? "exact" : "float"; }

// Arithmetic policy per coordinate type. Exact mode never rounds; float mode
// treats values within the tolerances below as ties and refuses to guess.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr Mode mode = Mode::floating;
    static constexpr bool exact = false;
    static constexpr double axis_eps = 1e-9;
    static constexpr double rel_tol = 1e-12;

    static double to_double(double x) { return x; }
    static double from_double(double x) { return x; }
    static double abs(double x) { return std::fabs(x); }
    static bool is_zero(double x) { return std::fabs(x) <= axis_eps; }
    // -1, 0 (tie within tolerance) or +1
    static int compare(double a, double b) {
        double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
        double d = a - b;
        if (std::fabs(d) <= rel_tol * scale) return 0;
        return d < 0 ? -1 : 1;
    }
    static int sign(double x) { return is_zero(x) ? 0 : (x < 0 ? -1 : 1); }
};

template <>
struct scalar_traits<Rational> {
    static constexpr Mode mode = Mode::exact;
    static constexpr bool exact = true;

    static double to_double(const Rational& x) { return x.convert_to<double>(); }
    // binary doubles are dyadic rationals, so this is exact
    static Rational from_double(double x) { return Rational(x); }
    static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
    static bool is_zero(const Rational& x) { return x == 0; }
    static int compare(const Rational& a, const Rational& b) { return a < b ? -1 : (b < a ? 1 : 0); }
    static int sign(const Rational& x) { return x < 0 ? -1 : (x > 0 ? 1 : 0); }
};

template <class S>
double to_double(const S& x) {
    return scalar_traits<S>::to_double(x);
}

template <class S>
S sabs(const S& x) {
    return scalar_traits<S>::abs(x);
}

template <class S>
int ssign(const S& x) {
    return scalar_traits<S>::sign(x);
}

template <class S>
int scompare(const S& a, const S& b) {
    return scalar_traits<S>::compare(a, b);
}

template <class S>
const S& smax(const S& a, const S& b) {
    return a < b ? b : a;
}

// Accepts "p/q", "p", or a plain decimal such as "-0.25"; decimals are read exactly.
inline Rational parse_rational(const std::string& text) {
    auto bad = [&]() { return parse_error("not a rational number: '" + text + "'"); };
    if (text.empty()) throw bad();
    auto parse_int = [&](const std::string& s) -> BigInt {
        std::size_t i = 0;
        if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
        if (i == s.size()) throw bad();
        for (std::size_t j = i; j < s.size(); ++j)
            if (s[j] < '0' || s[j] > '9') throw bad();
        BigInt v(s[0] == '+' ? s.substr(1) : s);
        return v;
    };
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num = parse_int(text.substr(0, slash));
        BigInt den = parse_int(text.substr(slash + 1));
        if (den == 0) throw parse_error("zero denominator in '" + text + "'");
        return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(parse_int(text));
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole = whole.substr(1);
    if (whole.empty()) whole = "0";
    if (frac.empty()) throw bad();
    BigInt den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    Rational v(parse_int(whole) * den + parse_int(frac), den);
    return neg ? Rational(-v) : v;
}

inline std::string rational_string(const Rational& x) {
    BigInt n = boost::multiprecision::numerator(x);
    BigInt d = boost::multiprecision::denominator(x);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

}  // namespace veertrack

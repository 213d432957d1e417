#pragma once

#include "veertrack/scalar.hpp"

namespace veertrack {

// Complex period of a saddle connection: w = real part, h = imaginary part.
template <class S>
struct Period {
    S w{0};
    S h{0};

    friend Period operator+(const Period& a, const Period& b) { return {a.w + b.w, a.h + b.h}; }
    friend Period operator-(const Period& a, const Period& b) { return {a.w - b.w, a.h - b.h}; }
    friend Period operator-(const Period& a) { return {-a.w, -a.h}; }
    friend Period operator*(int k, const Period& a) { return {S(k) * a.w, S(k) * a.h}; }
    friend bool operator==(const Period& a, const Period& b) { return a.w == b.w && a.h == b.h; }
};

template <class S>
S cross(const Period<S>& a, const Period<S>& b) {
    return a.w * b.h - a.h * b.w;
}

// L-infinity norm max(|w|,|h|).
template <class S>
S linf_length(const Period<S>& p) {
    S a = sabs(p.w), b = sabs(p.h);
    return a < b ? b : a;
}

// sign(w*h); unchanged by p -> -p, so it is well defined on unoriented edges.
template <class S>
int slope_sign(const Period<S>& p) {
    int sw = ssign(p.w), sh = ssign(p.h);
    if (sw == 0 || sh == 0) throw degeneracy_error("axis-parallel period has no slope sign");
    return sw * sh;
}

template <class S>
bool axis_parallel(const Period<S>& p) {
    return ssign(p.w) == 0 || ssign(p.h) == 0;
}

template <class To, class From>
Period<To> convert_period(const Period<From>& p) {
    if constexpr (std::is_same_v<To, From>) {
        return p;
    } else if constexpr (std::is_same_v<To, double>) {
        return {to_double(p.w), to_double(p.h)};
    } else {
        return {scalar_traits<To>::from_double(to_double(p.w)), scalar_traits<To>::from_double(to_double(p.h))};
    }
}

}  // namespace veertrack

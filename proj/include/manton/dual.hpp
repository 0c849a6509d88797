// Forward-mode dual numbers. Nest them (Dual<Dual<double,N>,N>) to get
// exact second derivatives of smooth point functions.
#pragma once

#include <array>
#include <cmath>

namespace manton::ad {

template <class T, int N>
struct Dual {
    T v{};
    std::array<T, N> d{};

    Dual() = default;
    Dual(double c) : v(c) {}  // NOLINT: implicit lift of constants
    Dual(const T& val, const std::array<T, N>& der) : v(val), d(der) {}

    Dual& operator+=(const Dual& o) { v += o.v; for (int i = 0; i < N; ++i) d[i] += o.d[i]; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; for (int i = 0; i < N; ++i) d[i] -= o.d[i]; return *this; }
    Dual& operator*=(const Dual& o) { *this = *this * o; return *this; }
    Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
};

template <class T> struct is_dual : std::false_type {};
template <class T, int N> struct is_dual<Dual<T, N>> : std::true_type {};

// Value at the bottom of a nesting.
inline double scalar(double x) { return x; }
template <class T, int N> double scalar(const Dual<T, N>& x) { return scalar(x.v); }

template <class T, int N> Dual<T, N> operator-(const Dual<T, N>& a) {
    Dual<T, N> r; r.v = -a.v; for (int i = 0; i < N; ++i) r.d[i] = -a.d[i]; return r;
}
template <class T, int N> Dual<T, N> operator+(const Dual<T, N>& a) { return a; }

template <class T, int N> Dual<T, N> operator+(const Dual<T, N>& a, const Dual<T, N>& b) {
    Dual<T, N> r; r.v = a.v + b.v; for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i]; return r;
}
template <class T, int N> Dual<T, N> operator-(const Dual<T, N>& a, const Dual<T, N>& b) {
    Dual<T, N> r; r.v = a.v - b.v; for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i]; return r;
}
template <class T, int N> Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
    Dual<T, N> r; r.v = a.v * b.v; for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i]; return r;
}
template <class T, int N> Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b) {
    Dual<T, N> r; r.v = a.v / b.v;
    const T inv2 = T(1.0) / (b.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
    return r;
}

// Mixed with plain doubles.
template <class T, int N> Dual<T, N> operator+(const Dual<T, N>& a, double b) { Dual<T, N> r = a; r.v = r.v + b; return r; }
template <class T, int N> Dual<T, N> operator+(double b, const Dual<T, N>& a) { return a + b; }
template <class T, int N> Dual<T, N> operator-(const Dual<T, N>& a, double b) { Dual<T, N> r = a; r.v = r.v - b; return r; }
template <class T, int N> Dual<T, N> operator-(double b, const Dual<T, N>& a) { return (-a) + b; }
template <class T, int N> Dual<T, N> operator*(const Dual<T, N>& a, double b) {
    Dual<T, N> r; r.v = a.v * b; for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b; return r;
}
template <class T, int N> Dual<T, N> operator*(double b, const Dual<T, N>& a) { return a * b; }
template <class T, int N> Dual<T, N> operator/(const Dual<T, N>& a, double b) { return a * (1.0 / b); }
template <class T, int N> Dual<T, N> operator/(double b, const Dual<T, N>& a) { return Dual<T, N>(b) / a; }

namespace detail {
// f(a) given f(a.v) and f'(a.v).
template <class T, int N> Dual<T, N> chain(const Dual<T, N>& a, const T& f, const T& df) {
    Dual<T, N> r; r.v = f; for (int i = 0; i < N; ++i) r.d[i] = df * a.d[i]; return r;
}
}  // namespace detail

using std::sin; using std::cos; using std::tan; using std::exp; using std::log; using std::sqrt; using std::atan;

template <class T, int N> Dual<T, N> sin(const Dual<T, N>& a) { return detail::chain(a, T(sin(a.v)), T(cos(a.v))); }
template <class T, int N> Dual<T, N> cos(const Dual<T, N>& a) { return detail::chain(a, T(cos(a.v)), T(-sin(a.v))); }
template <class T, int N> Dual<T, N> tan(const Dual<T, N>& a) {
    const T t = tan(a.v);
    return detail::chain(a, t, T(1.0 + t * t));
}
template <class T, int N> Dual<T, N> exp(const Dual<T, N>& a) { const T e = exp(a.v); return detail::chain(a, e, e); }
template <class T, int N> Dual<T, N> log(const Dual<T, N>& a) { return detail::chain(a, T(log(a.v)), T(1.0 / a.v)); }
template <class T, int N> Dual<T, N> sqrt(const Dual<T, N>& a) { const T s = sqrt(a.v); return detail::chain(a, s, T(0.5 / s)); }
template <class T, int N> Dual<T, N> atan(const Dual<T, N>& a) { return detail::chain(a, T(atan(a.v)), T(1.0 / (1.0 + a.v * a.v))); }

}  // namespace manton::ad

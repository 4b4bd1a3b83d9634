#pragma once

#include <array>
#include <cmath>
#include <type_traits>

namespace cce {

// Forward-mode dual number with N tangent directions. T may itself be a Dual,
// which gives mixed second derivatives.
template <class T, int N>
struct Dual {
    T v{};
    std::array<T, N> d{};

    Dual() { d.fill(T(0.0)); }
    Dual(double c) : v(c) { d.fill(T(0.0)); }
    template <class U = T, std::enable_if_t<!std::is_same_v<U, double>, int> = 0>
    Dual(const T& c) : v(c) { d.fill(T(0.0)); }

    static Dual variable(const T& value, int k) {
        Dual r(value);
        r.d[k] = T(1.0);
        return r;
    }

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (int k = 0; k < N; ++k) d[k] += o.d[k];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (int k = 0; k < N; ++k) d[k] -= o.d[k];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        for (int k = 0; k < N; ++k) d[k] = d[k] * o.v + v * o.d[k];
        v *= o.v;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        T inv = T(1.0) / o.v;
        for (int k = 0; k < N; ++k) d[k] = (d[k] - v * inv * o.d[k]) * inv;
        v *= inv;
        return *this;
    }
};

template <class T> struct is_dual : std::false_type {};
template <class T, int N> struct is_dual<Dual<T, N>> : std::true_type {};

inline double value_of(double x) { return x; }
template <class T, int N>
double value_of(const Dual<T, N>& x) { return value_of(x.v); }

template <class T, int N>
Dual<T, N> operator-(Dual<T, N> a) {
    a.v = -a.v;
    for (auto& e : a.d) e = -e;
    return a;
}
template <class T, int N>
Dual<T, N> operator+(Dual<T, N> a, const Dual<T, N>& b) { return a += b; }
template <class T, int N>
Dual<T, N> operator-(Dual<T, N> a, const Dual<T, N>& b) { return a -= b; }
template <class T, int N>
Dual<T, N> operator*(Dual<T, N> a, const Dual<T, N>& b) { return a *= b; }
template <class T, int N>
Dual<T, N> operator/(Dual<T, N> a, const Dual<T, N>& b) { return a /= b; }

template <class T, int N>
Dual<T, N> operator+(Dual<T, N> a, double b) { a.v += b; return a; }
template <class T, int N>
Dual<T, N> operator+(double b, Dual<T, N> a) { a.v += b; return a; }
template <class T, int N>
Dual<T, N> operator-(Dual<T, N> a, double b) { a.v -= b; return a; }
template <class T, int N>
Dual<T, N> operator-(double b, const Dual<T, N>& a) { return -a + b; }
template <class T, int N>
Dual<T, N> operator*(Dual<T, N> a, double b) {
    a.v *= b;
    for (auto& e : a.d) e *= b;
    return a;
}
template <class T, int N>
Dual<T, N> operator*(double b, Dual<T, N> a) { return a * b; }
template <class T, int N>
Dual<T, N> operator/(Dual<T, N> a, double b) { return a * (1.0 / b); }
template <class T, int N>
Dual<T, N> operator/(double b, const Dual<T, N>& a) { return Dual<T, N>(b) / a; }

template <class T, int N>
bool operator<(const Dual<T, N>& a, const Dual<T, N>& b) { return value_of(a) < value_of(b); }
template <class T, int N>
bool operator>(const Dual<T, N>& a, const Dual<T, N>& b) { return value_of(a) > value_of(b); }
template <class T, int N>
bool operator<(const Dual<T, N>& a, double b) { return value_of(a) < b; }
template <class T, int N>
bool operator>(const Dual<T, N>& a, double b) { return value_of(a) > b; }

// chain rule helper: f(a) with f(a.v) = fv and f'(a.v) = dfv
template <class T, int N>
Dual<T, N> chain(const Dual<T, N>& a, const T& fv, const T& dfv) {
    Dual<T, N> r(fv);
    for (int k = 0; k < N; ++k) r.d[k] = dfv * a.d[k];
    return r;
}

template <class T, int N>
Dual<T, N> exp(const Dual<T, N>& a) {
    using std::exp;
    T e = exp(a.v);
    return chain(a, e, e);
}
template <class T, int N>
Dual<T, N> log(const Dual<T, N>& a) {
    using std::log;
    return chain(a, log(a.v), T(1.0) / a.v);
}
template <class T, int N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
    using std::sqrt;
    T s = sqrt(a.v);
    return chain(a, s, T(0.5) / s);
}
template <class T, int N>
Dual<T, N> pow(const Dual<T, N>& a, double p) {
    using std::pow;
    return chain(a, pow(a.v, p), p * pow(a.v, p - 1.0));
}
template <class T, int N>
Dual<T, N> abs(const Dual<T, N>& a) {
    return value_of(a) < 0.0 ? -a : a;
}

}  // namespace cce

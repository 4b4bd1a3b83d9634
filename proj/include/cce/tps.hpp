#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dual.hpp"

namespace cce {

// Truncated power series c_0 + c_1 t + ... + c_K t^K. All operands in one
// expression share the same truncation order K.
template <class T>
class Tps {
public:
    Tps() = default;
    explicit Tps(int order, const T& c0 = T(0.0)) : c_(static_cast<std::size_t>(order) + 1, T(0.0)) {
        c_[0] = c0;
    }

    static Tps variable(int order, const T& c0) {
        Tps r(order, c0);
        if (order >= 1) r.c_[1] = T(1.0);
        return r;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    T& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
    const T& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }

    Tps& operator+=(const Tps& o) {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Tps& operator-=(const Tps& o) {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Tps& operator*=(double s) {
        for (auto& e : c_) e = e * s;
        return *this;
    }

    // d/dt; the top coefficient becomes unknown and is set to zero
    Tps derivative() const {
        Tps r(order());
        for (int k = 0; k < order(); ++k) r[k] = (*this)[k + 1] * double(k + 1);
        return r;
    }

private:
    std::vector<T> c_;
};

template <class T>
Tps<T> operator-(Tps<T> a) {
    a *= -1.0;
    return a;
}
template <class T>
Tps<T> operator+(Tps<T> a, const Tps<T>& b) { return a += b; }
template <class T>
Tps<T> operator-(Tps<T> a, const Tps<T>& b) { return a -= b; }
template <class T>
Tps<T> operator*(const Tps<T>& a, const Tps<T>& b) {
    const int K = a.order();
    Tps<T> r(K);
    for (int i = 0; i <= K; ++i) {
        if (value_of(a[i]) == 0.0 && !is_dual<T>::value) continue;
        for (int j = 0; i + j <= K; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}
template <class T>
Tps<T> operator+(Tps<T> a, double s) { a[0] += s; return a; }
template <class T>
Tps<T> operator+(double s, Tps<T> a) { a[0] += s; return a; }
template <class T>
Tps<T> operator-(Tps<T> a, double s) { a[0] -= s; return a; }
template <class T>
Tps<T> operator-(double s, const Tps<T>& a) { return -a + s; }
template <class T>
Tps<T> operator*(Tps<T> a, double s) { return a *= s; }
template <class T>
Tps<T> operator*(double s, Tps<T> a) { return a *= s; }

template <class T>
Tps<T> exp(const Tps<T>& a) {
    using std::exp;
    const int K = a.order();
    Tps<T> b(K, exp(a[0]));
    for (int k = 1; k <= K; ++k) {
        T acc(0.0);
        for (int j = 1; j <= k; ++j) acc += a[j] * b[k - j] * double(j);
        b[k] = acc * (1.0 / k);
    }
    return b;
}

}  // namespace cce

#pragma once

#include <cmath>

// Forward-mode dual numbers carrying one directional derivative. Nesting
// (Dual<Dual<double>>) gives exact second-order directional derivatives.
// Branching (clamp, wrap) must be decided on real(x) so a whole evaluation
// stays on one smooth branch.

namespace afs {

template <class T>
struct Dual {
    T val{};
    T der{};

    Dual() = default;
    Dual(double v) : val(v), der() {}  // NOLINT: implicit promotion intended
    Dual(T v, T d) : val(std::move(v)), der(std::move(d)) {}

    Dual& operator+=(const Dual& b) {
        val = val + b.val;
        der = der + b.der;
        return *this;
    }
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

inline double real(double x) { return x; }
template <class T>
double real(const Dual<T>& x) {
    return real(x.val);
}

// seed(x) marks x as the differentiation variable (derivative 1).
template <class T>
Dual<T> seed(const T& v) {
    return Dual<T>(v, T(1.0));
}

template <class T>
Dual<T> operator-(const Dual<T>& a) {
    return {T(0.0) - a.val, T(0.0) - a.der};
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
    return {a.val + b.val, a.der + b.der};
}
template <class T>
Dual<T> operator+(const Dual<T>& a, double b) {
    return {a.val + b, a.der};
}
template <class T>
Dual<T> operator+(double a, const Dual<T>& b) {
    return {a + b.val, b.der};
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
    return {a.val - b.val, a.der - b.der};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, double b) {
    return {a.val - b, a.der};
}
template <class T>
Dual<T> operator-(double a, const Dual<T>& b) {
    return {a - b.val, T(0.0) - b.der};
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return {a.val * b.val, a.der * b.val + a.val * b.der};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double b) {
    return {a.val * b, a.der * b};
}
template <class T>
Dual<T> operator*(double a, const Dual<T>& b) {
    return {a * b.val, a * b.der};
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    T q = a.val / b.val;
    return {q, (a.der - q * b.der) / b.val};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double b) {
    return {a.val / b, a.der / b};
}
template <class T>
Dual<T> operator/(double a, const Dual<T>& b) {
    T q = T(a) / b.val;
    return {q, (T(0.0) - q * b.der) / b.val};
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return {sin(a.val), cos(a.val) * a.der};
}

template <class T>
Dual<T> cos(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return {cos(a.val), (T(0.0) - sin(a.val)) * a.der};
}

template <class T>
Dual<T> log(const Dual<T>& a) {
    using std::log;
    return {log(a.val), a.der / a.val};
}

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
    using std::sqrt;
    T r = sqrt(a.val);
    return {r, a.der / (2.0 * r)};
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
    using std::exp;
    T e = exp(a.val);
    return {e, e * a.der};
}

template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
    using std::atan2;
    T r2 = x.val * x.val + y.val * y.val;
    return {atan2(y.val, x.val), (x.val * y.der - y.val * x.der) / r2};
}

}  // namespace afs

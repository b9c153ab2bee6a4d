#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace tdgf::ad {

// Scalar types used by the differentiation engine.
//
// Reverse mode over network parameters runs on a tape (tape.hpp) whose slots hold one
// of these scalars. Tangent bundles over the *inputs* ride along in forward mode:
//   double    — plain value, no input derivatives
//   Dual1<N>  — value plus N first-order input tangents (gradient of f wrt x)
//   Dual2<N>  — value, N tangents and the symmetric second-order block (Hessian of f)
// Dual2 is the two nested tangent levels flattened into one vectorized bundle; the
// symmetric storage keeps Hessians exactly symmetric by construction.

inline double stable_softplus(double x) {
    return std::fmax(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// index of (i,j), i <= j, in packed upper-triangular storage of an n x n symmetric matrix
constexpr int sym_index(int i, int j, int n) { return i * n - i * (i + 1) / 2 + j; }

template <int N>
struct Dual1 {
    static constexpr int n_tangents = N;
    double val = 0.0;
    std::array<double, N> g{};

    Dual1() = default;
    explicit Dual1(double v) : val(v) {}

    static Dual1 seeded(double v, int dim) {
        Dual1 r(v);
        r.g[dim] = 1.0;
        return r;
    }

    Dual1& operator+=(const Dual1& o) {
        val += o.val;
        for (int i = 0; i < N; ++i) g[i] += o.g[i];
        return *this;
    }
    Dual1& operator-=(const Dual1& o) {
        val -= o.val;
        for (int i = 0; i < N; ++i) g[i] -= o.g[i];
        return *this;
    }
    Dual1& operator*=(const Dual1& o) {
        for (int i = 0; i < N; ++i) g[i] = g[i] * o.val + val * o.g[i];
        val *= o.val;
        return *this;
    }
};

template <int N>
inline Dual1<N> operator+(Dual1<N> a, const Dual1<N>& b) { return a += b; }
template <int N>
inline Dual1<N> operator-(Dual1<N> a, const Dual1<N>& b) { return a -= b; }
template <int N>
inline Dual1<N> operator*(Dual1<N> a, const Dual1<N>& b) { return a *= b; }
template <int N>
inline Dual1<N> operator-(const Dual1<N>& a) {
    Dual1<N> r;
    r.val = -a.val;
    for (int i = 0; i < N; ++i) r.g[i] = -a.g[i];
    return r;
}
template <int N>
inline Dual1<N> operator*(Dual1<N> a, double c) {
    a.val *= c;
    for (int i = 0; i < N; ++i) a.g[i] *= c;
    return a;
}
template <int N>
inline Dual1<N> operator*(double c, Dual1<N> a) { return a * c; }
template <int N>
inline Dual1<N> operator+(Dual1<N> a, double c) {
    a.val += c;
    return a;
}
template <int N>
inline Dual1<N> operator+(double c, Dual1<N> a) { return a + c; }
template <int N>
inline Dual1<N> operator-(Dual1<N> a, double c) {
    a.val -= c;
    return a;
}
template <int N>
inline Dual1<N> operator-(double c, const Dual1<N>& a) { return -a + c; }

template <int N>
struct Dual2 {
    static constexpr int n_tangents = N;
    static constexpr int n_second = N * (N + 1) / 2;
    double val = 0.0;
    std::array<double, N> g{};
    std::array<double, n_second> h{};

    Dual2() = default;
    explicit Dual2(double v) : val(v) {}

    static Dual2 seeded(double v, int dim) {
        Dual2 r(v);
        r.g[dim] = 1.0;
        return r;
    }

    Dual2& operator+=(const Dual2& o) {
        val += o.val;
        for (int i = 0; i < N; ++i) g[i] += o.g[i];
        for (int i = 0; i < n_second; ++i) h[i] += o.h[i];
        return *this;
    }
    Dual2& operator-=(const Dual2& o) {
        val -= o.val;
        for (int i = 0; i < N; ++i) g[i] -= o.g[i];
        for (int i = 0; i < n_second; ++i) h[i] -= o.h[i];
        return *this;
    }
    Dual2& operator*=(const Dual2& o) {
        for (int i = 0, k = 0; i < N; ++i)
            for (int j = i; j < N; ++j, ++k)
                h[k] = h[k] * o.val + val * o.h[k] + g[i] * o.g[j] + g[j] * o.g[i];
        for (int i = 0; i < N; ++i) g[i] = g[i] * o.val + val * o.g[i];
        val *= o.val;
        return *this;
    }
};

template <int N>
inline Dual2<N> operator+(Dual2<N> a, const Dual2<N>& b) { return a += b; }
template <int N>
inline Dual2<N> operator-(Dual2<N> a, const Dual2<N>& b) { return a -= b; }
template <int N>
inline Dual2<N> operator*(Dual2<N> a, const Dual2<N>& b) { return a *= b; }
template <int N>
inline Dual2<N> operator-(const Dual2<N>& a) {
    Dual2<N> r;
    r.val = -a.val;
    for (int i = 0; i < N; ++i) r.g[i] = -a.g[i];
    for (int i = 0; i < Dual2<N>::n_second; ++i) r.h[i] = -a.h[i];
    return r;
}
template <int N>
inline Dual2<N> operator*(Dual2<N> a, double c) {
    a.val *= c;
    for (int i = 0; i < N; ++i) a.g[i] *= c;
    for (int i = 0; i < Dual2<N>::n_second; ++i) a.h[i] *= c;
    return a;
}
template <int N>
inline Dual2<N> operator*(double c, Dual2<N> a) { return a * c; }
template <int N>
inline Dual2<N> operator+(Dual2<N> a, double c) {
    a.val += c;
    return a;
}
template <int N>
inline Dual2<N> operator+(double c, Dual2<N> a) { return a + c; }
template <int N>
inline Dual2<N> operator-(Dual2<N> a, double c) {
    a.val -= c;
    return a;
}
template <int N>
inline Dual2<N> operator-(double c, const Dual2<N>& a) { return -a + c; }

// ---- uniform accessors ----

inline double value_of(double x) { return x; }
template <int N>
inline double value_of(const Dual1<N>& x) { return x.val; }
template <int N>
inline double value_of(const Dual2<N>& x) { return x.val; }

template <class S>
inline S from_value(double v) { return S(v); }

inline bool finite(double x) { return std::isfinite(x); }
template <int N>
inline bool finite(const Dual1<N>& x) {
    if (!std::isfinite(x.val)) return false;
    for (double v : x.g)
        if (!std::isfinite(v)) return false;
    return true;
}
template <int N>
inline bool finite(const Dual2<N>& x) {
    if (!std::isfinite(x.val)) return false;
    for (double v : x.g)
        if (!std::isfinite(v)) return false;
    for (double v : x.h)
        if (!std::isfinite(v)) return false;
    return true;
}

// ---- lifted elementary functions ----
// apply_unary propagates a scalar function through the bundle given the point
// derivatives f, f', f'' at the primal value.

template <int N>
inline Dual1<N> apply_unary(const Dual1<N>& u, double f0, double f1) {
    Dual1<N> r;
    r.val = f0;
    for (int i = 0; i < N; ++i) r.g[i] = f1 * u.g[i];
    return r;
}

template <int N>
inline Dual2<N> apply_unary(const Dual2<N>& u, double f0, double f1, double f2) {
    Dual2<N> r;
    r.val = f0;
    for (int i = 0; i < N; ++i) r.g[i] = f1 * u.g[i];
    for (int i = 0, k = 0; i < N; ++i)
        for (int j = i; j < N; ++j, ++k) r.h[k] = f1 * u.h[k] + f2 * u.g[i] * u.g[j];
    return r;
}

inline double tanh(double x) { return std::tanh(x); }
template <int N>
inline Dual1<N> tanh(const Dual1<N>& u) {
    const double t = std::tanh(u.val);
    return apply_unary(u, t, 1.0 - t * t);
}
template <int N>
inline Dual2<N> tanh(const Dual2<N>& u) {
    const double t = std::tanh(u.val);
    const double d1 = 1.0 - t * t;
    return apply_unary(u, t, d1, -2.0 * t * d1);
}

inline double softplus(double x) { return stable_softplus(x); }
template <int N>
inline Dual1<N> softplus(const Dual1<N>& u) {
    return apply_unary(u, stable_softplus(u.val), sigmoid(u.val));
}
template <int N>
inline Dual2<N> softplus(const Dual2<N>& u) {
    const double s = sigmoid(u.val);
    return apply_unary(u, stable_softplus(u.val), s, s * (1.0 - s));
}

// derivatives of tanh/softplus, lifted; the tape reverse pass needs them as bundles
inline double tanh_deriv(double x) {
    const double t = std::tanh(x);
    return 1.0 - t * t;
}
template <int N>
inline Dual1<N> tanh_deriv(const Dual1<N>& u) {
    const double t = std::tanh(u.val);
    const double d1 = 1.0 - t * t;
    return apply_unary(u, d1, -2.0 * t * d1);
}
template <int N>
inline Dual2<N> tanh_deriv(const Dual2<N>& u) {
    const double t = std::tanh(u.val);
    const double d1 = 1.0 - t * t;
    return apply_unary(u, d1, -2.0 * t * d1, -2.0 * d1 * (1.0 - 3.0 * t * t));
}

inline double softplus_deriv(double x) { return sigmoid(x); }
template <int N>
inline Dual1<N> softplus_deriv(const Dual1<N>& u) {
    const double s = sigmoid(u.val);
    return apply_unary(u, s, s * (1.0 - s));
}
template <int N>
inline Dual2<N> softplus_deriv(const Dual2<N>& u) {
    const double s = sigmoid(u.val);
    return apply_unary(u, s, s * (1.0 - s), s * (1.0 - s) * (1.0 - 2.0 * s));
}

// max with the subgradient convention: ties take the first argument
inline double vmax(double a, double b) { return a >= b ? a : b; }
template <int N>
inline Dual1<N> vmax(const Dual1<N>& a, const Dual1<N>& b) { return a.val >= b.val ? a : b; }
template <int N>
inline Dual2<N> vmax(const Dual2<N>& a, const Dual2<N>& b) { return a.val >= b.val ? a : b; }

// ---- adjoint algebra ----
// The reverse sweep propagates linear functionals on the bundle. adj_mul is the
// transpose of (multiplication by a) acting on the functional phi; contract is the
// functional applied to a directly — the scalar that feeds parameter gradients.

inline double adj_mul(double phi, double a) { return phi * a; }
inline double contract(double phi, double a) { return phi * a; }

template <int N>
inline double contract(const Dual1<N>& phi, const Dual1<N>& a) {
    double s = phi.val * a.val;
    for (int i = 0; i < N; ++i) s += phi.g[i] * a.g[i];
    return s;
}
template <int N>
inline Dual1<N> adj_mul(const Dual1<N>& phi, const Dual1<N>& a) {
    Dual1<N> r;
    r.val = contract(phi, a);
    for (int i = 0; i < N; ++i) r.g[i] = phi.g[i] * a.val;
    return r;
}

template <int N>
inline double contract(const Dual2<N>& phi, const Dual2<N>& a) {
    double s = phi.val * a.val;
    for (int i = 0; i < N; ++i) s += phi.g[i] * a.g[i];
    for (int i = 0; i < Dual2<N>::n_second; ++i) s += phi.h[i] * a.h[i];
    return s;
}
template <int N>
inline Dual2<N> adj_mul(const Dual2<N>& phi, const Dual2<N>& a) {
    Dual2<N> r;
    r.val = contract(phi, a);
    for (int i = 0; i < N; ++i) r.g[i] = phi.g[i] * a.val;
    for (int i = 0, k = 0; i < N; ++i) {
        for (int j = i; j < N; ++j, ++k) {
            r.g[i] += phi.h[k] * a.g[j];
            r.g[j] += phi.h[k] * a.g[i];
            r.h[k] = phi.h[k] * a.val;
        }
    }
    return r;
}

}  // namespace tdgf::ad

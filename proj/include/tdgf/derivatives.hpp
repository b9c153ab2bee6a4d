#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tdgf/linalg.hpp"
#include "tdgf/models.hpp"
#include "tdgf/network.hpp"

namespace tdgf::ad {

// Largest supported input dimension: five Heston assets (state 10) plus a time input.
constexpr int kMaxInputDim = 11;

// Calls f(std::integral_constant<int, N>{}) with the runtime dimension lifted to a
// compile-time constant, so tangent bundles stay fixed-size.
template <class F>
decltype(auto) with_dim(int n, F&& f) {
    switch (n) {
        case 1: return f(std::integral_constant<int, 1>{});
        case 2: return f(std::integral_constant<int, 2>{});
        case 3: return f(std::integral_constant<int, 3>{});
        case 4: return f(std::integral_constant<int, 4>{});
        case 5: return f(std::integral_constant<int, 5>{});
        case 6: return f(std::integral_constant<int, 6>{});
        case 7: return f(std::integral_constant<int, 7>{});
        case 8: return f(std::integral_constant<int, 8>{});
        case 9: return f(std::integral_constant<int, 9>{});
        case 10: return f(std::integral_constant<int, 10>{});
        case 11: return f(std::integral_constant<int, 11>{});
        default:
            throw ValidationError("unsupported input dimension " + std::to_string(n) +
                                  " (max " + std::to_string(kMaxInputDim) + ")");
    }
}

struct ValueGrad {
    double value = 0.0;
    std::vector<double> grad;
};

struct ValueGradHess {
    double value = 0.0;
    std::vector<double> grad;
    Matrix hess;
};

// F is a polymorphic functor: template <class S> S operator()(std::span<const S>) const.
template <class F>
ValueGrad input_gradient_of(F&& f, std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    return with_dim(n, [&](auto nc) {
        constexpr int N = decltype(nc)::value;
        std::vector<Dual1<N>> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = Dual1<N>::seeded(x[i], i);
        const Dual1<N> y = f(std::span<const Dual1<N>>(xs));
        ValueGrad out;
        out.value = y.val;
        out.grad.assign(y.g.begin(), y.g.begin() + n);
        return out;
    });
}

template <class F>
ValueGradHess input_hessian_of(F&& f, std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    return with_dim(n, [&](auto nc) {
        constexpr int N = decltype(nc)::value;
        std::vector<Dual2<N>> xs(n);
        for (int i = 0; i < n; ++i) xs[i] = Dual2<N>::seeded(x[i], i);
        const Dual2<N> y = f(std::span<const Dual2<N>>(xs));
        ValueGradHess out;
        out.value = y.val;
        out.grad.assign(y.g.begin(), y.g.begin() + n);
        out.hess = Matrix(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                out.hess(i, j) = out.hess(j, i) = y.h[sym_index(i, j, N)];
        return out;
    });
}

namespace detail {

struct NetFunctor {
    const net::NetParams* params;
    const Payoff* payoff;

    template <class S>
    S operator()(std::span<const S> x) const {
        net::NetWorkspace<S> ws;
        const S psi = (*payoff)(x);
        return net::eval_with_obstacle(*params, x, psi, ws);
    }
};

}  // namespace detail

// Value and input gradient of the full composed network f = psi + softplus(head).
inline ValueGrad input_gradient(const net::NetParams& p, std::span<const double> x,
                                const Payoff& payoff) {
    if (static_cast<int>(x.size()) != p.arch.input_width)
        throw ValidationError("input_gradient: point dimension does not match network input width");
    return input_gradient_of(detail::NetFunctor{&p, &payoff}, x);
}

// Value, gradient and (exactly symmetric) input Hessian of the composed network.
inline ValueGradHess input_hessian(const net::NetParams& p, std::span<const double> x,
                                   const Payoff& payoff) {
    if (static_cast<int>(x.size()) != p.arch.input_width)
        throw ValidationError("input_hessian: point dimension does not match network input width");
    return input_hessian_of(detail::NetFunctor{&p, &payoff}, x);
}

}  // namespace tdgf::ad

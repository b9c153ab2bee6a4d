#pragma once

#include <span>
#include <stdexcept>

#include "tdgf/dual.hpp"

namespace tdgf {

// American basket put with equal weights: psi(S) = (strike - mean(S_1..S_d))^+.
// Variance coordinates (Heston state) beyond the first `num_assets` entries are ignored.
struct Payoff {
    double strike = 1.0;
    int num_assets = 1;

    Payoff() = default;
    Payoff(double strike_, int num_assets_) : strike(strike_), num_assets(num_assets_) {
        if (strike <= 0.0) throw std::invalid_argument("payoff.strike must be > 0");
        if (num_assets < 1) throw std::invalid_argument("payoff.num_assets must be >= 1");
    }

    double weight() const { return 1.0 / num_assets; }

    template <class S>
    S operator()(std::span<const S> state) const {
        S mean{};
        for (int i = 0; i < num_assets; ++i) mean += state[i];
        mean = mean * weight();
        return ad::vmax(from_value<S>(strike) - mean, S{});
    }

    double value(std::span<const double> state) const { return (*this)(state); }

private:
    template <class S>
    static S from_value(double v) { return ad::from_value<S>(v); }
};

}  // namespace tdgf

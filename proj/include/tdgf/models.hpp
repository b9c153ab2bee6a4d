#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tdgf/linalg.hpp"

namespace tdgf {

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Correlated geometric Brownian motions under the risk-neutral measure.
struct BlackScholesSpec {
    int d = 1;
    double r = 0.05;
    std::vector<double> sigma;  // per-asset volatility, 1/sqrt(year)
    Matrix rho;                 // d x d stock correlation

    int state_dim() const { return d; }
};

// Stochastic-volatility model: state is (S_1..S_d, V_1..V_d).
struct HestonSpec {
    int d = 1;
    double r = 0.05;
    std::vector<double> lambda;  // mean-reversion speeds
    std::vector<double> kappa;   // long-run variances
    std::vector<double> eta;     // vol-of-vol
    Matrix rho_s;                // d x d stock-stock correlation
    std::vector<double> rho_sv;  // per-asset stock-variance correlation
    // The printed stock-drift coefficient sums rho_ij sqrt(Vi Vj) over all j including
    // j = i (rho_ii = 1). Setting this false drops the diagonal term; the
    // divergence-form identity then fails, which the operator tests surface.
    bool drift_sum_includes_diagonal = true;

    int state_dim() const { return 2 * d; }

    // full 2d correlation of (B_1..B_d, W_1..W_d): variance drivers first
    Matrix full_correlation() const;
};

using ModelSpec = std::variant<BlackScholesSpec, HestonSpec>;

int state_dim(const ModelSpec& m);
int num_assets(const ModelSpec& m);
double rate(const ModelSpec& m);

// throws ValidationError naming the offending field
void validate(const BlackScholesSpec& m);
void validate(const HestonSpec& m);
void validate(const ModelSpec& m);

// Axis-aligned sampling box; Heston state carries the variance box in coordinates d..2d-1.
struct Domain {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(std::span<const double> x, double slack = 0.0) const;
    double volume() const;
    void check() const;  // throws ValidationError
};

// Paper defaults: moneyness [0.01, 3.0] (BS) / [0.01, 2.0] (Heston), variance [0.001, 0.1].
Domain default_domain(const ModelSpec& m);
Domain default_domain(const ModelSpec& m, double s_low, double s_high, double v_low, double v_high);

// Divergence-form coefficient fields of the pricing generator A u = -div(A grad u) + b . grad u.
Matrix diffusion_matrix(const ModelSpec& m, std::span<const double> x);
std::vector<double> convection_vector(const ModelSpec& m, std::span<const double> x);

// First-order coefficients of the generator in non-divergence form
// (A u = -sum a_ij u_ij + sum beta_i u_i, with a == diffusion_matrix).
std::vector<double> native_drift(const ModelSpec& m, std::span<const double> x);

// (div A)_i = sum_j dA_ij/dx_j, differentiated in closed form per model. Test oracle for
// the product-rule derivations: b == native_drift + divergence_A must hold identically.
std::vector<double> divergence_A(const ModelSpec& m, std::span<const double> x);

// A u at a point given grad/hess of u, using the native (non-divergence) generator.
double generator_apply(const ModelSpec& m, std::span<const double> x,
                       std::span<const double> grad, const Matrix& hess);

}  // namespace tdgf

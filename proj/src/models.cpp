#include "tdgf/models.hpp"

#include <cmath>

namespace tdgf {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

void check_correlation(const Matrix& rho, int d, const std::string& name) {
    require(rho.n == d, name + " must be " + std::to_string(d) + "x" + std::to_string(d));
    for (int i = 0; i < d; ++i)
        require(std::abs(rho(i, i) - 1.0) < 1e-12, name + " must have unit diagonal");
    require(max_asymmetry(rho) < 1e-12, name + " must be symmetric");
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            require(std::abs(rho(i, j)) <= 1.0 + 1e-12, name + " entries must lie in [-1,1]");
}

void check_point(const ModelSpec& m, std::span<const double> x) {
    const int n = state_dim(m);
    if (static_cast<int>(x.size()) != n)
        throw ValidationError("state point has dimension " + std::to_string(x.size()) +
                              ", model expects " + std::to_string(n));
    if (std::holds_alternative<HestonSpec>(m)) {
        const int d = std::get<HestonSpec>(m).d;
        for (int i = 0; i < d; ++i)
            if (x[d + i] <= 0.0) throw ValidationError("Heston variance state must be > 0");
    }
    for (int i = 0; i < (std::holds_alternative<HestonSpec>(m) ? std::get<HestonSpec>(m).d : n); ++i)
        if (x[i] <= 0.0) throw ValidationError("stock state must be > 0");
}

}  // namespace

Matrix HestonSpec::full_correlation() const {
    Matrix s(2 * d);
    for (int i = 0; i < d; ++i) {
        s(i, i) = 1.0;                          // corr(B_i, B_j) = delta_ij
        s(i, d + i) = s(d + i, i) = rho_sv[i];  // corr(B_i, W_i) = rho_i
        for (int j = 0; j < d; ++j) s(d + i, d + j) = rho_s(i, j);
    }
    return s;
}

int state_dim(const ModelSpec& m) {
    return std::visit([](const auto& s) { return s.state_dim(); }, m);
}

int num_assets(const ModelSpec& m) {
    return std::visit([](const auto& s) { return s.d; }, m);
}

double rate(const ModelSpec& m) {
    return std::visit([](const auto& s) { return s.r; }, m);
}

void validate(const BlackScholesSpec& m) {
    require(m.d >= 1, "model.d must be >= 1");
    require(m.r >= 0.0, "model.r must be >= 0");
    require(static_cast<int>(m.sigma.size()) == m.d, "model.sigma must have d entries");
    for (double s : m.sigma) require(s > 0.0, "model.sigma entries must be > 0");
    check_correlation(m.rho, m.d, "model.rho");
    require(min_eigenvalue(m.rho) > -1e-10, "model.rho must be positive semidefinite");
}

void validate(const HestonSpec& m) {
    require(m.d >= 1, "model.d must be >= 1");
    require(m.r >= 0.0, "model.r must be >= 0");
    require(static_cast<int>(m.lambda.size()) == m.d, "model.lambda must have d entries");
    require(static_cast<int>(m.kappa.size()) == m.d, "model.kappa must have d entries");
    require(static_cast<int>(m.eta.size()) == m.d, "model.eta must have d entries");
    require(static_cast<int>(m.rho_sv.size()) == m.d, "model.rho_sv must have d entries");
    for (double v : m.lambda) require(v > 0.0, "model.lambda entries must be > 0");
    for (double v : m.kappa) require(v > 0.0, "model.kappa entries must be > 0");
    for (double v : m.eta) require(v > 0.0, "model.eta entries must be > 0");
    for (double v : m.rho_sv) require(std::abs(v) <= 1.0, "model.rho_sv entries must lie in [-1,1]");
    check_correlation(m.rho_s, m.d, "model.rho_s");
    require(min_eigenvalue(m.full_correlation()) > -1e-10,
            "model correlation block matrix must be positive semidefinite");
}

void validate(const ModelSpec& m) {
    std::visit([](const auto& s) { validate(s); }, m);
}

bool Domain::contains(std::span<const double> x, double slack) const {
    if (x.size() != lo.size()) return false;
    for (size_t i = 0; i < lo.size(); ++i)
        if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
}

double Domain::volume() const {
    double v = 1.0;
    for (size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
}

void Domain::check() const {
    require(!lo.empty() && lo.size() == hi.size(), "domain bounds must be non-empty and matched");
    for (size_t i = 0; i < lo.size(); ++i) {
        require(lo[i] < hi[i], "domain.lo must be < domain.hi in every coordinate");
        require(lo[i] > 0.0, "domain bounds must be strictly positive");
    }
}

Domain default_domain(const ModelSpec& m) {
    const bool heston = std::holds_alternative<HestonSpec>(m);
    return default_domain(m, 0.01, heston ? 2.0 : 3.0, 0.001, 0.1);
}

Domain default_domain(const ModelSpec& m, double s_low, double s_high, double v_low,
                      double v_high) {
    Domain dom;
    const int d = num_assets(m);
    dom.lo.assign(d, s_low);
    dom.hi.assign(d, s_high);
    if (std::holds_alternative<HestonSpec>(m)) {
        dom.lo.insert(dom.lo.end(), d, v_low);
        dom.hi.insert(dom.hi.end(), d, v_high);
    }
    dom.check();
    return dom;
}

Matrix diffusion_matrix(const ModelSpec& m, std::span<const double> x) {
    check_point(m, x);
    if (const auto* bs = std::get_if<BlackScholesSpec>(&m)) {
        const int d = bs->d;
        Matrix a(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                a(i, j) = 0.5 * bs->sigma[i] * bs->sigma[j] * x[i] * x[j] * bs->rho(i, j);
        return a;
    }
    const auto& h = std::get<HestonSpec>(m);
    const int d = h.d;
    Matrix a(2 * d);
    for (int i = 0; i < d; ++i) {
        const double vi = x[d + i], si = x[i];
        for (int j = 0; j < d; ++j)
            a(i, j) = 0.5 * h.rho_s(i, j) * std::sqrt(vi * x[d + j]) * si * x[j];
        a(i, d + i) = a(d + i, i) = 0.5 * vi * si * h.eta[i] * h.rho_sv[i];
        a(d + i, d + i) = 0.5 * h.eta[i] * h.eta[i] * vi;
    }
    return a;
}

std::vector<double> convection_vector(const ModelSpec& m, std::span<const double> x) {
    check_point(m, x);
    if (const auto* bs = std::get_if<BlackScholesSpec>(&m)) {
        const int d = bs->d;
        std::vector<double> b(d);
        for (int i = 0; i < d; ++i) {
            double cross = 0.0;
            for (int j = 0; j < d; ++j)
                if (j != i) cross += bs->sigma[i] * bs->sigma[j] * bs->rho(i, j);
            b[i] = (bs->sigma[i] * bs->sigma[i] + 0.5 * cross - bs->r) * x[i];
        }
        return b;
    }
    const auto& h = std::get<HestonSpec>(m);
    const int d = h.d;
    std::vector<double> b(2 * d);
    for (int i = 0; i < d; ++i) {
        const double vi = x[d + i];
        double sum = 0.0;
        for (int j = 0; j < d; ++j) {
            if (j == i && !h.drift_sum_includes_diagonal) continue;
            sum += h.rho_s(i, j) * std::sqrt(vi * x[d + j]);
        }
        b[i] = (0.5 * (vi + sum + h.eta[i] * h.rho_sv[i]) - h.r) * x[i];
        b[d + i] = h.lambda[i] * (vi - h.kappa[i]) + 0.5 * vi * h.eta[i] * h.rho_sv[i] +
                   0.5 * h.eta[i] * h.eta[i];
    }
    return b;
}

std::vector<double> native_drift(const ModelSpec& m, std::span<const double> x) {
    check_point(m, x);
    if (const auto* bs = std::get_if<BlackScholesSpec>(&m)) {
        std::vector<double> beta(bs->d);
        for (int i = 0; i < bs->d; ++i) beta[i] = -bs->r * x[i];
        return beta;
    }
    const auto& h = std::get<HestonSpec>(m);
    const int d = h.d;
    std::vector<double> beta(2 * d);
    for (int i = 0; i < d; ++i) {
        beta[i] = -h.r * x[i];
        beta[d + i] = -h.lambda[i] * (h.kappa[i] - x[d + i]);
    }
    return beta;
}

std::vector<double> divergence_A(const ModelSpec& m, std::span<const double> x) {
    check_point(m, x);
    if (const auto* bs = std::get_if<BlackScholesSpec>(&m)) {
        // d/dS_j [ 1/2 s_i s_j rho_ij S_i S_j ]: j = i gives s_i^2 S_i, j != i half that slope
        const int d = bs->d;
        std::vector<double> div(d);
        for (int i = 0; i < d; ++i) {
            double acc = bs->sigma[i] * bs->sigma[i] * x[i];
            for (int j = 0; j < d; ++j)
                if (j != i) acc += 0.5 * bs->sigma[i] * bs->sigma[j] * bs->rho(i, j) * x[i];
            div[i] = acc;
        }
        return div;
    }
    const auto& h = std::get<HestonSpec>(m);
    const int d = h.d;
    std::vector<double> div(2 * d);
    for (int i = 0; i < d; ++i) {
        const double vi = x[d + i], si = x[i];
        double acc = vi * si;  // d/dS_i of 1/2 V_i S_i^2
        for (int j = 0; j < d; ++j)
            if (j != i) acc += 0.5 * h.rho_s(i, j) * std::sqrt(vi * x[d + j]) * si;
        acc += 0.5 * si * h.eta[i] * h.rho_sv[i];  // d/dV_i of 1/2 V_i S_i eta_i rho_i
        div[i] = acc;
        // row d+i: d/dS_i of 1/2 V_i S_i eta_i rho_i plus d/dV_i of 1/2 eta_i^2 V_i
        div[d + i] = 0.5 * vi * h.eta[i] * h.rho_sv[i] + 0.5 * h.eta[i] * h.eta[i];
    }
    return div;
}

double generator_apply(const ModelSpec& m, std::span<const double> x,
                       std::span<const double> grad, const Matrix& hess) {
    const int n = state_dim(m);
    if (static_cast<int>(grad.size()) != n || hess.n != n)
        throw ValidationError("generator_apply: grad/hess dimension mismatch");
    const Matrix a = diffusion_matrix(m, x);
    const std::vector<double> beta = native_drift(m, x);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += beta[i] * grad[i];
        for (int j = 0; j < n; ++j) acc -= a(i, j) * hess(i, j);
    }
    return acc;
}

}  // namespace tdgf

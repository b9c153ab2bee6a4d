#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tdgf {

// Dense square matrix, row-major. Small dimensions only (state spaces, correlation blocks).
struct Matrix {
    int n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    static Matrix identity(int dim) {
        Matrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline double max_asymmetry(const Matrix& m) {
    double worst = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = i + 1; j < m.n; ++j) worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    return worst;
}

// Eigenvalues/vectors of a symmetric matrix by cyclic Jacobi rotations.
// Returns eigenvalues ascending; columns of `vecs` are the matching eigenvectors.
inline void symmetric_eigen(const Matrix& m, std::vector<double>& vals, Matrix& vecs) {
    const int n = m.n;
    Matrix a = m;
    vecs = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off < 1e-26) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vecs(k, p), vkq = vecs(k, q);
                    vecs(k, p) = c * vkp - s * vkq;
                    vecs(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    vals.resize(n);
    for (int i = 0; i < n; ++i) vals[i] = a(i, i);
    // insertion sort ascending, permuting eigenvector columns alongside
    for (int i = 1; i < n; ++i) {
        for (int j = i; j > 0 && vals[j - 1] > vals[j]; --j) {
            std::swap(vals[j - 1], vals[j]);
            for (int k = 0; k < n; ++k) std::swap(vecs(k, j - 1), vecs(k, j));
        }
    }
}

inline double min_eigenvalue(const Matrix& m) {
    std::vector<double> vals;
    Matrix vecs;
    symmetric_eigen(m, vals, vecs);
    return vals.front();
}

// Factor L with L L^T = m for a PSD matrix; eigenvalues below `clip` are clamped to zero,
// so semidefinite correlation matrices (perfectly correlated assets) still factor.
inline Matrix psd_factor(const Matrix& m, double clip = 1e-12) {
    std::vector<double> vals;
    Matrix vecs;
    symmetric_eigen(m, vals, vecs);
    const int n = m.n;
    Matrix l(n);
    for (int j = 0; j < n; ++j) {
        const double s = vals[j] > clip ? std::sqrt(vals[j]) : 0.0;
        for (int i = 0; i < n; ++i) l(i, j) = vecs(i, j) * s;
    }
    return l;
}

// Solves the normal-equations system a x = b in place by Gaussian elimination with
// partial pivoting. Returns false when a pivot falls below `tol` times the matrix scale.
inline bool solve_linear(Matrix a, std::vector<double> b, std::vector<double>& x,
                         double tol = 1e-12) {
    const int n = a.n;
    double scale = 0.0;
    for (double v : a.a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return false;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) < tol * scale) return false;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            a(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    x.assign(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return true;
}

}  // namespace tdgf

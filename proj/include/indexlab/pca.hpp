#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "indexlab/correlation.hpp"
#include "indexlab/dataset.hpp"
#include "indexlab/distributions.hpp"
#include "indexlab/error.hpp"
#include "indexlab/linalg.hpp"

namespace indexlab {

struct HypothesisTestResult {
    std::string test;
    double statistic = 0.0;
    double df = 0.0;
    PValue p;
};

struct PcaResult {
    std::vector<std::string> variables;
    std::vector<double> eigenvalues;  // descending, all components
    Matrix eigenvectors;              // columns aligned to eigenvalues, sign-fixed
    std::size_t retained = 0;
    Matrix loadings;  // variables x retained
    std::vector<double> variance_explained_pct;
    std::vector<double> cumulative_pct;
    double kmo = 0.0;
    HypothesisTestResult bartlett;
};

/// Kaiser-Meyer-Olkin measure of sampling adequacy from a correlation matrix.
inline double kmo(const Matrix& r) {
    if (!r.is_square() || r.rows() < 2) throw Error(ErrorKind::shape, "KMO needs a p x p matrix, p >= 2");
    const Matrix inv = Cholesky(r).inverse();
    const std::size_t p = r.rows();
    double sum_r2 = 0.0, sum_q2 = 0.0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            if (i == j) continue;
            const double q = -inv(i, j) / std::sqrt(inv(i, i) * inv(j, j));
            sum_r2 += r(i, j) * r(i, j);
            sum_q2 += q * q;
        }
    return sum_r2 / (sum_r2 + sum_q2);
}

inline double kmo(const CorrelationMatrix& corr) { return kmo(corr.r); }

/// Bartlett's test that a correlation matrix is the identity.
inline HypothesisTestResult bartlett_sphericity(const Matrix& r, std::size_t n) {
    if (!r.is_square()) throw Error(ErrorKind::shape, "Bartlett needs a square matrix");
    const std::size_t p = r.rows();
    if (n <= p) throw Error(ErrorKind::insufficient_data, "Bartlett needs n > p");
    double log_det = 0.0;
    try {
        log_det = Cholesky(r).log_determinant();
    } catch (const Error&) {
        throw Error(ErrorKind::domain, "Bartlett needs a positive-definite correlation matrix");
    }
    const double factor = static_cast<double>(n) - 1.0 - (2.0 * static_cast<double>(p) + 5.0) / 6.0;
    HypothesisTestResult out;
    out.test = "Bartlett's test of sphericity";
    out.statistic = std::max(0.0, -factor * log_det);
    out.df = static_cast<double>(p * (p - 1) / 2);
    out.p = chi2_tail_p(out.statistic, out.df);
    return out;
}

inline HypothesisTestResult bartlett_sphericity(const CorrelationMatrix& corr, std::size_t n) {
    return bartlett_sphericity(corr.r, n);
}

/// PCA of the Pearson correlation matrix; components with eigenvalue >=
/// `retention` are kept. Each eigenvector is flipped so its largest-magnitude
/// entry is positive.
inline PcaResult run_pca(std::span<const Series> series, double retention = 1.0) {
    const CorrelationMatrix corr = correlation_matrix(series);
    const std::size_t p = corr.size();
    auto eig = eigen_symmetric(corr.r);
    for (double v : eig.values)
        if (v < -1e-8) throw Error(ErrorKind::numerical, "correlation matrix is not positive semidefinite");

    PcaResult out;
    out.variables = corr.variables;
    out.eigenvalues = eig.values;
    out.eigenvectors = eig.vectors;
    for (std::size_t j = 0; j < p; ++j) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < p; ++i)
            if (std::fabs(eig.vectors(i, j)) > std::fabs(eig.vectors(arg, j))) arg = i;
        if (eig.vectors(arg, j) < 0.0)
            for (std::size_t i = 0; i < p; ++i) out.eigenvectors(i, j) = -eig.vectors(i, j);
    }
    for (double v : eig.values)
        if (v >= retention) ++out.retained;

    out.loadings = Matrix(p, out.retained);
    for (std::size_t j = 0; j < out.retained; ++j) {
        const double scale = std::sqrt(std::max(0.0, eig.values[j]));
        for (std::size_t i = 0; i < p; ++i) out.loadings(i, j) = out.eigenvectors(i, j) * scale;
    }
    double cum = 0.0;
    for (double v : eig.values) {
        const double pct = 100.0 * v / static_cast<double>(p);
        cum += pct;
        out.variance_explained_pct.push_back(pct);
        out.cumulative_pct.push_back(cum);
    }
    out.kmo = kmo(corr.r);
    out.bartlett = bartlett_sphericity(corr.r, corr.n);
    return out;
}

inline PcaResult run_pca(const Dataset& ds, std::span<const std::string> variables, double retention = 1.0) {
    return run_pca(select(ds, variables), retention);
}

}  // namespace indexlab

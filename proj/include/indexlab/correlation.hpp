#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "indexlab/dataset.hpp"
#include "indexlab/distributions.hpp"
#include "indexlab/error.hpp"
#include "indexlab/linalg.hpp"

namespace indexlab {

struct CorrelationResult {
    double r = 0.0;
    PValue p;
    std::size_t n = 0;
};

/// Two-tailed p of a Pearson r via t = r sqrt((n-2)/(1-r^2)) on n-2 df.
inline PValue correlation_p(double r, std::size_t n) {
    if (n < 3) throw Error(ErrorKind::insufficient_data, "correlation p needs n >= 3");
    const double df = static_cast<double>(n - 2);
    if (std::fabs(r) >= 1.0) return {0.0, Tails::two};
    const double t = r * std::sqrt(df / (1.0 - r * r));
    return t_two_tailed_p(t, df);
}

inline CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::shape, "pearson: series lengths differ");
    const std::size_t n = x.size();
    if (n < 3) throw Error(ErrorKind::insufficient_data, "pearson needs n >= 3");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        throw Error(ErrorKind::degenerate, "pearson: zero variance");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    return {r, correlation_p(r, n), n};
}

inline CorrelationResult pearson(const Series& x, const Series& y) { return pearson(x.view(), y.view()); }

/// "***" p < .001, "**" p < .01, "*" p < .05.
inline std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

inline bool sample_variance_is_zero(const Series& s) {
    return std::all_of(s.values.begin(), s.values.end(),
                       [&](double v) { return v == s.values.front(); });
}

struct CorrelationMatrix {
    std::vector<std::string> variables;
    Matrix r;
    Matrix p;
    std::vector<std::vector<std::string>> stars;
    std::size_t n = 0;

    std::size_t size() const noexcept { return variables.size(); }

    std::size_t index_of(std::string_view name) const {
        for (std::size_t i = 0; i < variables.size(); ++i)
            if (variables[i] == name) return i;
        throw Error(ErrorKind::lookup, "variable '" + std::string(name) + "' not in matrix");
    }
};

inline CorrelationMatrix correlation_matrix(std::span<const Series> series) {
    const std::size_t k = series.size();
    if (k < 2) throw Error(ErrorKind::insufficient_data, "correlation matrix needs >= 2 variables");
    CorrelationMatrix m;
    m.n = series.front().size();
    m.r = Matrix::identity(k);
    m.p = Matrix(k, k, 0.0);
    m.stars.assign(k, std::vector<std::string>(k));
    for (const auto& s : series) m.variables.push_back(s.name);
    for (std::size_t i = 0; i < k; ++i) {
        if (series[i].size() != m.n) throw Error(ErrorKind::shape, "correlation matrix: ragged input");
        // Validates variance for every variable, including the last one.
        if (sample_variance_is_zero(series[i]))
            throw Error(ErrorKind::degenerate, "variable '" + series[i].name + "' has zero variance");
        for (std::size_t j = 0; j < i; ++j) {
            const auto c = pearson(series[i], series[j]);
            m.r(i, j) = m.r(j, i) = c.r;
            m.p(i, j) = m.p(j, i) = c.p.value;
            m.stars[i][j] = m.stars[j][i] = significance_stars(c.p.value);
        }
    }
    return m;
}

inline CorrelationMatrix correlation_matrix(const Dataset& ds, std::span<const std::string> variables) {
    return correlation_matrix(select(ds, variables));
}

}  // namespace indexlab

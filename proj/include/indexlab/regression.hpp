#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "indexlab/dataset.hpp"
#include "indexlab/descriptive.hpp"
#include "indexlab/distributions.hpp"
#include "indexlab/error.hpp"
#include "indexlab/linalg.hpp"

namespace indexlab {

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double standard_error = 0.0;
    double t = 0.0;
    PValue p;
    std::optional<double> standardized;  // absent for the intercept
};

struct AnovaBlock {
    double regression_ss = 0.0;
    double residual_ss = 0.0;
    double total_ss = 0.0;
    std::size_t df_regression = 0;
    std::size_t df_residual = 0;
    double mean_square = 0.0;
    double residual_mean_square = 0.0;
    double f = 0.0;  // +inf for a perfect fit
    PValue p;
};

/// Result of an ordinary least squares fit with an intercept.
/// `coefficients[0]` is always the intercept; predictors follow in order.
struct LinearModelFit {
    std::string response;
    std::vector<std::string> predictors;
    std::vector<std::string> row_labels;
    std::vector<Coefficient> coefficients;
    std::size_t n = 0;
    double r = 0.0;
    double r_squared = 0.0;
    double adjusted_r_squared = 0.0;
    double rmse = 0.0;
    AnovaBlock anova_block;
    std::vector<double> fitted;
    std::vector<double> residuals;
    std::vector<double> leverage;
    std::vector<double> response_values;

    std::size_t k() const noexcept { return predictors.size(); }
    std::size_t df_residual() const noexcept { return n - k() - 1; }
    const Coefficient& intercept() const { return coefficients.front(); }

    const Coefficient& coefficient(std::string_view name) const {
        for (const auto& c : coefficients)
            if (c.name == name) return c;
        throw Error(ErrorKind::lookup, "no coefficient '" + std::string(name) + "'");
    }
};

namespace detail {

inline void fill_t_and_p(Coefficient& c, double df) {
    if (c.standard_error > 0.0) {
        c.t = c.estimate / c.standard_error;
    } else {
        c.t = c.estimate == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
    }
    c.p = t_two_tailed_p(c.t, df);
}

}  // namespace detail

/// Least squares of `y` on `xs` plus an intercept, solved by Householder QR
/// of the mean-centred design.
inline LinearModelFit fit_ols(const Series& y, std::span<const Series> xs,
                              std::vector<std::string> row_labels = {}) {
    const std::size_t n = y.size();
    const std::size_t k = xs.size();
    if (n < k + 2)
        throw Error(ErrorKind::insufficient_data, "OLS with " + std::to_string(k) +
                                                      " predictors needs n > " + std::to_string(k + 1) +
                                                      ", got " + std::to_string(n));
    for (const auto& x : xs)
        if (x.size() != n) throw Error(ErrorKind::shape, "predictor '" + x.name + "' length mismatch");

    LinearModelFit fit;
    fit.response = y.name;
    fit.n = n;
    fit.row_labels = std::move(row_labels);
    fit.response_values = y.values;
    for (const auto& x : xs) fit.predictors.push_back(x.name);

    const double ybar = mean_of(y.view());
    std::vector<double> yc(n);
    double tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        yc[i] = y.values[i] - ybar;
        tss += yc[i] * yc[i];
    }

    std::vector<double> xbar(k);
    Matrix xc(n, k);
    for (std::size_t j = 0; j < k; ++j) {
        xbar[j] = mean_of(xs[j].view());
        for (std::size_t i = 0; i < n; ++i) xc(i, j) = xs[j].values[i] - xbar[j];
    }

    std::vector<double> beta;
    Matrix rinv;
    if (k > 0) {
        HouseholderQr qr(xc);
        if (auto dep = qr.first_dependent_column())
            throw Error(ErrorKind::singular, "predictor '" + xs[*dep].name +
                                                 "' is a linear combination of the others");
        beta = qr.solve(yc);
        rinv = qr.r_inverse();
    }

    double intercept = ybar;
    for (std::size_t j = 0; j < k; ++j) intercept -= beta[j] * xbar[j];

    fit.fitted.resize(n);
    fit.residuals.resize(n);
    fit.leverage.resize(n);
    double rss = 0.0;
    double regss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double centred_fit = 0.0;
        for (std::size_t j = 0; j < k; ++j) centred_fit += beta[j] * xc(i, j);
        fit.fitted[i] = ybar + centred_fit;
        fit.residuals[i] = yc[i] - centred_fit;
        rss += fit.residuals[i] * fit.residuals[i];
        regss += centred_fit * centred_fit;
        double h = inv_n;
        for (std::size_t m = 0; m < k; ++m) {
            double z = 0.0;
            for (std::size_t j = 0; j <= m; ++j) z += rinv(j, m) * xc(i, j);
            h += z * z;
        }
        fit.leverage[i] = h;
    }

    const double df_res = static_cast<double>(n - k - 1);
    const double s2 = rss / df_res;
    const double s = std::sqrt(s2);
    fit.rmse = s;
    fit.r_squared = tss > 0.0 ? regss / tss : 0.0;
    fit.r = std::sqrt(fit.r_squared);
    fit.adjusted_r_squared =
        1.0 - (1.0 - fit.r_squared) * static_cast<double>(n - 1) / df_res;

    // Intercept variance: s^2 (1/n + xbar' (Xc'Xc)^-1 xbar).
    double q = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
        double z = 0.0;
        for (std::size_t j = 0; j <= m; ++j) z += rinv(j, m) * xbar[j];
        q += z * z;
    }
    Coefficient ic{"(Intercept)", intercept, s * std::sqrt(inv_n + q), 0.0, {}, std::nullopt};
    detail::fill_t_and_p(ic, df_res);
    fit.coefficients.push_back(ic);

    const double sd_y = tss > 0.0 ? std::sqrt(tss / static_cast<double>(n - 1)) : 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        double v = 0.0;
        for (std::size_t m = j; m < k; ++m) v += rinv(j, m) * rinv(j, m);
        Coefficient c{xs[j].name, beta[j], s * std::sqrt(v), 0.0, {}, std::nullopt};
        detail::fill_t_and_p(c, df_res);
        if (sd_y > 0.0) c.standardized = beta[j] * sample_sd(xs[j].view()) / sd_y;
        fit.coefficients.push_back(c);
    }

    auto& a = fit.anova_block;
    a.regression_ss = regss;
    a.residual_ss = rss;
    a.total_ss = tss;
    a.df_regression = k;
    a.df_residual = n - k - 1;
    a.residual_mean_square = s2;
    if (k > 0) {
        a.mean_square = regss / static_cast<double>(k);
        if (rss <= 1e-24 * tss) {
            a.f = std::numeric_limits<double>::infinity();
            a.p = {0.0, Tails::one};
        } else {
            a.f = a.mean_square / s2;
            a.p = f_tail_p(a.f, static_cast<double>(k), df_res);
        }
    }
    return fit;
}

inline LinearModelFit fit_ols(const Dataset& ds, std::string_view response,
                              std::span<const std::string> predictors) {
    std::vector<Series> xs;
    xs.reserve(predictors.size());
    for (const auto& p : predictors) xs.push_back(ds.column(p));
    return fit_ols(ds.column(response), xs, ds.row_labels());
}

inline LinearModelFit fit_ols(const Dataset& ds, std::string_view response,
                              std::initializer_list<std::string> predictors) {
    return fit_ols(ds, response, std::span<const std::string>(predictors.begin(), predictors.size()));
}

/// Intercept-only model: intercept = mean, RMSE = sample sd, R^2 = 0.
inline LinearModelFit null_model(const Dataset& ds, std::string_view response) {
    if (ds.size() < 2) throw Error(ErrorKind::insufficient_data, "null model needs n >= 2");
    return fit_ols(ds.column(response), std::span<const Series>{}, ds.row_labels());
}

inline AnovaBlock anova(const LinearModelFit& fit) {
    if (fit.k() == 0) throw Error(ErrorKind::domain, "ANOVA is undefined for the intercept-only model");
    return fit.anova_block;
}

inline double predict(const LinearModelFit& fit, const std::map<std::string, double, std::less<>>& x) {
    double y = fit.intercept().estimate;
    for (std::size_t j = 0; j < fit.k(); ++j) {
        auto it = x.find(fit.predictors[j]);
        if (it == x.end())
            throw Error(ErrorKind::domain, "missing value for predictor '" + fit.predictors[j] + "'");
        y += fit.coefficients[j + 1].estimate * it->second;
    }
    return y;
}

// ---------------------------------------------------------------- Durbin-Watson

struct DurbinWatsonResult {
    double d = 0.0;
    double autocorrelation = 0.0;
    std::optional<PValue> p;  // absent when no replicates were requested
    std::size_t replicates = 0;
};

/// Order in which residuals are laid out before computing d.
enum class ResidualOrder {
    rows,    // dataset row order
    labels,  // ascending by row label (country name), byte-wise
};

struct DurbinWatsonOptions {
    std::size_t replicates = 10000;
    std::uint64_t seed = 42;
    ResidualOrder order = ResidualOrder::rows;
    unsigned workers = 0;  // 0: hardware concurrency
};

inline double durbin_watson_d(std::span<const double> e) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        den += e[i] * e[i];
        if (i > 0) num += (e[i] - e[i - 1]) * (e[i] - e[i - 1]);
    }
    return num / den;
}

inline double lag1_autocorrelation(std::span<const double> e) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        den += e[i] * e[i];
        if (i > 0) num += e[i] * e[i - 1];
    }
    return num / den;
}

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// d statistic and lag-1 autocorrelation of `residuals` in the given order,
/// with a two-sided permutation p-value. Replicate i shuffles with a
/// generator seeded from (seed, i), so the result does not depend on the
/// number of workers.
inline DurbinWatsonResult durbin_watson(std::span<const double> residuals, std::size_t replicates,
                                        std::uint64_t seed, unsigned workers = 0) {
    const std::size_t n = residuals.size();
    if (n < 3) throw Error(ErrorKind::insufficient_data, "Durbin-Watson needs n >= 3");
    double ss = 0.0;
    for (double v : residuals) ss += v * v;
    if (!(ss > 0.0)) throw Error(ErrorKind::degenerate, "Durbin-Watson on all-zero residuals");

    DurbinWatsonResult out;
    out.d = durbin_watson_d(residuals);
    out.autocorrelation = lag1_autocorrelation(residuals);
    out.replicates = replicates;
    if (replicates == 0) return out;

    unsigned w = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
    w = static_cast<unsigned>(std::min<std::size_t>(w, replicates));
    std::vector<std::size_t> above(w, 0);
    auto run = [&](unsigned worker) {
        const std::size_t begin = replicates * worker / w;
        const std::size_t end = replicates * (worker + 1) / w;
        std::vector<double> buf(residuals.begin(), residuals.end());
        std::size_t count = 0;
        for (std::size_t i = begin; i < end; ++i) {
            std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(i)));
            std::copy(residuals.begin(), residuals.end(), buf.begin());
            std::shuffle(buf.begin(), buf.end(), rng);
            if (durbin_watson_d(buf) > out.d) ++count;
        }
        above[worker] = count;
    };
    if (w == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(w);
        for (unsigned t = 0; t < w; ++t) pool.emplace_back(run, t);
    }
    std::size_t total = 0;
    for (auto c : above) total += c;
    const double frac = static_cast<double>(total) / static_cast<double>(replicates);
    out.p = PValue{2.0 * std::min(frac, 1.0 - frac), Tails::two};
    return out;
}

inline std::vector<double> ordered_residuals(const LinearModelFit& fit, ResidualOrder order) {
    if (order == ResidualOrder::rows) return fit.residuals;
    if (fit.row_labels.size() != fit.residuals.size())
        throw Error(ErrorKind::shape, "label ordering requested but the fit has no row labels");
    std::vector<std::size_t> idx(fit.residuals.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fit.row_labels[a] < fit.row_labels[b]; });
    std::vector<double> e;
    e.reserve(idx.size());
    for (auto i : idx) e.push_back(fit.residuals[i]);
    return e;
}

inline DurbinWatsonResult durbin_watson(const LinearModelFit& fit, const DurbinWatsonOptions& opt = {}) {
    auto e = ordered_residuals(fit, opt.order);
    return durbin_watson(e, opt.replicates, opt.seed, opt.workers);
}

// ---------------------------------------------------------------- collinearity

struct CollinearityEntry {
    std::string predictor;
    double tolerance = 1.0;
    double vif = 1.0;
};

struct CollinearityReport {
    std::vector<CollinearityEntry> entries;
    std::vector<std::string> dependent;  // predictors with infinite VIF

    const CollinearityEntry& at(std::string_view name) const {
        for (const auto& e : entries)
            if (e.predictor == name) return e;
        throw Error(ErrorKind::lookup, "no collinearity entry for '" + std::string(name) + "'");
    }
};

/// Tolerance 1 - R^2 of each predictor regressed on the others, and VIF.
/// A single predictor has tolerance 1 by definition.
inline CollinearityReport collinearity(std::span<const Series> xs) {
    if (xs.empty()) throw Error(ErrorKind::insufficient_data, "collinearity needs predictors");
    CollinearityReport rep;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        std::vector<Series> others;
        for (std::size_t m = 0; m < xs.size(); ++m)
            if (m != j) others.push_back(xs[m]);
        CollinearityEntry e{xs[j].name, 1.0, 1.0};
        if (!others.empty()) {
            double tol = 0.0;
            try {
                const auto aux = fit_ols(xs[j], others);
                tol = 1.0 - aux.r_squared;
            } catch (const Error& err) {
                if (err.kind() != ErrorKind::singular) throw;
                tol = 0.0;
            }
            if (tol <= 1e-12) {
                e.tolerance = 0.0;
                e.vif = std::numeric_limits<double>::infinity();
                rep.dependent.push_back(xs[j].name);
            } else {
                e.tolerance = tol;
                e.vif = 1.0 / tol;
            }
        }
        rep.entries.push_back(e);
    }
    return rep;
}

inline CollinearityReport collinearity(const Dataset& ds, std::span<const std::string> predictors) {
    return collinearity(select(ds, predictors));
}

// ---------------------------------------------------------------- casewise

struct CasewiseThresholds {
    double standardized_residual = 3.0;
    double cooks_distance = 1.0;
};

struct CasewiseDiagnostics {
    std::vector<double> cooks_distance;
    std::vector<double> standardized_residual;  // internally studentized
    std::vector<std::size_t> flagged;
};

inline CasewiseDiagnostics casewise_diagnostics(const LinearModelFit& fit,
                                                const CasewiseThresholds& thr = {}) {
    CasewiseDiagnostics out;
    const double p = static_cast<double>(fit.k() + 1);
    const double s = fit.rmse;
    for (std::size_t i = 0; i < fit.n; ++i) {
        const double h = fit.leverage[i];
        double r = 0.0, d = 0.0;
        if (s > 0.0 && h < 1.0) {
            r = fit.residuals[i] / (s * std::sqrt(1.0 - h));
            d = r * r * h / (p * (1.0 - h));
        } else if (h >= 1.0) {
            d = std::numeric_limits<double>::infinity();
        }
        out.standardized_residual.push_back(r);
        out.cooks_distance.push_back(d);
        if (std::fabs(r) > thr.standardized_residual || d > thr.cooks_distance) out.flagged.push_back(i);
    }
    return out;
}

// ---------------------------------------------------------------- stepwise

struct StepwiseStep {
    enum class Action { enter, remove };
    Action action;
    std::string variable;
    double p;
};

struct StepwiseResult {
    LinearModelFit fit;
    std::vector<StepwiseStep> trace;
};

/// Forward entry by smallest p below `p_enter`, followed after each entry by
/// backward removal of the largest p above `p_remove`, until stable.
inline StepwiseResult stepwise_fit(const Dataset& ds, std::string_view response,
                                   std::span<const std::string> candidates, double p_enter = 0.05,
                                   double p_remove = 0.10) {
    if (candidates.empty()) throw Error(ErrorKind::insufficient_data, "stepwise needs candidates");
    if (!(p_enter < p_remove)) throw Error(ErrorKind::domain, "stepwise needs p_enter < p_remove");

    const Series y = ds.column(response);
    std::vector<Series> pool;
    for (const auto& c : candidates) pool.push_back(ds.column(c));

    std::vector<std::size_t> included;
    auto fit_with = [&](const std::vector<std::size_t>& idx) {
        std::vector<Series> xs;
        for (auto i : idx) xs.push_back(pool[i]);
        return fit_ols(y, xs, ds.row_labels());
    };

    StepwiseResult res;
    const std::size_t max_steps = 4 * pool.size() * pool.size() + 4;
    for (std::size_t step = 0; step < max_steps; ++step) {
        // nothing left to explain once the fit is exact
        if (!included.empty()) {
            const auto& a = fit_with(included).anova_block;
            if (a.residual_ss <= 1e-24 * a.total_ss) break;
        }
        std::optional<std::size_t> best;
        double best_p = p_enter;
        for (std::size_t c = 0; c < pool.size(); ++c) {
            if (std::find(included.begin(), included.end(), c) != included.end()) continue;
            auto trial = included;
            trial.push_back(c);
            if (ds.size() < trial.size() + 2) continue;
            try {
                const auto f = fit_with(trial);
                const double p = f.coefficients.back().p.value;
                if (p < best_p) {
                    best_p = p;
                    best = c;
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::singular) throw;
            }
        }
        if (!best) break;
        included.push_back(*best);
        res.trace.push_back({StepwiseStep::Action::enter, pool[*best].name, best_p});

        for (;;) {
            const auto f = fit_with(included);
            std::optional<std::size_t> worst;
            double worst_p = p_remove;
            for (std::size_t j = 0; j < included.size(); ++j) {
                const double p = f.coefficients[j + 1].p.value;
                if (p > worst_p) {
                    worst_p = p;
                    worst = j;
                }
            }
            if (!worst) break;
            res.trace.push_back({StepwiseStep::Action::remove, pool[included[*worst]].name, worst_p});
            included.erase(included.begin() + static_cast<std::ptrdiff_t>(*worst));
        }
    }
    res.fit = fit_with(included);
    return res;
}

}  // namespace indexlab

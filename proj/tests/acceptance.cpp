// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "indexlab/indexlab.hpp"

using namespace indexlab;

namespace {

struct Check {
    std::vector<std::string> failures;
    void near(const std::string& what, double got, double want, double tol) {
        if (!(std::fabs(got - want) <= tol + 1e-12)) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s = %.6f, expected %.6f +/- %g", what.c_str(), got, want, tol);
            failures.emplace_back(buf);
        }
    }
    void that(const std::string& what, bool ok) {
        if (!ok) failures.push_back(what);
    }
};

const std::vector<std::string> kAll(columns::all.begin(), columns::all.end());
const std::vector<std::string> kDims(columns::idesi_dimensions.begin(), columns::idesi_dimensions.end());
const std::string kSii(columns::sii), kIdt(columns::integration_of_digital_technology);

const ReportBundle& bundle() {
    static const ReportBundle b = reproduce_all(bundled_table_a1(), 42);
    return b;
}

// Compares every golden cell of the named tables against the bundle.
void golden_tables(Check& c, std::initializer_list<std::string_view> ids) {
    const auto diff = diff_golden(bundle());
    for (const auto& cell : diff.cells)
        for (auto id : ids)
            if (cell.golden.table == id && !cell.pass) c.failures.push_back(cell_address(cell.golden) + ": " + cell.message);
}

void index_reconstruction(Check& c) {
    const auto& ds = bundled_table_a1();
    const auto sii = compute_for_dataset(sii_2016(), ds);
    const auto idesi = compute_for_dataset(idesi_2020(), ds);
    c.that("29 rows", ds.size() == 29);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        c.near(ds.records()[i].name + " SII", sii[i].value, ds.value(i, kSii), 0.1);
        c.near(ds.records()[i].name + " I-DESI", idesi[i].value, ds.value(i, "I-DESI"), 1.0);
    }
}

void descriptives(Check& c) {
    const auto& ds = bundled_table_a1();
    const double mean[] = {57.534, 56.062, 58.417, 59.303, 58.576, 49.103, 59.759, 39.690, 45.517, 44.379, 56.310};
    const double sd[] = {12.202, 16.210, 14.540, 8.118, 18.714, 10.520, 9.425, 11.604, 14.339, 12.448, 16.123};
    const double mn[] = {33.8, 28.8, 36.9, 44.8, 24.0, 26.0, 40.0, 19.0, 19.0, 19.0, 24.0};
    const double mx[] = {79.4, 86.6, 82.0, 76.2, 88.3, 65.0, 72.0, 62.0, 68.0, 62.0, 80.0};
    for (std::size_t i = 0; i < kAll.size(); ++i) {
        const auto s = describe(ds.column(kAll[i]));
        c.near(kAll[i] + " mean", s.mean, mean[i], 0.001);
        c.near(kAll[i] + " sd", s.std_deviation, sd[i], 0.001);
        c.near(kAll[i] + " min", s.minimum, mn[i], 0.001);
        c.near(kAll[i] + " max", s.maximum, mx[i], 0.001);
    }
    golden_tables(c, {"T1", "T7"});
}

void normality(Check& c) {
    const auto& ds = bundled_table_a1();
    auto sii = shapiro_wilk(ds.column(kSii));
    c.near("SII W", sii.w, 0.965, 0.005);
    c.near("SII p", sii.p.value, 0.427, 0.02);
    auto conn = shapiro_wilk(ds.column("Connectivity"));
    c.near("Connectivity W", conn.w, 0.915, 0.005);
    c.near("Connectivity p", conn.p.value, 0.022, 0.02);
    std::size_t cells = 0;
    for (const auto& g : golden_cells())
        if ((g.table == "T1" || g.table == "T7") && g.row.find("Shapiro-Wilk") != std::string::npos) ++cells;
    c.that("normality cells for all 11 columns", cells >= 22);
    golden_tables(c, {"T1", "T7"});
}

void simple_regression(Check& c) {
    const auto fit = fit_ols(bundled_table_a1(), kSii, {"I-DESI"});
    c.near("intercept", fit.intercept().estimate, 15.408, 0.005);
    c.near("slope", fit.coefficients[1].estimate, 0.858, 0.005);
    c.near("R2", fit.r_squared, 0.547, 0.001);
    c.near("adjusted R2", fit.adjusted_r_squared, 0.530, 0.001);
    c.near("RMSE", fit.rmse, 8.363, 0.005);
    c.near("t", fit.coefficients[1].t, 5.711, 0.01);
    const auto a = anova(fit);
    c.near("ANOVA SS", a.regression_ss, 2280.665, 0.5);
    c.near("F", a.f, 32.611, 0.05);
}

void durbin_watson_check(Check& c) {
    const auto& ds = bundled_table_a1();
    const DurbinWatsonOptions opt{10000, 42, ResidualOrder::labels, 0};
    const auto h1 = durbin_watson(fit_ols(ds, kSii, {"I-DESI"}), opt);
    const auto h0 = durbin_watson(null_model(ds, kSii), opt);
    c.near("H1 d", h1.d, 2.351, 0.005);
    c.near("H0 d", h0.d, 2.214, 0.005);
    c.near("H1 autocorrelation", h1.autocorrelation, -0.233, 0.005);
    c.near("H0 autocorrelation", h0.autocorrelation, -0.165, 0.005);
    c.that("bootstrap p present", h1.p && h0.p && h1.replicates == 10000);
    if (h1.p && h0.p) {
        c.near("H1 p", h1.p->value, 0.338, 0.10);
        c.near("H0 p", h0.p->value, 0.559, 0.10);
    }
}

void multiple_regression(Check& c) { golden_tables(c, {"T5"}); }

void casewise(Check& c) {
    const auto& ds = bundled_table_a1();
    const auto fit = fit_ols(ds, kSii, kDims);
    const auto cw = casewise_diagnostics(fit);
    c.that("zero flagged rows", cw.flagged.empty());
    const double p = static_cast<double>(fit.k() + 1);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto loo_ds = ds.without_row(i);
        const auto loo = fit_ols(loo_ds, kSii, kDims);
        double shift = 0.0;
        for (std::size_t r = 0; r < ds.size(); ++r) {
            std::map<std::string, double, std::less<>> x;
            for (const auto& d : kDims) x[d] = ds.value(r, d);
            const double diff = predict(loo, x) - fit.fitted[r];
            shift += diff * diff;
        }
        c.near(ds.records()[i].name + " Cook's D", cw.cooks_distance[i], shift / (p * fit.rmse * fit.rmse), 1e-9);
    }
}

void pca_check(Check& c) {
    const auto res = run_pca(bundled_table_a1(), kDims);
    c.that("one component retained", res.retained == 1);
    const double load[] = {0.845, 0.853, 0.889, 0.908, 0.786};
    for (std::size_t i = 0; i < 5 && res.retained > 0; ++i) c.near(kDims[i] + " loading", res.loadings(i, 0), load[i], 0.005);
    c.near("variance explained", res.variance_explained_pct[0], 73.468, 0.05);
    c.near("KMO", res.kmo, 0.881, 0.005);
    c.near("Bartlett chi2", res.bartlett.statistic, 85.289, 0.5);
    c.near("Bartlett df", res.bartlett.df, 10, 0);
}

void stepwise(Check& c) {
    const auto& ds = bundled_table_a1();
    c.that("gate excludes exactly Connectivity", bundle().excluded_predictors == std::vector<std::string>{"Connectivity"});
    std::vector<std::string> kept;
    for (const auto& d : kDims)
        if (shapiro_wilk(ds.column(d)).p.value >= 0.05) kept.push_back(d);
    const auto res = stepwise_fit(ds, kSii, kept);
    c.that("selects exactly {IDT}", res.fit.predictors == std::vector<std::string>{kIdt});
    if (res.fit.k() != 1) return;
    c.near("intercept", res.fit.intercept().estimate, 27.098, 0.005);
    c.near("slope", res.fit.coefficients[1].estimate, 0.686, 0.005);
    c.near("R2", res.fit.r_squared, 0.490, 0.001);
    c.near("RMSE", res.fit.rmse, 8.878, 0.005);
    c.near("beta", res.fit.coefficients[1].standardized.value_or(0), 0.700, 0.005);
    const auto a = anova(res.fit);
    c.near("ANOVA SS", a.regression_ss, 2040.854, 0.5);
    c.near("F", a.f, 25.894, 0.05);
    c.near("DW", durbin_watson(res.fit, {0, 42, ResidualOrder::labels, 1}).d, 1.988, 0.005);
}

void correlations(Check& c) {
    std::size_t cells = 0;
    for (const auto& g : golden_cells())
        if ((g.table == "T4" || g.table == "T10" || g.table == "T11") && g.row.ends_with("Pearson's r")) ++cells;
    c.that("at least 30 correlation cells", cells >= 30);
    golden_tables(c, {"T4", "T10", "T11"});
}

void prediction(Check& c) {
    const auto fit = fit_ols(bundled_table_a1(), kSii, {"I-DESI"});
    const double derived = fit.intercept().estimate + fit.coefficients[1].estimate * 42.0;
    const auto rec = predict_country("simple", 42.0);
    c.near("prediction", rec.predicted, derived, 1e-12);
    c.near("prediction", rec.predicted, 51.44, 0.005);
    c.that("paper value surfaced", rec.paper_value && *rec.paper_value == 51.084);
    c.that("intercept note", rec.note.find("15.048") != std::string::npos && rec.note.find("15.408") != std::string::npos);
    const auto md = emit(bundle(), OutputFormat::markdown);
    c.that("report mentions 51.084", md.find("51.084") != std::string::npos);
}

void properties(Check& c) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> z(0, 1);
    auto sample = [&](std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = z(rng);
        return v;
    };
    constexpr int runs = 100;
    int fails = 0;
    for (int r = 0; r < runs; ++r) {
        const std::size_t n = 8 + r % 25, k = 1 + r % 4;
        std::vector<Series> xs;
        Series y{"y", sample(n)};
        for (std::size_t j = 0; j < k; ++j) {
            xs.push_back({"x" + std::to_string(j), sample(n)});
            for (std::size_t i = 0; i < n; ++i) y.values[i] += (j + 1.0) * xs[j].values[i];
        }
        const auto fit = fit_ols(y, xs);
        // residual orthogonality
        for (const auto& x : xs) {
            double dot = 0;
            for (std::size_t i = 0; i < n; ++i) dot += fit.residuals[i] * x.values[i];
            if (std::fabs(dot) > 1e-9) ++fails;
        }
        // F = t^2 for a single predictor
        const auto simple = fit_ols(y, std::span<const Series>(xs.data(), 1));
        const double t = simple.coefficients[1].t;
        if (std::fabs(simple.anova_block.f - t * t) > 1e-8 * (1 + t * t)) ++fails;
        // VIF = 1 / tolerance
        for (const auto& e : collinearity(xs).entries)
            if (std::fabs(e.vif * e.tolerance - 1) > 1e-12) ++fails;
        // correlation matrix: eigenvalue sum, Cholesky reconstruction
        std::vector<Series> vars = xs;
        vars.push_back(y);
        const auto corr = correlation_matrix(vars);
        const auto eig = eigen_symmetric(corr.r);
        double sum = 0;
        for (double v : eig.values) sum += v;
        if (std::fabs(sum - static_cast<double>(vars.size())) > 1e-10) ++fails;
        const Cholesky ch(corr.r);
        const Matrix llt = ch.factor() * ch.factor().transpose();
        for (std::size_t i = 0; i < corr.size(); ++i)
            for (std::size_t j = 0; j < corr.size(); ++j)
                if (std::fabs(llt(i, j) - corr.r(i, j)) > 1e-12) ++fails;
        // KMO of any two-variable system
        const std::vector<Series> pair{xs[0], y};
        if (std::fabs(kmo(correlation_matrix(pair)) - 0.5) > 1e-12) ++fails;
        // Shapiro-Wilk location-scale invariance
        std::vector<double> moved;
        for (double v : y.values) moved.push_back(3.5 + 0.25 * v);
        const auto a = shapiro_wilk(y.values), b = shapiro_wilk(moved);
        if (std::fabs(a.w - b.w) > 1e-9 || std::fabs(a.p.value - b.p.value) > 1e-7) ++fails;
    }
    if (fails) c.failures.push_back(std::to_string(fails) + " property violations");

    // pipeline byte-determinism under a fixed seed
    PipelineOptions o;
    o.replicates = 200;
    int diffs = 0;
    for (int r = 0; r < runs; ++r) {
        const auto seed = static_cast<std::uint64_t>(r);
        if (emit(reproduce_all(bundled_table_a1(), seed, o), OutputFormat::csv) !=
            emit(reproduce_all(bundled_table_a1(), seed, o), OutputFormat::csv))
            ++diffs;
    }
    if (diffs) c.failures.push_back(std::to_string(diffs) + " non-deterministic pipeline runs");
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<void(Check&)>>> criteria = {
        {"index reconstruction (SII +/-0.1, I-DESI +/-1.0)", index_reconstruction},
        {"descriptives", descriptives},
        {"Shapiro-Wilk normality", normality},
        {"simple regression", simple_regression},
        {"Durbin-Watson", durbin_watson_check},
        {"multiple regression coefficients and collinearity", multiple_regression},
        {"casewise diagnostics", casewise},
        {"principal component analysis", pca_check},
        {"stepwise regression", stepwise},
        {"correlations and significance stars", correlations},
        {"Hungary prediction", prediction},
        {"property suites", properties},
    };
    const auto start = std::chrono::steady_clock::now();
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        std::printf("%s %2zu %s\n", c.failures.empty() ? "PASS" : "FAIL", i + 1, criteria[i].first);
        for (const auto& f : c.failures) std::printf("       %s\n", f.c_str());
        if (!c.failures.empty()) ++failed;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%zu criteria, %d failed (%.2f s)\n", criteria.size(), failed, secs);
    return failed ? 1 : 0;
}

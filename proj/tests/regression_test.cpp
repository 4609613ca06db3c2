#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "indexlab/regression.hpp"
#include "support.hpp"

using namespace indexlab;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::usage;
}

const std::vector<std::string>& dims() {
    static const std::vector<std::string> d(columns::idesi_dimensions.begin(), columns::idesi_dimensions.end());
    return d;
}

// y = 1 + sum_j b_j x_j + noise
struct Synthetic {
    Series y;
    std::vector<Series> xs;
};

Synthetic synthetic(std::mt19937_64& rng, std::size_t n, std::size_t k, double noise = 1.0) {
    Synthetic s{{"y", std::vector<double>(n, 1.0)}, {}};
    std::normal_distribution<double> coef(0, 2);
    for (std::size_t j = 0; j < k; ++j) {
        s.xs.push_back(fixtures::series("x" + std::to_string(j), fixtures::normal_sample(rng, n, 0, 3)));
        const double b = coef(rng);
        for (std::size_t i = 0; i < n; ++i) s.y.values[i] += b * s.xs[j].values[i];
    }
    const auto e = fixtures::normal_sample(rng, n, 0, noise);
    for (std::size_t i = 0; i < n; ++i) s.y.values[i] += e[i];
    return s;
}

}  // namespace

TEST(Ols, SimpleModel) {
    const auto fit = fit_ols(bundled_table_a1(), "SII", {"I-DESI"});
    EXPECT_NEAR(fit.intercept().estimate, 15.408, 0.005);
    EXPECT_NEAR(fit.coefficient("I-DESI").estimate, 0.858, 0.005);
    EXPECT_NEAR(fit.r_squared, 0.547, 0.001);
    EXPECT_NEAR(fit.adjusted_r_squared, 0.530, 0.001);
    EXPECT_NEAR(fit.rmse, 8.363, 0.005);
    EXPECT_NEAR(fit.coefficient("I-DESI").t, 5.711, 0.01);
    EXPECT_NEAR(*fit.coefficient("I-DESI").standardized, 0.740, 0.005);
    EXPECT_NEAR(fit.intercept().standard_error, 7.539, 0.005);
    EXPECT_EQ(fit.df_residual(), 27u);
    EXPECT_FALSE(fit.intercept().standardized);
    EXPECT_EQ(kind_of([&] { fit.coefficient("Nope"); }), ErrorKind::lookup);
}

TEST(Ols, ExactLine) {
    const Series y{"y", {1, 3, 5}};
    const std::vector<Series> xs{{"x", {0, 1, 2}}};
    const auto fit = fit_ols(y, xs);
    EXPECT_NEAR(fit.coefficient("x").estimate, 2.0, 1e-12);
    EXPECT_NEAR(fit.intercept().estimate, 1.0, 1e-12);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
    for (double e : fit.residuals) EXPECT_NEAR(e, 0.0, 1e-12);
    const auto a = anova(fit);
    EXPECT_TRUE(std::isinf(a.f));
    EXPECT_GT(a.f, 0);
    EXPECT_EQ(a.p.value, 0.0);
}

TEST(Ols, MultipleRegressionCoefficients) {
    const auto fit = fit_ols(bundled_table_a1(), "SII", dims());
    const auto& c = fit.coefficient("Connectivity");
    EXPECT_NEAR(c.estimate, 0.332, 0.005);
    EXPECT_NEAR(c.standard_error, 0.264, 0.005);
    EXPECT_NEAR(c.t, 1.259, 0.005);
    EXPECT_NEAR(c.p.value, 0.221, 0.005);
    EXPECT_NEAR(fit.coefficient("Human capital").estimate, -0.145, 0.005);
    EXPECT_NEAR(fit.intercept().estimate, 12.662, 0.005);
    EXPECT_NEAR(fit.intercept().standard_error, 10.712, 0.005);
}

TEST(Ols, NullModel) {
    const auto& ds = bundled_table_a1();
    const auto h0 = null_model(ds, "SII");
    EXPECT_NEAR(h0.intercept().estimate, 57.534, 0.001);
    EXPECT_NEAR(h0.intercept().standard_error, 2.266, 0.001);
    EXPECT_NEAR(h0.intercept().t, 25.392, 0.01);
    EXPECT_NEAR(h0.rmse, 12.202, 0.001);
    EXPECT_EQ(h0.r_squared, 0.0);
    EXPECT_EQ(kind_of([&] { anova(h0); }), ErrorKind::domain);

    const auto idt = null_model(ds, "IDT");
    EXPECT_NEAR(idt.intercept().estimate, 44.379, 0.001);
    EXPECT_NEAR(idt.rmse, 12.448, 0.001);

    const auto flat = null_model(parse_dataset("country,Y\na,5\nb,5\nc,5\n"), "Y");
    EXPECT_EQ(flat.rmse, 0.0);
}

TEST(Ols, Anova) {
    const auto& ds = bundled_table_a1();
    const auto a = anova(fit_ols(ds, "SII", {"I-DESI"}));
    EXPECT_NEAR(a.regression_ss, 2280.665, 0.5);
    EXPECT_EQ(a.df_regression, 1u);
    EXPECT_EQ(a.df_residual, 27u);
    EXPECT_NEAR(a.f, 32.611, 0.05);
    EXPECT_LT(a.p.value, 0.001);
    const auto b = anova(fit_ols(ds, "SII", {"IDT"}));
    EXPECT_NEAR(b.regression_ss, 2040.854, 0.5);
    EXPECT_NEAR(b.f, 25.894, 0.05);
}

TEST(Ols, Errors) {
    const auto& ds = bundled_table_a1();
    // the third predictor duplicates the first
    const Series y = ds.column("SII");
    const std::vector<Series> xs{ds.column("IDT"), ds.column("HC"), {"IDT copy", ds.column("IDT").values}};
    try {
        fit_ols(y, xs);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::singular);
        EXPECT_NE(std::string(e.what()).find("IDT copy"), std::string::npos);
    }
    const std::vector<Series> x1{{"x", {1, 2}}};
    EXPECT_EQ(kind_of([&] { fit_ols(Series{"y", {1, 2}}, x1); }), ErrorKind::insufficient_data);
    const std::vector<Series> x2{{"x", {1, 2}}};
    EXPECT_EQ(kind_of([&] { fit_ols(Series{"y", {1, 2, 3, 4}}, x2); }), ErrorKind::shape);
    EXPECT_EQ(kind_of([&] { fit_ols(ds, "SII", {"Nope"}); }), ErrorKind::lookup);
}

TEST(Ols, ResidualOrthogonalityProperty) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> kd(1, 5), nd(0, 30);
    for (int run = 0; run < fixtures::kPropertyRuns; ++run) {
        const std::size_t k = kd(rng), n = k + 3 + nd(rng);
        const auto s = synthetic(rng, n, k);
        const auto fit = fit_ols(s.y, s.xs);
        double sum = 0.0, scale = 0.0;
        for (double e : fit.residuals) {
            sum += e;
            scale += std::fabs(e);
        }
        ASSERT_NEAR(sum, 0.0, 1e-10 * (1 + scale));
        for (const auto& x : s.xs) {
            double dot = 0.0, mag = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                dot += fit.residuals[i] * x.values[i];
                mag += std::fabs(fit.residuals[i] * x.values[i]);
            }
            ASSERT_NEAR(dot, 0.0, 1e-10 * (1 + mag));
        }
        // decomposition and fitted + residual = y
        ASSERT_NEAR(fit.anova_block.regression_ss + fit.anova_block.residual_ss, fit.anova_block.total_ss,
                    1e-9 * fit.anova_block.total_ss);
        for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(fit.fitted[i] + fit.residuals[i], s.y.values[i], 1e-9);
    }
}

TEST(Ols, FEqualsTSquaredProperty) {
    std::mt19937_64 rng(37);
    std::uniform_int_distribution<std::size_t> nd(4, 60);
    for (int run = 0; run < fixtures::kPropertyRuns; ++run) {
        const auto s = synthetic(rng, nd(rng), 1, 4.0);
        const auto fit = fit_ols(s.y, s.xs);
        const auto& b = fit.coefficients[1];
        ASSERT_NEAR(fit.anova_block.f, b.t * b.t, 1e-8 * (1 + b.t * b.t));
        ASSERT_NEAR(fit.anova_block.p.value, b.p.value, 1e-9);
    }
}

TEST(Ols, LeverageSumsToParameterCount) {
    std::mt19937_64 rng(41);
    for (int run = 0; run < fixtures::kPropertyRuns; ++run) {
        const std::size_t k = 1 + run % 4;
        const auto s = synthetic(rng, 20, k);
        const auto fit = fit_ols(s.y, s.xs);
        double h = 0.0;
        for (double v : fit.leverage) h += v;
        ASSERT_NEAR(h, static_cast<double>(k + 1), 1e-10);
    }
}

TEST(Predict, Examples) {
    const auto& ds = bundled_table_a1();
    const auto fit = fit_ols(ds, "SII", {"I-DESI"});
    EXPECT_NEAR(predict(fit, {{"I-DESI", 42.0}}), 51.44, 0.005);
    const double xbar = mean_of(ds.column("I-DESI").view());
    EXPECT_NEAR(predict(fit, {{"I-DESI", xbar}}), mean_of(ds.column("SII").view()), 1e-9);
    const auto idt = fit_ols(ds, "SII", {"IDT"});
    EXPECT_NEAR(predict(idt, {{"Integration of digital technology", 50.0}}), 61.40, 0.3);
    EXPECT_EQ(kind_of([&] { predict(fit, {{"IDT", 1.0}}); }), ErrorKind::domain);
}

TEST(DurbinWatson, PaperModelsInLabelOrder) {
    const auto& ds = bundled_table_a1();
    const DurbinWatsonOptions opt{10000, 42, ResidualOrder::labels, 0};
    const auto h1 = durbin_watson(fit_ols(ds, "SII", {"I-DESI"}), opt);
    EXPECT_NEAR(h1.d, 2.351, 0.005);
    EXPECT_NEAR(h1.autocorrelation, -0.233, 0.005);
    ASSERT_TRUE(h1.p);
    EXPECT_NEAR(h1.p->value, 0.338, 0.10);
    const auto h0 = durbin_watson(null_model(ds, "SII"), opt);
    EXPECT_NEAR(h0.d, 2.214, 0.005);
    EXPECT_NEAR(h0.autocorrelation, -0.165, 0.005);
    EXPECT_NEAR(h0.p->value, 0.559, 0.10);
    const auto idt = durbin_watson(fit_ols(ds, "SII", {"IDT"}), opt);
    EXPECT_NEAR(idt.d, 1.988, 0.005);
    EXPECT_NEAR(idt.autocorrelation, -0.071, 0.005);
}

TEST(DurbinWatson, HandExample) {
    const std::vector<double> e{1, -1, 1, -1};
    EXPECT_DOUBLE_EQ(durbin_watson_d(e), 3.0);
    const auto r = durbin_watson(e, 0, 1);
    EXPECT_DOUBLE_EQ(r.d, 3.0);
    EXPECT_FALSE(r.p);
}

TEST(DurbinWatson, Errors) {
    EXPECT_EQ(kind_of([] { durbin_watson(std::vector<double>{1, 2}, 10, 1); }), ErrorKind::insufficient_data);
    EXPECT_EQ(kind_of([] { durbin_watson(std::vector<double>{0, 0, 0}, 10, 1); }), ErrorKind::degenerate);
}

TEST(DurbinWatson, IdentitiesProperty) {
    std::mt19937_64 rng(43);
    std::uniform_int_distribution<std::size_t> nd(3, 50);
    for (int run = 0; run < fixtures::kPropertyRuns; ++run) {
        const auto e = fixtures::normal_sample(rng, nd(rng));
        double ss = 0;
        for (double v : e) ss += v * v;
        const double d = durbin_watson_d(e), ac = lag1_autocorrelation(e);
        // d = 2(1 - ac) - (e1^2 + en^2)/sum e^2
        ASSERT_NEAR(d, 2 * (1 - ac) - (e.front() * e.front() + e.back() * e.back()) / ss, 1e-12);
        std::vector<double> neg, rev(e.rbegin(), e.rend());
        for (double v : e) neg.push_back(-v);
        ASSERT_NEAR(durbin_watson_d(neg), d, 1e-13);
        ASSERT_NEAR(durbin_watson_d(rev), d, 1e-13);
        ASSERT_GE(d, 0.0);
        ASSERT_LE(d, 4.0 + 1e-12);
    }
}

TEST(DurbinWatson, WorkerCountDoesNotChangeResult) {
    std::mt19937_64 rng(47);
    const auto e = fixtures::normal_sample(rng, 29);
    const auto base = durbin_watson(e, 3001, 99, 1);
    for (unsigned w : {2u, 3u, 7u, 16u}) {
        const auto r = durbin_watson(e, 3001, 99, w);
        EXPECT_EQ(r.p->value, base.p->value) << w << " workers";
    }
    // a different seed gives a different bootstrap stream
    const auto other = durbin_watson(e, 3001, 100, 1);
    EXPECT_EQ(other.d, base.d);
}

TEST(DurbinWatson, LabelOrdering) {
    const Series y{"y", {3, 1, 4, 1, 5}};
    const std::vector<Series> xs{{"x", {1, 2, 3, 4, 5}}};
    const auto fit = fit_ols(y, xs, {"e", "d", "c", "b", "a"});
    const auto e = ordered_residuals(fit, ResidualOrder::labels);
    std::vector<double> rev(fit.residuals.rbegin(), fit.residuals.rend());
    EXPECT_EQ(e, rev);
    const auto unlabeled = fit_ols(y, xs);
    EXPECT_EQ(kind_of([&] { ordered_residuals(unlabeled, ResidualOrder::labels); }), ErrorKind::shape);
}

TEST(Collinearity, Dimensions) {
    const auto rep = collinearity(bundled_table_a1(), dims());
    EXPECT_NEAR(rep.at("Integration of digital technology").tolerance, 0.260, 0.005);
    EXPECT_NEAR(rep.at("Integration of digital technology").vif, 3.844, 0.005);
    EXPECT_NEAR(rep.at("Connectivity").vif, 2.331, 0.005);
    EXPECT_TRUE(rep.dependent.empty());
}

TEST(Collinearity, OrthogonalPredictors) {
    const std::vector<Series> xs{{"a", {1, -1, 1, -1}}, {"b", {1, 1, -1, -1}}};
    const auto rep = collinearity(xs);
    EXPECT_NEAR(rep.at("a").vif, 1.0, 1e-12);
    EXPECT_NEAR(rep.at("b").vif, 1.0, 1e-12);
}

TEST(Collinearity, DependentPredictorNamed) {
    const std::vector<Series> xs{{"a", {1, 2, 3, 5}}, {"b", {2, 0, 1, 7}}, {"c", {3, 2, 4, 12}}};
    const auto rep = collinearity(xs);
    EXPECT_FALSE(rep.dependent.empty());
    EXPECT_TRUE(std::isinf(rep.at("c").vif));
    EXPECT_EQ(rep.at("c").tolerance, 0.0);
    EXPECT_EQ(kind_of([] { collinearity(std::vector<Series>{}); }), ErrorKind::insufficient_data);
}

TEST(Collinearity, VifIsReciprocalToleranceProperty) {
    std::mt19937_64 rng(53);
    for (int run = 0; run < fixtures::kPropertyRuns; ++run) {
        const auto s = synthetic(rng, 25, 2 + run % 4);
        const auto rep = collinearity(s.xs);
        for (const auto& e : rep.entries) {
            ASSERT_GT(e.tolerance, 0.0);
            ASSERT_LE(e.tolerance, 1.0);
            ASSERT_NEAR(e.vif * e.tolerance, 1.0, 1e-12);
        }
    }
}

TEST(Casewise, PaperModelHasNoFlags) {
    const auto fit = fit_ols(bundled_table_a1(), "SII", dims());
    const auto cw = casewise_diagnostics(fit);
    EXPECT_TRUE(cw.flagged.empty());
    EXPECT_EQ(cw.cooks_distance.size(), 29u);
}

TEST(Casewise, GrossOutlierFlagged) {
    Series y{"y", {}}, x{"x", {}};
    for (int i = 0; i < 20; ++i) {
        x.values.push_back(i);
        y.values.push_back(2.0 * i + 1.0 + 0.1 * ((i * 7) % 5 - 2));
    }
    x.values.push_back(10.5);
    y.values.push_back(200.0);
    const auto fit = fit_ols(y, std::vector<Series>{x});
    const auto cw = casewise_diagnostics(fit);
    EXPECT_EQ(cw.flagged, (std::vector<std::size_t>{20}));
}

// Cook's distance by definition: shift of all fitted values when row i is
// left out of the fit.
TEST(Casewise, CooksDistanceMatchesLeaveOneOut) {
    auto check = [](const Series& y, const std::vector<Series>& xs) {
        const auto fit = fit_ols(y, xs);
        const auto cw = casewise_diagnostics(fit);
        const double p = static_cast<double>(xs.size() + 1);
        for (std::size_t i = 0; i < y.size(); ++i) {
            Series yi{y.name, y.values};
            yi.values.erase(yi.values.begin() + static_cast<std::ptrdiff_t>(i));
            std::vector<Series> xi = xs;
            for (auto& x : xi) x.values.erase(x.values.begin() + static_cast<std::ptrdiff_t>(i));
            const auto loo = fit_ols(yi, xi);
            double shift = 0.0;
            for (std::size_t r = 0; r < y.size(); ++r) {
                double pred = loo.intercept().estimate;
                for (std::size_t j = 0; j < xs.size(); ++j) pred += loo.coefficients[j + 1].estimate * xs[j].values[r];
                shift += (pred - fit.fitted[r]) * (pred - fit.fitted[r]);
            }
            ASSERT_NEAR(cw.cooks_distance[i], shift / (p * fit.rmse * fit.rmse), 1e-9);
        }
    };
    const auto& ds = bundled_table_a1();
    check(ds.column("SII"), select(ds, dims()));
    std::mt19937_64 rng(59);
    for (int run = 0; run < 20; ++run) {
        const auto s = synthetic(rng, 12 + run, 1 + run % 3);
        check(s.y, s.xs);
    }
}

TEST(Stepwise, PaperCandidates) {
    const std::vector<std::string> cands{"Human capital", "Use of the internet", "Integration of digital technology",
                                         "Digital public services"};
    const auto res = stepwise_fit(bundled_table_a1(), "SII", cands);
    ASSERT_EQ(res.fit.predictors, (std::vector<std::string>{"Integration of digital technology"}));
    ASSERT_EQ(res.trace.size(), 1u);
    EXPECT_EQ(res.trace[0].action, StepwiseStep::Action::enter);
    EXPECT_NEAR(res.fit.intercept().estimate, 27.098, 0.005);
    EXPECT_NEAR(res.fit.coefficients[1].estimate, 0.686, 0.005);
    EXPECT_NEAR(res.fit.r_squared, 0.490, 0.001);
    EXPECT_NEAR(res.fit.adjusted_r_squared, 0.471, 0.001);
    EXPECT_NEAR(res.fit.rmse, 8.878, 0.005);
    EXPECT_NEAR(*res.fit.coefficients[1].standardized, 0.700, 0.005);
}

TEST(Stepwise, SingleCandidate) {
    const std::vector<std::string> c{"I-DESI"};
    const auto res = stepwise_fit(bundled_table_a1(), "SII", c);
    ASSERT_EQ(res.fit.k(), 1u);
    EXPECT_LT(res.trace[0].p, 0.001);
}

TEST(Stepwise, NothingEntersGivesInterceptOnly) {
    std::mt19937_64 rng(61);
    std::vector<CountryRecord> recs;
    std::uniform_real_distribution<double> u(0, 100);
    for (int i = 0; i < 10; ++i) recs.push_back({"c" + std::to_string(i), {u(rng), u(rng)}});
    const Dataset ds({"y", "noise"}, recs);
    const std::vector<std::string> c{"noise"};
    const auto res = stepwise_fit(ds, "y", c, 1e-9, 0.10);
    EXPECT_EQ(res.fit.k(), 0u);
    EXPECT_TRUE(res.trace.empty());
}

TEST(Stepwise, Errors) {
    const auto& ds = bundled_table_a1();
    EXPECT_EQ(kind_of([&] { stepwise_fit(ds, "SII", std::vector<std::string>{}); }), ErrorKind::insufficient_data);
    const std::vector<std::string> c{"IDT"};
    EXPECT_EQ(kind_of([&] { stepwise_fit(ds, "SII", c, 0.2, 0.1); }), ErrorKind::domain);
}

// Oracle: the best single-variable subset by R^2 over all candidates.
TEST(Stepwise, IdenticalCandidateSelectedAgainstSubsetOracle) {
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> u(0, 100);
    for (int run = 0; run < 30; ++run) {
        std::vector<CountryRecord> recs;
        for (int i = 0; i < 15; ++i) {
            const double x1 = u(rng);
            recs.push_back({"c" + std::to_string(i), {x1, x1, u(rng)}});
        }
        const Dataset ds({"y", "x1", "x2"}, recs);
        const std::vector<std::string> cands{"x2", "x1"};
        std::string oracle;
        double best = -1;
        for (const auto& c : cands) {
            const double r2 = fit_ols(ds, "y", {c}).r_squared;
            if (r2 > best) {
                best = r2;
                oracle = c;
            }
        }
        const auto res = stepwise_fit(ds, "y", cands);
        ASSERT_EQ(res.fit.predictors, std::vector<std::string>{oracle});
        ASSERT_EQ(oracle, "x1");
    }
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "indexlab/dataset.hpp"
#include "indexlab/distributions.hpp"
#include "indexlab/error.hpp"

namespace indexlab {

struct DescriptiveStats {
    std::size_t valid = 0;
    std::size_t missing = 0;
    double mean = 0.0;
    double std_deviation = 0.0;  // n - 1 denominator
    double minimum = 0.0;
    double maximum = 0.0;
};

inline double mean_of(std::span<const double> x) {
    if (x.empty()) throw Error(ErrorKind::insufficient_data, "mean of empty series");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Sample standard deviation (n - 1 denominator), two-pass.
inline double sample_sd(std::span<const double> x) {
    if (x.size() < 2) throw Error(ErrorKind::insufficient_data, "standard deviation needs >= 2 values");
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline DescriptiveStats describe(std::span<const double> x) {
    if (x.size() < 2) throw Error(ErrorKind::insufficient_data, "describe needs >= 2 values");
    DescriptiveStats s;
    s.valid = x.size();
    s.mean = mean_of(x);
    s.std_deviation = sample_sd(x);
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    s.minimum = *lo;
    s.maximum = *hi;
    return s;
}

inline DescriptiveStats describe(const Series& s) { return describe(s.view()); }

struct NormalityResult {
    double w = 1.0;
    PValue p;
};

namespace detail {

inline double poly(std::span<const double> coeffs, double x) {
    double r = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
    return r;
}

}  // namespace detail

/// Shapiro-Wilk W with Royston's (1995) coefficient and p-value
/// approximations, valid for 3 <= n <= 5000.
inline NormalityResult shapiro_wilk(std::span<const double> data) {
    const std::size_t n = data.size();
    if (n < 3 || n > 5000)
        throw Error(ErrorKind::domain, "Shapiro-Wilk needs 3 <= n <= 5000, got " + std::to_string(n));
    std::vector<double> x(data.begin(), data.end());
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range > 0.0)) throw Error(ErrorKind::degenerate, "Shapiro-Wilk on a constant series");

    static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
    static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
    static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
    static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
    static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
    static constexpr double g[] = {-2.273, 0.459};

    const double an = static_cast<double>(n);
    const std::size_t half = n / 2;
    std::vector<double> a(half);  // coefficients for the lower half, positive
    if (n == 3) {
        a[0] = std::numbers::sqrt2 / 2.0;
    } else {
        std::vector<double> m(half);
        double summ2 = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
            summ2 += m[i] * m[i];
        }
        summ2 *= 2.0;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1.0 / std::sqrt(an);
        const double a1 = detail::poly(c1, rsn) - m[0] / ssumm2;
        std::size_t first_scaled;
        double fac;
        if (n > 5) {
            first_scaled = 2;
            const double a2 = -m[1] / ssumm2 + detail::poly(c2, rsn);
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) /
                            (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
            a[1] = a2;
        } else {
            first_scaled = 1;
            fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
        }
        a[0] = a1;
        for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
    }

    // Work on range-scaled values for stability.
    double mean = 0.0;
    for (double& v : x) {
        v /= range;
        mean += v;
    }
    mean /= an;
    double ssq = 0.0;
    for (double v : x) ssq += (v - mean) * (v - mean);
    double num = 0.0;
    for (std::size_t i = 0; i < half; ++i) num += a[i] * (x[n - 1 - i] - x[i]);
    double w = num * num / ssq;
    w = std::min(w, 1.0);

    NormalityResult res;
    res.w = w;
    res.p.tails = Tails::one;
    if (n == 3) {
        constexpr double pi6 = 6.0 / std::numbers::pi;
        constexpr double stqr = std::numbers::pi / 3.0;
        res.p.value = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
        return res;
    }
    const double w1 = std::log1p(-w);
    double m, s, y;
    if (n <= 11) {
        const double gamma = detail::poly(g, an);
        if (w1 >= gamma) {
            res.p.value = 1e-99;
            return res;
        }
        y = -std::log(gamma - w1);
        m = detail::poly(c3, an);
        s = std::exp(detail::poly(c4, an));
    } else {
        const double xx = std::log(an);
        y = w1;
        m = detail::poly(c5, xx);
        s = std::exp(detail::poly(c6, xx));
    }
    res.p.value = normal_upper_tail((y - m) / s);
    return res;
}

inline NormalityResult shapiro_wilk(const Series& s) { return shapiro_wilk(s.view()); }

struct TukeyHinges {
    double lower = 0.0;
    double upper = 0.0;
};

namespace detail {
inline double median_sorted(std::span<const double> v) {
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
}  // namespace detail

/// Tukey hinges: medians of the lower and upper halves, the overall median
/// belonging to both halves when n is odd.
inline TukeyHinges tukey_hinges(std::span<const double> data) {
    if (data.size() < 4) throw Error(ErrorKind::insufficient_data, "hinges need >= 4 values");
    std::vector<double> x(data.begin(), data.end());
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    const std::size_t half = (n + 1) / 2;
    std::span<const double> sorted(x);
    return {detail::median_sorted(sorted.first(half)), detail::median_sorted(sorted.last(half))};
}

/// Row indices lying outside the 1.5 IQR fences.
inline std::vector<std::size_t> boxplot_outliers(std::span<const double> data) {
    const auto h = tukey_hinges(data);
    const double iqr = h.upper - h.lower;
    const double lo = h.lower - 1.5 * iqr;
    const double hi = h.upper + 1.5 * iqr;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (data[i] < lo || data[i] > hi) out.push_back(i);
    return out;
}

inline std::vector<std::size_t> boxplot_outliers(const Series& s) { return boxplot_outliers(s.view()); }

}  // namespace indexlab

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "indexlab/error.hpp"

namespace indexlab {

enum class Tails { one, two };

struct PValue {
    double value = 1.0;
    Tails tails = Tails::two;

    operator double() const noexcept { return value; }
};

namespace detail {

inline constexpr double kLentzTolerance = 1e-14;
inline constexpr int kLentzMaxIterations = 300;
inline constexpr double kTiny = 1e-300;

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kLentzMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kLentzTolerance) return h;
    }
    throw Error(ErrorKind::numerical, "incomplete beta continued fraction did not converge");
}

// Series for the lower regularized incomplete gamma P(a, x), x < a + 1.
inline double gamma_series(double a, double x) {
    double sum = 1.0 / a;
    double del = sum;
    double ap = a;
    for (int n = 1; n <= 10 * kLentzMaxIterations; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kLentzTolerance)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw Error(ErrorKind::numerical, "incomplete gamma series did not converge");
}

// Continued fraction for the upper regularized incomplete gamma Q(a, x), x >= a + 1.
inline double gamma_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kLentzMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kLentzTolerance)
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
    throw Error(ErrorKind::numerical, "incomplete gamma continued fraction did not converge");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw Error(ErrorKind::domain, "incomplete beta needs a, b > 0");
    if (x < 0.0 || x > 1.0) throw Error(ErrorKind::domain, "incomplete beta needs x in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// Upper regularized incomplete gamma Q(a, x).
inline double regularized_gamma_q(double a, double x) {
    if (a <= 0.0) throw Error(ErrorKind::domain, "incomplete gamma needs a > 0");
    if (x < 0.0) throw Error(ErrorKind::domain, "incomplete gamma needs x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_series(a, x);
    return detail::gamma_continued_fraction(a, x);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// Inverse standard normal CDF: Acklam's rational approximation followed by
/// one Halley refinement against normal_cdf.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw Error(ErrorKind::domain, "normal quantile needs p in [0, 1]");
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley step; the error term uses whichever tail keeps precision.
    const double e = x < 0.0 ? normal_cdf(x) - p : (1.0 - p) - normal_upper_tail(x);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

/// Two-tailed Student t probability 2 P(T >= |t|).
inline PValue t_two_tailed_p(double t, double df) {
    if (!(df >= 1.0)) throw Error(ErrorKind::domain, "t distribution needs df >= 1");
    if (std::isinf(t)) return {0.0, Tails::two};
    if (std::isnan(t)) throw Error(ErrorKind::domain, "t statistic is NaN");
    const double p = regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
    return {std::clamp(p, 0.0, 1.0), Tails::two};
}

/// Upper tail P(F' >= f) of the F(df1, df2) distribution.
inline PValue f_tail_p(double f, double df1, double df2) {
    if (!(df1 >= 1.0 && df2 >= 1.0)) throw Error(ErrorKind::domain, "F distribution needs df >= 1");
    if (std::isnan(f) || f < 0.0) throw Error(ErrorKind::domain, "F statistic must be >= 0");
    if (std::isinf(f)) return {0.0, Tails::one};
    const double p = regularized_incomplete_beta(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f));
    return {std::clamp(p, 0.0, 1.0), Tails::one};
}

/// Upper tail P(X >= x) of the chi-square distribution.
inline PValue chi2_tail_p(double x, double df) {
    if (!(df >= 1.0)) throw Error(ErrorKind::domain, "chi-square needs df >= 1");
    if (std::isnan(x) || x < 0.0) throw Error(ErrorKind::domain, "chi-square statistic must be >= 0");
    if (std::isinf(x)) return {0.0, Tails::one};
    return {std::clamp(regularized_gamma_q(0.5 * df, 0.5 * x), 0.0, 1.0), Tails::one};
}

}  // namespace indexlab

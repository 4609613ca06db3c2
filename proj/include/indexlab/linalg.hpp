#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "indexlab/error.hpp"

namespace indexlab {

/// Dense row-major matrix of doubles. Small sizes only (p <= a few dozen).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double> column(std::size_t c) const {
        std::vector<double> out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
        return out;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw Error(ErrorKind::shape, "matrix product dimension mismatch");
        Matrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    bool is_square() const noexcept { return rows_ == cols_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::fabs(v));
        return m;
    }

    bool is_symmetric(double tol) const {
        if (!is_square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Householder QR of an n x k matrix (n >= k), without pivoting so that a
/// small diagonal entry of R identifies the first column that is linearly
/// dependent on its predecessors.
class HouseholderQr {
public:
    explicit HouseholderQr(Matrix a) : qr_(std::move(a)), diag_(qr_.cols()) {
        const std::size_t n = qr_.rows();
        const std::size_t k = qr_.cols();
        if (n < k) throw Error(ErrorKind::shape, "QR needs at least as many rows as columns");
        col_norms_.resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += qr_(i, j) * qr_(i, j);
            col_norms_[j] = std::sqrt(s);
        }
        for (std::size_t j = 0; j < k; ++j) {
            double norm = 0.0;
            for (std::size_t i = j; i < n; ++i) norm = std::hypot(norm, qr_(i, j));
            if (norm != 0.0) {
                if (qr_(j, j) < 0.0) norm = -norm;
                for (std::size_t i = j; i < n; ++i) qr_(i, j) /= norm;
                qr_(j, j) += 1.0;
                for (std::size_t c = j + 1; c < k; ++c) {
                    double s = 0.0;
                    for (std::size_t i = j; i < n; ++i) s += qr_(i, j) * qr_(i, c);
                    s = -s / qr_(j, j);
                    for (std::size_t i = j; i < n; ++i) qr_(i, c) += s * qr_(i, j);
                }
            }
            diag_[j] = -norm;
        }
    }

    std::size_t rows() const noexcept { return qr_.rows(); }
    std::size_t cols() const noexcept { return qr_.cols(); }

    /// First column whose R diagonal is negligible relative to its original
    /// norm, if any.
    std::optional<std::size_t> first_dependent_column(double rel_tol = 1e-10) const {
        double scale = 0.0;
        for (double v : col_norms_) scale = std::max(scale, v);
        for (std::size_t j = 0; j < cols(); ++j) {
            const double ref = std::max(col_norms_[j], 1e-300);
            if (std::fabs(diag_[j]) <= rel_tol * ref || std::fabs(diag_[j]) <= 1e-14 * scale)
                return j;
        }
        return std::nullopt;
    }

    /// Computes Q^T b in place.
    std::vector<double> apply_qt(std::vector<double> b) const {
        const std::size_t n = rows();
        for (std::size_t j = 0; j < cols(); ++j) {
            if (qr_(j, j) == 0.0) continue;
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += qr_(i, j) * b[i];
            s = -s / qr_(j, j);
            for (std::size_t i = j; i < n; ++i) b[i] += s * qr_(i, j);
        }
        return b;
    }

    /// Least-squares solution of min ||A x - b||.
    std::vector<double> solve(std::span<const double> b) const {
        if (b.size() != rows()) throw Error(ErrorKind::shape, "QR solve length mismatch");
        if (auto dep = first_dependent_column())
            throw Error(ErrorKind::singular, "column " + std::to_string(*dep) + " is dependent");
        auto y = apply_qt(std::vector<double>(b.begin(), b.end()));
        const std::size_t k = cols();
        std::vector<double> x(k);
        for (std::size_t jj = k; jj-- > 0;) {
            double s = y[jj];
            for (std::size_t c = jj + 1; c < k; ++c) s -= r(jj, c) * x[c];
            x[jj] = s / r(jj, jj);
        }
        return x;
    }

    /// Upper-triangular factor entry R(i, j), i <= j.
    double r(std::size_t i, std::size_t j) const {
        if (i == j) return diag_[i];
        return i < j ? qr_(i, j) : 0.0;
    }

    /// Inverse of the upper-triangular R factor.
    Matrix r_inverse() const {
        const std::size_t k = cols();
        Matrix inv(k, k);
        for (std::size_t c = 0; c < k; ++c) {
            inv(c, c) = 1.0 / r(c, c);
            for (std::size_t row = c; row-- > 0;) {
                double s = 0.0;
                for (std::size_t m = row + 1; m <= c; ++m) s += r(row, m) * inv(m, c);
                inv(row, c) = -s / r(row, row);
            }
        }
        return inv;
    }

private:
    Matrix qr_;
    std::vector<double> diag_;
    std::vector<double> col_norms_;
};

/// Cholesky factor L (lower) of a symmetric positive definite matrix.
class Cholesky {
public:
    explicit Cholesky(const Matrix& a) : l_(a.rows(), a.cols()) {
        if (!a.is_square()) throw Error(ErrorKind::shape, "Cholesky needs a square matrix");
        const std::size_t n = a.rows();
        for (std::size_t j = 0; j < n; ++j) {
            double d = a(j, j);
            for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
            if (!(d > 0.0)) throw Error(ErrorKind::singular, "matrix is not positive definite");
            l_(j, j) = std::sqrt(d);
            for (std::size_t i = j + 1; i < n; ++i) {
                double s = a(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
                l_(i, j) = s / l_(j, j);
            }
        }
    }

    double log_determinant() const {
        double s = 0.0;
        for (std::size_t i = 0; i < l_.rows(); ++i) s += std::log(l_(i, i));
        return 2.0 * s;
    }

    Matrix inverse() const {
        const std::size_t n = l_.rows();
        Matrix inv(n, n);
        std::vector<double> col(n);
        for (std::size_t c = 0; c < n; ++c) {
            std::fill(col.begin(), col.end(), 0.0);
            col[c] = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                double s = col[i];
                for (std::size_t k = 0; k < i; ++k) s -= l_(i, k) * col[k];
                col[i] = s / l_(i, i);
            }
            for (std::size_t i = n; i-- > 0;) {
                double s = col[i];
                for (std::size_t k = i + 1; k < n; ++k) s -= l_(k, i) * col[k];
                col[i] = s / l_(i, i);
            }
            for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
        }
        return inv;
    }

    const Matrix& factor() const noexcept { return l_; }

private:
    Matrix l_;
};

struct SymmetricEigen {
    std::vector<double> values;  // descending
    Matrix vectors;              // columns are eigenvectors, aligned to `values`
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Sweeps until
/// every off-diagonal entry is below `off_tol` in magnitude.
inline SymmetricEigen eigen_symmetric(const Matrix& input, double off_tol = 1e-12,
                                      int max_sweeps = 100) {
    if (!input.is_square()) throw Error(ErrorKind::shape, "eigen_symmetric needs a square matrix");
    if (!input.is_symmetric(1e-10)) throw Error(ErrorKind::shape, "matrix is not symmetric");
    const std::size_t n = input.rows();
    Matrix a = input;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
    Matrix v = Matrix::identity(n);

    auto max_off = [&] {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) m = std::max(m, std::fabs(a(i, j)));
        return m;
    };

    int sweep = 0;
    while (max_off() >= off_tol) {
        if (++sweep > max_sweeps) throw Error(ErrorKind::numerical, "Jacobi did not converge");
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
    SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

}  // namespace indexlab

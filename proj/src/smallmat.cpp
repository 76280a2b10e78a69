#include "switchsync/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "switchsync/errors.hpp"

namespace switchsync {

namespace {

void require_finite(std::span<const double> v, const char* who) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw InvalidInput(std::string(who) + ": non-finite entry");
        }
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
        throw InvalidInput("Matrix: dimensions must be >= 1");
    }
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0 || cols == 0) {
        throw InvalidInput("Matrix: dimensions must be >= 1");
    }
    if (data_.size() != rows * cols) {
        throw InvalidInput("Matrix: entry count does not match shape");
    }
    require_finite(data_, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    if (rows_ == 0 || cols_ == 0) {
        throw InvalidInput("Matrix: dimensions must be >= 1");
    }
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw InvalidInput("Matrix: ragged initializer");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
    require_finite(data_, "Matrix");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    require_finite(d, "Matrix::diagonal");
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

double Matrix::max_abs() const noexcept {
    double best = 0.0;
    for (double x : data_) best = std::max(best, std::abs(x));
    return best;
}

double Matrix::norm() const noexcept {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw InvalidInput("Matrix +: dimension mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw InvalidInput("Matrix -: dimension mismatch");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }
Matrix operator*(const Matrix& a, const Matrix& b) { return matmul(a, b); }

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw InvalidInput("matmul: inner dimensions disagree");
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

SymMatrix::SymMatrix(const Matrix& m) : m_(m) {
    if (!m.is_square()) {
        throw InvalidInput("SymMatrix: matrix must be square");
    }
    if (!m.all_finite()) {
        throw InvalidInput("SymMatrix: non-finite entry");
    }
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (m(i, j) + m(j, i));
            m_(i, j) = avg;
            m_(j, i) = avg;
        }
    }
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows) : SymMatrix(Matrix(rows)) {}

SymEigen sym_eigen(const SymMatrix& sym) {
    if (!sym.matrix().all_finite()) {
        throw InvalidInput("sym_eigen: non-finite entry");
    }
    const std::size_t n = sym.order();
    Matrix a = sym.matrix();
    Matrix v = Matrix::identity(n);

    const double scale = a.norm();
    const double threshold = 1e-12 * scale;
    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    // Sweep count is bounded; Jacobi converges quadratically so a handful of
    // sweeps suffice for n <= 15.
    for (int sweep = 0; sweep < 100 && scale > 0.0; ++sweep) {
        if (off_norm() <= threshold) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
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
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymEigen out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t k = 0; k < n; ++k) out.vectors(k, j) = v(k, order[j]);
    }
    return out;
}

std::vector<double> sym_eigenvalues(const SymMatrix& m) { return sym_eigen(m).values; }

double min_eigenvalue(const SymMatrix& m) { return sym_eigen(m).values.front(); }

double max_eigenvalue(const SymMatrix& m) { return sym_eigen(m).values.back(); }

namespace {

// Lower-triangular Cholesky factor in place; false on a non-positive pivot.
bool cholesky(Matrix& l) {
    const std::size_t n = l.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = l(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0)) return false;
        d = std::sqrt(d);
        l(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = l(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / d;
        }
    }
    return true;
}

}  // namespace

bool is_positive_definite(const SymMatrix& m) {
    if (!m.matrix().all_finite()) {
        throw InvalidInput("is_positive_definite: non-finite entry");
    }
    Matrix l = m.matrix();
    return cholesky(l);
}

double condition_estimate(const Matrix& m) {
    const auto ev = sym_eigenvalues(SymMatrix(matmul(transpose(m), m)));
    if (!(ev.front() > 0.0)) return std::numeric_limits<double>::infinity();
    return std::sqrt(ev.back() / ev.front());
}

Matrix invert(const Matrix& m) {
    if (!m.is_square()) {
        throw InvalidInput("invert: matrix must be square");
    }
    if (!m.all_finite()) {
        throw InvalidInput("invert: non-finite entry");
    }
    const double cond = condition_estimate(m);
    if (!(cond < kSingularCondition)) {
        throw SingularMatrix("invert: matrix is singular or near-singular", cond);
    }

    // Gauss-Jordan with partial pivoting.
    const std::size_t n = m.rows();
    Matrix a = m;
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) {
            throw SingularMatrix("invert: zero pivot", cond);
        }
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) {
                std::swap(a(piv, k), a(col, k));
                std::swap(inv(piv, k), inv(col, k));
            }
        }
        const double d = a(col, col);
        for (std::size_t k = 0; k < n; ++k) {
            a(col, k) /= d;
            inv(col, k) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) {
                a(r, k) -= f * a(col, k);
                inv(r, k) -= f * inv(col, k);
            }
        }
    }
    return inv;
}

std::vector<double> cholesky_solve(const SymMatrix& a, std::span<const double> b) {
    const std::size_t n = a.order();
    if (b.size() != n) {
        throw InvalidInput("cholesky_solve: right-hand side size mismatch");
    }
    Matrix l = a.matrix();
    if (!cholesky(l)) {
        throw SingularMatrix("cholesky_solve: matrix is not positive definite",
                             std::numeric_limits<double>::infinity());
    }
    std::vector<double> y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
        y[i] /= l(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) y[i] -= l(k, i) * y[k];
        y[i] /= l(i, i);
    }
    return y;
}

double log_det_pd(const Matrix& a, bool& ok) {
    Matrix l = a;
    ok = a.is_square() && cholesky(l);
    if (!ok) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

double quadratic_form(const Matrix& m, std::span<const double> e) {
    if (!m.is_square() || m.rows() != e.size()) {
        throw InvalidInput("quadratic_form: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = 0; j < e.size(); ++j) s += e[i] * m(i, j) * e[j];
    return s;
}

}  // namespace switchsync

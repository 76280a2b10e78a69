#pragma once

// Dense kernels for the handful of tiny matrices (3x3 Lyapunov matrices,
// 1x3 gains, Newton systems of order <= 15) used throughout the library.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace switchsync {

class Matrix {
public:
    /// Zero matrix. Throws InvalidInput when either dimension is zero.
    Matrix(std::size_t rows, std::size_t cols);
    /// Row-major entries; every entry must be finite.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> d);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    std::span<const double> entries() const noexcept { return data_; }

    /// Largest absolute entry.
    double max_abs() const noexcept;
    /// Frobenius norm.
    double norm() const noexcept;
    bool all_finite() const noexcept;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s) noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Symmetric matrix. Construction replaces the input with (M + M^T) / 2 so the
/// stored entries are exactly symmetric.
class SymMatrix {
public:
    explicit SymMatrix(const Matrix& m);
    SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

    std::size_t order() const noexcept { return m_.rows(); }
    double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
    const Matrix& matrix() const noexcept { return m_; }
    operator const Matrix&() const noexcept { return m_; }

private:
    Matrix m_;
};

struct SymEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi eigendecomposition.
SymEigen sym_eigen(const SymMatrix& m);
std::vector<double> sym_eigenvalues(const SymMatrix& m);
double min_eigenvalue(const SymMatrix& m);
double max_eigenvalue(const SymMatrix& m);

/// True iff a Cholesky factorization completes with every pivot > 0.
bool is_positive_definite(const SymMatrix& m);

/// sqrt(lambda_max(M^T M) / lambda_min(M^T M)); infinity when singular.
double condition_estimate(const Matrix& m);

inline constexpr double kSingularCondition = 1e12;

/// Throws SingularMatrix when the condition estimate reaches kSingularCondition.
Matrix invert(const Matrix& m);

/// Solves A x = b for symmetric positive definite A. Throws SingularMatrix if
/// the factorization breaks down.
std::vector<double> cholesky_solve(const SymMatrix& a, std::span<const double> b);

/// Natural log of det(A) via Cholesky. `ok` is cleared (and 0 returned) when A
/// is not positive definite.
double log_det_pd(const Matrix& a, bool& ok);

/// e^T M e.
double quadratic_form(const Matrix& m, std::span<const double> e);

}  // namespace switchsync

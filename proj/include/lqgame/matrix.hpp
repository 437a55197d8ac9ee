#pragma once

#include <cmath>
#include <initializer_list>
#include <vector>

#include "lqgame/errors.hpp"

namespace lqgame {

using Vector = std::vector<double>;

/// Dense real matrix, row-major storage. Entries are validated to be finite
/// on construction; all instances in this library are small (n <= ~64).
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols);
    Matrix(int rows, int cols, std::vector<double> entries);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(int n);
    static Matrix zeros(int rows, int cols);
    static Matrix from_column(const Vector& v);
    static Matrix diagonal(const Vector& d);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }

    Matrix transpose() const;
    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix operator-() const;
    Matrix operator*(const Matrix& o) const;
    Matrix operator*(double s) const;
    Matrix& operator+=(const Matrix& o);
    Matrix& operator-=(const Matrix& o);
    Matrix& operator*=(double s);

    Vector apply(const Vector& x) const;           // this * x
    Vector apply_transpose(const Vector& x) const; // this^T * x

    Matrix block(int row0, int col0, int nrows, int ncols) const;
    void set_block(int row0, int col0, const Matrix& sub);

    double frobenius_norm() const;
    double max_abs() const;
    double trace() const;

    void check_finite(const char* context) const;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

Matrix operator*(double s, const Matrix& m);

/// Symmetric matrix; construction symmetrizes the input as (M + M^T)/2 so the
/// stored entries satisfy M == M^T exactly.
class SymmetricMatrix {
  public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(const Matrix& m);
    SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SymmetricMatrix identity(int n);
    static SymmetricMatrix zeros(int n);

    int dim() const { return mat_.rows(); }
    double operator()(int i, int j) const { return mat_(i, j); }
    const Matrix& mat() const { return mat_; }

    SymmetricMatrix operator+(const SymmetricMatrix& o) const { return SymmetricMatrix(mat_ + o.mat_); }
    SymmetricMatrix operator-(const SymmetricMatrix& o) const { return SymmetricMatrix(mat_ - o.mat_); }
    SymmetricMatrix operator*(double s) const { return SymmetricMatrix(mat_ * s); }

    double frobenius_norm() const { return mat_.frobenius_norm(); }
    double max_abs() const { return mat_.max_abs(); }
    double trace() const { return mat_.trace(); }

  private:
    Matrix mat_;
};

/// Symmetrized product (M + M^T)/2 of an arbitrary square matrix.
SymmetricMatrix symmetrize(const Matrix& m);

// Inner products and small-vector helpers.
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
double inner(const Matrix& a, const Matrix& b);             // trace(a^T b)
double inner(const SymmetricMatrix& a, const SymmetricMatrix& b);
double quadratic_form(const SymmetricMatrix& m, const Vector& x);  // x^T M x
Matrix outer(const Vector& x, const Vector& y);             // x y^T

/// Solves the square system M x = rhs by LU with partial pivoting.
/// Throws SingularOperator when a pivot falls below 1e-13 * max|M|.
Vector lu_solve(const Matrix& m, const Vector& rhs);

/// Multi-RHS variant; rhs columns are solved in place.
Matrix lu_solve(const Matrix& m, const Matrix& rhs);

Matrix inverse(const Matrix& m);

/// Cholesky factor L with M = L L^T; returns false when M is not positive
/// definite (leaves factor undefined).
bool cholesky(const SymmetricMatrix& m, Matrix& lower);

}  // namespace lqgame

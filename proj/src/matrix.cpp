#include "lqgame/matrix.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace lqgame {

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix dimension");
}

Matrix::Matrix(int rows, int cols, std::vector<double> entries) : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix dimension");
    if (a_.size() != static_cast<std::size_t>(rows) * cols)
        throw DimensionMismatch("entry count does not match rows*cols");
    check_finite("Matrix(entries)");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    a_.reserve(static_cast<std::size_t>(rows_) * cols_);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != cols_) throw DimensionMismatch("ragged initializer list");
        a_.insert(a_.end(), r.begin(), r.end());
    }
    check_finite("Matrix(initializer_list)");
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::zeros(int rows, int cols) { return Matrix(rows, cols); }

Matrix Matrix::from_column(const Vector& v) {
    Matrix m(static_cast<int>(v.size()), 1);
    for (int i = 0; i < m.rows(); ++i) m(i, 0) = v[static_cast<std::size_t>(i)];
    m.check_finite("Matrix::from_column");
    return m;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (int i = 0; i < m.rows(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    m.check_finite("Matrix::diagonal");
    return m;
}

void Matrix::check_finite(const char* context) const {
    for (double v : a_) {
        if (!std::isfinite(v)) throw NonFiniteValue(context);
    }
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::operator+(const Matrix& o) const {
    Matrix r = *this;
    r += o;
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
    Matrix r = *this;
    r -= o;
    return r;
}

Matrix Matrix::operator-() const {
    Matrix r = *this;
    for (double& v : r.a_) v = -v;
    return r;
}

Matrix& Matrix::operator+=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix addition");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix subtraction");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

Matrix Matrix::operator*(double s) const {
    Matrix r = *this;
    r *= s;
    return r;
}

Matrix operator*(double s, const Matrix& m) { return m * s; }

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw DimensionMismatch("matrix product");
    Matrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int k = 0; k < cols_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
        }
    }
    return r;
}

Vector Matrix::apply(const Vector& x) const {
    if (static_cast<int>(x.size()) != cols_) throw DimensionMismatch("matrix-vector product");
    Vector y(static_cast<std::size_t>(rows_), 0.0);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

Vector Matrix::apply_transpose(const Vector& x) const {
    if (static_cast<int>(x.size()) != rows_) throw DimensionMismatch("transposed matrix-vector product");
    Vector y(static_cast<std::size_t>(cols_), 0.0);
    for (int i = 0; i < rows_; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        if (xi == 0.0) continue;
        for (int j = 0; j < cols_; ++j) y[static_cast<std::size_t>(j)] += (*this)(i, j) * xi;
    }
    return y;
}

Matrix Matrix::block(int row0, int col0, int nrows, int ncols) const {
    if (row0 < 0 || col0 < 0 || row0 + nrows > rows_ || col0 + ncols > cols_)
        throw DimensionMismatch("block out of range");
    Matrix b(nrows, ncols);
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j) b(i, j) = (*this)(row0 + i, col0 + j);
    return b;
}

void Matrix::set_block(int row0, int col0, const Matrix& sub) {
    if (row0 < 0 || col0 < 0 || row0 + sub.rows_ > rows_ || col0 + sub.cols_ > cols_)
        throw DimensionMismatch("set_block out of range");
    for (int i = 0; i < sub.rows_; ++i)
        for (int j = 0; j < sub.cols_; ++j) (*this)(row0 + i, col0 + j) = sub(i, j);
}

double Matrix::frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double s = 0.0;
    for (double v : a_) s = std::max(s, std::abs(v));
    return s;
}

double Matrix::trace() const {
    if (!is_square()) throw DimensionMismatch("trace of non-square matrix");
    double s = 0.0;
    for (int i = 0; i < rows_; ++i) s += (*this)(i, i);
    return s;
}

SymmetricMatrix::SymmetricMatrix(const Matrix& m) {
    if (!m.is_square()) throw DimensionMismatch("symmetric matrix must be square");
    Matrix sym(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) sym(i, j) = 0.5 * (m(i, j) + m(j, i));
    sym.check_finite("SymmetricMatrix");
    mat_ = sym;
}

SymmetricMatrix::SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymmetricMatrix(Matrix(rows)) {}

SymmetricMatrix SymmetricMatrix::identity(int n) { return SymmetricMatrix(Matrix::identity(n)); }

SymmetricMatrix SymmetricMatrix::zeros(int n) { return SymmetricMatrix(Matrix::zeros(n, n)); }

SymmetricMatrix symmetrize(const Matrix& m) { return SymmetricMatrix(m); }

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

double inner(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix inner product");
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * b(i, j);
    return s;
}

double inner(const SymmetricMatrix& a, const SymmetricMatrix& b) { return inner(a.mat(), b.mat()); }

double quadratic_form(const SymmetricMatrix& m, const Vector& x) {
    if (m.dim() != static_cast<int>(x.size())) throw DimensionMismatch("quadratic form");
    double s = 0.0;
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) s += x[static_cast<std::size_t>(i)] * m(i, j) * x[static_cast<std::size_t>(j)];
    return s;
}

Matrix outer(const Vector& x, const Vector& y) {
    Matrix m(static_cast<int>(x.size()), static_cast<int>(y.size()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) m(i, j) = x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
    return m;
}

namespace {

// LU with partial pivoting; factors in place, returns the pivot permutation.
// Throws SingularOperator when the best available pivot is negligible
// relative to the matrix scale.
std::vector<int> lu_factor(Matrix& m) {
    const int n = m.rows();
    const double scale = std::max(m.max_abs(), 1e-300);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(m(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double v = std::abs(m(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best <= 1e-13 * scale) throw SingularOperator("pivot below threshold in LU factorization");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(piv)]);
        }
        const double inv_piv = 1.0 / m(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = m(i, k) * inv_piv;
            m(i, k) = f;
            if (f == 0.0) continue;
            for (int j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
        }
    }
    return perm;
}

Vector lu_substitute(const Matrix& lu, const std::vector<int>& perm, const Vector& rhs) {
    const int n = lu.rows();
    Vector x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = rhs[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    for (int i = 1; i < n; ++i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = 0; j < i; ++j) s -= lu(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= lu(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = s / lu(i, i);
    }
    return x;
}

}  // namespace

Vector lu_solve(const Matrix& m, const Vector& rhs) {
    if (!m.is_square() || m.rows() != static_cast<int>(rhs.size())) throw DimensionMismatch("lu_solve");
    Matrix lu = m;
    const std::vector<int> perm = lu_factor(lu);
    return lu_substitute(lu, perm, rhs);
}

Matrix lu_solve(const Matrix& m, const Matrix& rhs) {
    if (!m.is_square() || m.rows() != rhs.rows()) throw DimensionMismatch("lu_solve (multi-rhs)");
    Matrix lu = m;
    const std::vector<int> perm = lu_factor(lu);
    Matrix x(rhs.rows(), rhs.cols());
    for (int j = 0; j < rhs.cols(); ++j) {
        Vector col(static_cast<std::size_t>(rhs.rows()));
        for (int i = 0; i < rhs.rows(); ++i) col[static_cast<std::size_t>(i)] = rhs(i, j);
        const Vector sol = lu_substitute(lu, perm, col);
        for (int i = 0; i < rhs.rows(); ++i) x(i, j) = sol[static_cast<std::size_t>(i)];
    }
    return x;
}

Matrix inverse(const Matrix& m) { return lu_solve(m, Matrix::identity(m.rows())); }

bool cholesky(const SymmetricMatrix& m, Matrix& lower) {
    const int n = m.dim();
    Matrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = m(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= 0.0 || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    lower = l;
    return true;
}

}  // namespace lqgame

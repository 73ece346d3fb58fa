#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace probeflow {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> entries);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * cols_, cols_};
    }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    Matrix transposed() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double scale);

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(double scale, Matrix m);

// a (n×k) · b (k×m)
Matrix matmul(const Matrix& a, const Matrix& b);
// a (n×k) · bᵀ where b is (m×k)
Matrix matmul_bt(const Matrix& a, const Matrix& b);
// aᵀ · b where a is (k×n), b is (k×m)
Matrix matmul_at(const Matrix& a, const Matrix& b);

// Rows of `m` selected by index, in the given order.
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> indices);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);
double inner_product(const Matrix& a, const Matrix& b);

struct SvdResult {
    Matrix u;                            // rows × r, orthonormal columns
    std::vector<double> singular_values;  // descending, r = min(rows, cols)
    Matrix v;                            // cols × r, orthonormal columns
};

// One-sided Jacobi SVD. Throws ValidationError on empty or non-finite input.
SvdResult svd(const Matrix& m);

// Sum of singular values.
double nuclear_norm(const Matrix& m);

// U·Vᵀ over the singular triplets with σ > 1e-10·σ_max. The exact gradient of
// the nuclear norm when `m` has full rank and distinct nonzero singular values.
Matrix nuclear_norm_subgradient(const Matrix& m);

struct NuclearNormTerms {
    double value = 0.0;
    Matrix subgradient;
};

// Both of the above from a single SVD.
NuclearNormTerms nuclear_norm_terms(const Matrix& m);

}  // namespace probeflow

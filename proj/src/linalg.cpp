#include "probeflow/linalg.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <string>

#include "probeflow/errors.hpp"

namespace probeflow {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) {
        throw ContractError("Matrix: " + std::to_string(values_.size()) + " values for shape " +
                            std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> entries) {
    Matrix m(entries.size(), entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw ContractError("Matrix +=: shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw ContractError("Matrix -=: shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

Matrix& Matrix::operator*=(double scale) {
    for (double& v : values_) v *= scale;
    return *this;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(double scale, Matrix m) { return m *= scale; }

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ContractError("matmul: inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out_row = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto b_row = b.row(k);
            for (std::size_t j = 0; j < b_row.size(); ++j) out_row[j] += aik * b_row[j];
        }
    }
    return out;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw ContractError("matmul_bt: inner dimensions differ");
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto a_row = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto b_row = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a_row.size(); ++k) acc += a_row[k] * b_row[k];
            out(i, j) = acc;
        }
    }
    return out;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw ContractError("matmul_at: inner dimensions differ");
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto a_row = a.row(k);
        auto b_row = b.row(k);
        for (std::size_t i = 0; i < a_row.size(); ++i) {
            const double aki = a_row[i];
            if (aki == 0.0) continue;
            auto out_row = out.row(i);
            for (std::size_t j = 0; j < b_row.size(); ++j) out_row[j] += aki * b_row[j];
        }
    }
    return out;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> indices) {
    Matrix out(indices.size(), m.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = m.row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

double frobenius_norm(const Matrix& m) {
    double acc = 0.0;
    for (double v : m.values()) acc += v * v;
    return std::sqrt(acc);
}

double max_abs(const Matrix& m) {
    double best = 0.0;
    for (double v : m.values()) best = std::max(best, std::abs(v));
    return best;
}

double inner_product(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ContractError("inner_product: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a.values()[i] * b.values()[i];
    return acc;
}

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kZeroColumnNorm = 1e-300;

void validate_svd_input(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) throw ValidationError("svd: empty matrix");
    if (!m.all_finite()) throw ValidationError("svd: matrix contains non-finite values");
}

// Column j of a column-major tall matrix with `height` rows.
inline double* column(std::vector<double>& data, std::size_t height, std::size_t j) {
    return data.data() + j * height;
}

// Adds an orthonormal column to `u` (column-major, height rows) orthogonal to
// the first `filled` columns, written into slot `slot`.
void complete_basis_column(std::vector<double>& u, std::size_t height,
                           std::span<const std::size_t> filled, std::size_t slot) {
    std::vector<double> candidate(height);
    for (std::size_t e = 0; e < height; ++e) {
        std::fill(candidate.begin(), candidate.end(), 0.0);
        candidate[e] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j : filled) {
                const double* q = column(u, height, j);
                double dot = 0.0;
                for (std::size_t i = 0; i < height; ++i) dot += q[i] * candidate[i];
                for (std::size_t i = 0; i < height; ++i) candidate[i] -= dot * q[i];
            }
        }
        double norm = 0.0;
        for (double x : candidate) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 0.5) {
            double* dst = column(u, height, slot);
            for (std::size_t i = 0; i < height; ++i) dst[i] = candidate[i] / norm;
            return;
        }
    }
}

}  // namespace

SvdResult svd(const Matrix& m) {
    validate_svd_input(m);

    const bool transpose = m.rows() < m.cols();
    const std::size_t height = transpose ? m.cols() : m.rows();
    const std::size_t width = transpose ? m.rows() : m.cols();

    // Working copy in column-major layout: column j holds column j of the tall matrix.
    std::vector<double> a(height * width);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (transpose) a[r * height + c] = m(r, c);
            else a[c * height + r] = m(r, c);
        }
    }
    std::vector<double> v(width * width, 0.0);
    for (std::size_t j = 0; j < width; ++j) v[j * width + j] = 1.0;

    // A pair is converged once its Gram entry is negligible relative to the two
    // column norms; an absolute floor would leave tiny columns non-orthogonal.
    const double rel_tol = static_cast<double>(height) * DBL_EPSILON;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < width; ++p) {
            for (std::size_t q = p + 1; q < width; ++q) {
                double* ap = column(a, height, p);
                double* aq = column(a, height, q);
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < height; ++i) {
                    alpha += ap[i] * ap[i];
                    beta += aq[i] * aq[i];
                    gamma += ap[i] * aq[i];
                }
                if (std::abs(gamma) <= rel_tol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < height; ++i) {
                    const double x = ap[i], y = aq[i];
                    ap[i] = c * x - s * y;
                    aq[i] = s * x + c * y;
                }
                double* vp = column(v, width, p);
                double* vq = column(v, width, q);
                for (std::size_t i = 0; i < width; ++i) {
                    const double x = vp[i], y = vq[i];
                    vp[i] = c * x - s * y;
                    vq[i] = s * x + c * y;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> norms(width);
    for (std::size_t j = 0; j < width; ++j) {
        const double* aj = column(a, height, j);
        double acc = 0.0;
        for (std::size_t i = 0; i < height; ++i) acc += aj[i] * aj[i];
        norms[j] = std::sqrt(acc);
    }
    std::vector<std::size_t> order(width);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    // Left vectors of the tall matrix (height × width) and right vectors (width × width),
    // both column-major and already in sorted order.
    std::vector<double> left(height * width, 0.0);
    std::vector<double> right(width * width, 0.0);
    std::vector<double> sigma(width);
    std::vector<std::size_t> filled;
    std::vector<std::size_t> empty_slots;
    for (std::size_t k = 0; k < width; ++k) {
        const std::size_t j = order[k];
        sigma[k] = norms[j];
        std::copy_n(column(v, width, j), width, column(right, width, k));
        if (norms[j] > kZeroColumnNorm) {
            const double* aj = column(a, height, j);
            double* dst = column(left, height, k);
            for (std::size_t i = 0; i < height; ++i) dst[i] = aj[i] / norms[j];
            filled.push_back(k);
        } else {
            sigma[k] = 0.0;
            empty_slots.push_back(k);
        }
    }
    for (std::size_t slot : empty_slots) {
        complete_basis_column(left, height, filled, slot);
        filled.push_back(slot);
    }

    // Map back: M = A when not transposed, M = Aᵀ otherwise.
    const std::vector<double>& u_cols = transpose ? right : left;
    const std::vector<double>& v_cols = transpose ? left : right;
    const std::size_t u_height = transpose ? width : height;
    const std::size_t v_height = transpose ? height : width;

    SvdResult out;
    out.singular_values = sigma;
    out.u = Matrix(m.rows(), width);
    out.v = Matrix(m.cols(), width);
    for (std::size_t k = 0; k < width; ++k) {
        const double* uk = u_cols.data() + k * u_height;
        const double* vk = v_cols.data() + k * v_height;
        double sign = 1.0;
        for (std::size_t i = 0; i < u_height; ++i) {
            if (std::abs(uk[i]) > 1e-12) {
                sign = uk[i] < 0.0 ? -1.0 : 1.0;
                break;
            }
        }
        for (std::size_t i = 0; i < u_height; ++i) out.u(i, k) = sign * uk[i] + 0.0;
        for (std::size_t i = 0; i < v_height; ++i) out.v(i, k) = sign * vk[i] + 0.0;
    }
    return out;
}

double nuclear_norm(const Matrix& m) {
    const SvdResult s = svd(m);
    double total = 0.0;
    for (double sigma : s.singular_values) total += sigma;
    return total;
}

Matrix nuclear_norm_subgradient(const Matrix& m) { return nuclear_norm_terms(m).subgradient; }

NuclearNormTerms nuclear_norm_terms(const Matrix& m) {
    const SvdResult s = svd(m);
    NuclearNormTerms out;
    out.subgradient = Matrix(m.rows(), m.cols());
    for (double sigma : s.singular_values) out.value += sigma;
    if (s.singular_values.front() == 0.0) return out;
    const double cutoff = 1e-10 * s.singular_values.front();
    for (std::size_t k = 0; k < s.singular_values.size(); ++k) {
        if (s.singular_values[k] <= cutoff) break;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const double uik = s.u(i, k);
            auto row = out.subgradient.row(i);
            for (std::size_t j = 0; j < m.cols(); ++j) row[j] += uik * s.v(j, k);
        }
    }
    return out;
}

}  // namespace probeflow

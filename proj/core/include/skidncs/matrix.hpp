#pragma once

#include <array>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace skidncs {

/// Raised when a 2x2 inverse is requested for a (near-)singular matrix.
/// Carries the offending determinant.
class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(double det_value)
        : std::runtime_error("matrix is singular to working precision (det = " +
                             std::to_string(det_value) + ")"),
          det(det_value) {}

    double det;
};

/// Dense real matrix with runtime dimensions up to 8x8, stored row-major
/// in inline storage. Entries are validated to be finite on construction.
/// Zero-dimension matrices (r x 0, 0 x c) are legal and behave as the
/// obvious degenerate operands; they show up when an uncertainty channel
/// collapses to dimension zero.
class Mat {
public:
    static constexpr int kMaxDim = 8;

    Mat() = default;  // 0x0

    /// Zero matrix of the given shape.
    Mat(int rows, int cols);

    /// Row-major entries; throws if the count does not match or any entry
    /// is NaN/Inf.
    Mat(int rows, int cols, std::initializer_list<double> entries);

    static Mat identity(int n);
    static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Mat column(std::initializer_list<double> entries);
    static Mat column(const std::vector<double>& entries);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int size() const { return rows_ * cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(int r, int c) { return data_[r * cols_ + c]; }
    double operator()(int r, int c) const { return data_[r * cols_ + c]; }

    const double* data() const { return data_.data(); }

    Mat operator+(const Mat& other) const;
    Mat operator-(const Mat& other) const;
    Mat operator-() const;
    Mat operator*(double s) const;
    friend Mat operator*(double s, const Mat& m) { return m * s; }

    /// Matrix product; throws std::invalid_argument on inner-dimension
    /// mismatch.
    Mat operator*(const Mat& other) const;

    Mat transposed() const;

    /// Largest absolute entry (0 for an empty matrix).
    double max_abs() const;
    double frobenius_norm() const;
    bool all_finite() const;

    /// Copies `m` into this matrix with its top-left corner at (r0, c0).
    void set_block(int r0, int c0, const Mat& m);
    Mat block(int r0, int c0, int nrows, int ncols) const;

    static Mat hconcat(const Mat& a, const Mat& b);
    static Mat vconcat(const Mat& a, const Mat& b);

private:
    void check_shape(int rows, int cols) const;

    int rows_ = 0;
    int cols_ = 0;
    std::array<double, kMaxDim * kMaxDim> data_{};
};

/// Inverse of a 2x2 matrix by the adjugate formula. The singularity
/// threshold scales with the squared magnitude of the entries:
/// |det| must exceed 1e-12 * max|a_ij|^2.
Mat inverse2(const Mat& a);

struct ThinSvd {
    Mat U;                   // m x r, orthonormal columns
    std::vector<double> s;   // r singular values, descending
    Mat V;                   // n x r, orthonormal columns
};

/// Thin SVD by one-sided Jacobi rotations. Singular values below
/// rank_tol * s_max are truncated (a zero matrix yields rank 0).
ThinSvd thin_svd(const Mat& a, double rank_tol);

/// Largest singular value; the induced-2 norm.
double spectral_norm(const Mat& a);

/// Matrix exponential e^{a*t} for nilpotent a, evaluated as the exact
/// finite sum  sum_{k < nilpotency_degree} (a*t)^k / k!.
/// Throws if a^nilpotency_degree is not numerically zero.
Mat expm_nilpotent(const Mat& a, double t, int nilpotency_degree);

}  // namespace skidncs

#include "skidncs/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace skidncs {

namespace {

void require_finite(const Mat& m, const char* what) {
    if (!m.all_finite()) {
        throw std::invalid_argument(std::string(what) + ": entries must be finite");
    }
}

}  // namespace

void Mat::check_shape(int rows, int cols) const {
    if (rows < 0 || cols < 0 || rows > kMaxDim || cols > kMaxDim) {
        throw std::invalid_argument("Mat: shape " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " out of supported range");
    }
}

Mat::Mat(int rows, int cols) {
    check_shape(rows, cols);
    rows_ = rows;
    cols_ = cols;
}

Mat::Mat(int rows, int cols, std::initializer_list<double> entries) : Mat(rows, cols) {
    if (static_cast<int>(entries.size()) != rows * cols) {
        throw std::invalid_argument("Mat: entry count does not match shape");
    }
    std::copy(entries.begin(), entries.end(), data_.begin());
    require_finite(*this, "Mat");
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const int nr = static_cast<int>(rows.size());
    const int nc = nr == 0 ? 0 : static_cast<int>(rows.begin()->size());
    Mat m(nr, nc);
    int r = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != nc) {
            throw std::invalid_argument("Mat::from_rows: ragged rows");
        }
        int c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    require_finite(m, "Mat::from_rows");
    return m;
}

Mat Mat::column(std::initializer_list<double> entries) {
    Mat m(static_cast<int>(entries.size()), 1);
    int r = 0;
    for (double v : entries) m(r++, 0) = v;
    require_finite(m, "Mat::column");
    return m;
}

Mat Mat::column(const std::vector<double>& entries) {
    Mat m(static_cast<int>(entries.size()), 1);
    for (int r = 0; r < m.rows(); ++r) m(r, 0) = entries[static_cast<size_t>(r)];
    require_finite(m, "Mat::column");
    return m;
}

Mat Mat::operator+(const Mat& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("Mat::operator+: shape mismatch");
    }
    Mat out(rows_, cols_);
    for (int i = 0; i < size(); ++i) out.data_[i] = data_[i] + other.data_[i];
    return out;
}

Mat Mat::operator-(const Mat& other) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) {
        throw std::invalid_argument("Mat::operator-: shape mismatch");
    }
    Mat out(rows_, cols_);
    for (int i = 0; i < size(); ++i) out.data_[i] = data_[i] - other.data_[i];
    return out;
}

Mat Mat::operator-() const {
    Mat out(rows_, cols_);
    for (int i = 0; i < size(); ++i) out.data_[i] = -data_[i];
    return out;
}

Mat Mat::operator*(double s) const {
    Mat out(rows_, cols_);
    for (int i = 0; i < size(); ++i) out.data_[i] = data_[i] * s;
    return out;
}

Mat Mat::operator*(const Mat& other) const {
    if (cols_ != other.rows_) {
        throw std::invalid_argument("Mat::operator*: inner dimensions " +
                                    std::to_string(cols_) + " and " +
                                    std::to_string(other.rows_) + " do not match");
    }
    Mat out(rows_, other.cols_);
    for (int r = 0; r < rows_; ++r) {
        for (int c = 0; c < other.cols_; ++c) {
            double acc = 0.0;
            for (int k = 0; k < cols_; ++k) acc += (*this)(r, k) * other(k, c);
            out(r, c) = acc;
        }
    }
    return out;
}

Mat Mat::transposed() const {
    Mat out(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
}

double Mat::max_abs() const {
    double m = 0.0;
    for (int i = 0; i < size(); ++i) m = std::max(m, std::abs(data_[i]));
    return m;
}

double Mat::frobenius_norm() const {
    double acc = 0.0;
    for (int i = 0; i < size(); ++i) acc += data_[i] * data_[i];
    return std::sqrt(acc);
}

bool Mat::all_finite() const {
    for (int i = 0; i < size(); ++i)
        if (!std::isfinite(data_[i])) return false;
    return true;
}

void Mat::set_block(int r0, int c0, const Mat& m) {
    if (r0 < 0 || c0 < 0 || r0 + m.rows() > rows_ || c0 + m.cols() > cols_) {
        throw std::invalid_argument("Mat::set_block: block does not fit");
    }
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) (*this)(r0 + r, c0 + c) = m(r, c);
}

Mat Mat::block(int r0, int c0, int nrows, int ncols) const {
    if (r0 < 0 || c0 < 0 || nrows < 0 || ncols < 0 || r0 + nrows > rows_ ||
        c0 + ncols > cols_) {
        throw std::invalid_argument("Mat::block: range out of bounds");
    }
    Mat out(nrows, ncols);
    for (int r = 0; r < nrows; ++r)
        for (int c = 0; c < ncols; ++c) out(r, c) = (*this)(r0 + r, c0 + c);
    return out;
}

Mat Mat::hconcat(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("Mat::hconcat: row counts differ");
    }
    Mat out(a.rows(), a.cols() + b.cols());
    out.set_block(0, 0, a);
    out.set_block(0, a.cols(), b);
    return out;
}

Mat Mat::vconcat(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("Mat::vconcat: column counts differ");
    }
    Mat out(a.rows() + b.rows(), a.cols());
    out.set_block(0, 0, a);
    out.set_block(a.rows(), 0, b);
    return out;
}

Mat inverse2(const Mat& a) {
    if (a.rows() != 2 || a.cols() != 2) {
        throw std::invalid_argument("inverse2: expected a 2x2 matrix");
    }
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double scale = a.max_abs();
    const double det_tol = 1e-12 * scale * scale;
    if (std::abs(det) <= det_tol) {
        throw SingularMatrixError(det);
    }
    Mat inv(2, 2);
    inv(0, 0) = a(1, 1) / det;
    inv(0, 1) = -a(0, 1) / det;
    inv(1, 0) = -a(1, 0) / det;
    inv(1, 1) = a(0, 0) / det;
    return inv;
}

namespace {

// One-sided Jacobi on the columns of `work` (rows >= cols assumed by the
// caller). Accumulates the right rotations into v.
void jacobi_sweeps(Mat& work, Mat& v) {
    const int n = work.cols();
    const int m = work.rows();
    const double tol = 1e-15;
    const int max_sweeps = 60;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (int i = 0; i < m; ++i) {
                    alpha += work(i, p) * work(i, p);
                    beta += work(i, q) * work(i, q);
                    gamma += work(i, p) * work(i, q);
                }
                if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    (zeta >= 0.0 ? 1.0 : -1.0) /
                    (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                for (int i = 0; i < m; ++i) {
                    const double wp = work(i, p);
                    const double wq = work(i, q);
                    work(i, p) = c * wp - s * wq;
                    work(i, q) = s * wp + c * wq;
                }
                for (int i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
}

ThinSvd thin_svd_tall(const Mat& a, double rank_tol) {
    const int m = a.rows();
    const int n = a.cols();
    Mat work = a;
    Mat v = Mat::identity(n);
    jacobi_sweeps(work, v);

    std::vector<double> sigma(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) acc += work(i, j) * work(i, j);
        sigma[static_cast<size_t>(j)] = std::sqrt(acc);
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return sigma[static_cast<size_t>(i)] > sigma[static_cast<size_t>(j)]; });

    const double s_max = sigma.empty() ? 0.0 : sigma[static_cast<size_t>(order[0])];
    int rank = 0;
    if (s_max > 0.0) {
        for (int j = 0; j < n; ++j) {
            if (sigma[static_cast<size_t>(order[static_cast<size_t>(j)])] >= rank_tol * s_max &&
                sigma[static_cast<size_t>(order[static_cast<size_t>(j)])] > 0.0) {
                ++rank;
            }
        }
    }

    ThinSvd out;
    out.U = Mat(m, rank);
    out.V = Mat(n, rank);
    out.s.resize(static_cast<size_t>(rank));
    for (int j = 0; j < rank; ++j) {
        const int src = order[static_cast<size_t>(j)];
        const double sv = sigma[static_cast<size_t>(src)];
        out.s[static_cast<size_t>(j)] = sv;
        for (int i = 0; i < m; ++i) out.U(i, j) = work(i, src) / sv;
        for (int i = 0; i < n; ++i) out.V(i, j) = v(i, src);
    }
    return out;
}

}  // namespace

ThinSvd thin_svd(const Mat& a, double rank_tol) {
    if (a.empty()) {
        throw std::invalid_argument("thin_svd: matrix must be nonempty");
    }
    if (a.rows() >= a.cols()) {
        return thin_svd_tall(a, rank_tol);
    }
    ThinSvd t = thin_svd_tall(a.transposed(), rank_tol);
    return ThinSvd{t.V, t.s, t.U};
}

double spectral_norm(const Mat& a) {
    if (a.empty()) {
        throw std::invalid_argument("spectral_norm: matrix must be nonempty");
    }
    ThinSvd svd = thin_svd(a, 0.0);
    return svd.s.empty() ? 0.0 : svd.s.front();
}

Mat expm_nilpotent(const Mat& a, double t, int nilpotency_degree) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("expm_nilpotent: matrix must be square");
    }
    if (nilpotency_degree < 1) {
        throw std::invalid_argument("expm_nilpotent: nilpotency degree must be >= 1");
    }

    // a^degree must vanish numerically; the threshold scales with the
    // entry magnitude raised to the degree.
    Mat power = Mat::identity(a.rows());
    for (int k = 0; k < nilpotency_degree; ++k) power = power * a;
    const double tol = 1e-12 * std::pow(std::max(1.0, a.max_abs()), nilpotency_degree);
    if (power.max_abs() > tol) {
        throw std::invalid_argument(
            "expm_nilpotent: matrix is not nilpotent of the stated degree (|a^d| = " +
            std::to_string(power.max_abs()) + ")");
    }

    Mat result = Mat::identity(a.rows());
    Mat term = Mat::identity(a.rows());
    double factorial = 1.0;
    for (int k = 1; k < nilpotency_degree; ++k) {
        term = term * a * t;
        factorial *= k;
        result = result + term * (1.0 / factorial);
    }
    return result;
}

}  // namespace skidncs

#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace ccaprobe {

// Samples are rows, features are columns.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Penultimate activations, logits and canonical variables all share this layout.
using FeatureMatrix = Matrix;

inline constexpr double kDefaultVarianceKeep = 0.9999;
// Singular values below this fraction of the largest one count as zero.
inline constexpr double kRankTolerance = 1e-10;

// Throws DataError when x is empty or holds a NaN/Inf. `what` names the
// argument in the message.
void require_valid(const Matrix& x, std::string_view what);

struct Centered {
    Matrix centered;
    Vector mean;
};

Centered center(const Matrix& x);

// Thin SVD: x = u * diag(s) * vt, s descending.
struct Svd {
    Matrix u;
    Vector s;
    Matrix vt;
};

Svd svd(const Matrix& x);

// Singular values and right vectors only (u left empty). Tall inputs are
// reduced with a QR first.
Svd svd_right(const Matrix& x);

// Count of singular values above kRankTolerance * max(s).
Index numerical_rank(const Vector& singular_values);

// Sample covariance of already-centered data, normalized by (s - 1).
Matrix covariance(const Matrix& centered);

// Flips the sign of every column whose largest-magnitude entry is negative.
// Returns +1/-1 per column so callers can mirror the flips elsewhere.
Vector canonicalize_column_signs(Matrix& columns);

// Moore-Penrose pseudo-inverse using the kRankTolerance cutoff.
Matrix pseudo_inverse(const Matrix& x);

struct PcaModel {
    Vector mean;
    Matrix components;           // n x k, orthonormal columns
    Vector explained_variance;   // k, descending
    double variance_kept = 1.0;  // fraction of total variance retained by the k components
    double total_variance = 0.0;

    Index input_dim() const { return components.rows(); }
    Index rank() const { return components.cols(); }
};

// Keeps the smallest leading set of components whose cumulative variance
// reaches variance_keep of the total (at least one, at most the numerical rank).
PcaModel fit_pca(const Matrix& x, double variance_keep = kDefaultVarianceKeep);

Matrix pca_transform(const PcaModel& model, const Matrix& x);
Matrix pca_inverse(const PcaModel& model, const Matrix& z);

}  // namespace ccaprobe

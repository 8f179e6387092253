#include "ccaprobe/tensor.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/kernels.hpp"

#include <string>

namespace ccaprobe {

void require_valid(const Matrix& x, std::string_view what) {
    if (x.rows() < 1 || x.cols() < 1)
        throw DataError(std::string(what) + ": empty matrix");
    if (!x.allFinite())
        throw DataError(std::string(what) + ": non-finite entry");
}

Centered center(const Matrix& x) {
    require_valid(x, "center");
    Centered out;
    out.mean = kernels::column_means(x);
    out.centered = x.rowwise() - out.mean.transpose();
    return out;
}

namespace {

// JacobiSVD rather than BDCSVD: Eigen 3.4's divide-and-conquer deflation reads
// out of bounds on exactly rank-deficient inputs with repeated singular values
// (e.g. orthogonal projectors). Every matrix here has at most a few hundred columns.
Svd robust_svd(const Eigen::MatrixXd& x, unsigned options) {
    Eigen::JacobiSVD<Eigen::MatrixXd> solver(x, options);
    if (solver.info() != Eigen::Success) throw NumericalError("svd: decomposition did not converge");
    Svd out;
    out.s = solver.singularValues();
    out.vt = solver.matrixV().transpose();
    if (options & Eigen::ComputeThinU) out.u = solver.matrixU();
    if (!out.u.allFinite() || !out.s.allFinite() || !out.vt.allFinite())
        throw NumericalError("svd: non-finite factors");
    return out;
}

}  // namespace

Svd svd(const Matrix& x) {
    require_valid(x, "svd");
    return robust_svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

Svd svd_right(const Matrix& x) {
    require_valid(x, "svd");
    if (x.rows() < 2 * x.cols()) return robust_svd(x, Eigen::ComputeThinV);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(x.cols()).triangularView<Eigen::Upper>();
    return robust_svd(r, Eigen::ComputeThinV);
}

Index numerical_rank(const Vector& singular_values) {
    if (singular_values.size() == 0) return 0;
    const double cutoff = kRankTolerance * singular_values.maxCoeff();
    Index r = 0;
    for (Index i = 0; i < singular_values.size(); ++i)
        if (singular_values[i] > cutoff) ++r;
    return r;
}

Matrix covariance(const Matrix& centered) {
    if (centered.rows() < 2) throw DataError("covariance: need at least two samples");
    Matrix c = kernels::cross(centered, centered);
    c /= static_cast<double>(centered.rows() - 1);
    return c;
}

Vector canonicalize_column_signs(Matrix& columns) {
    Vector signs = Vector::Ones(columns.cols());
    for (Index j = 0; j < columns.cols(); ++j) {
        Index arg = 0;
        double best = -1.0;
        for (Index i = 0; i < columns.rows(); ++i) {
            const double a = std::abs(columns(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (columns(arg, j) < 0.0) {
            columns.col(j) *= -1.0;
            signs[j] = -1.0;
        }
    }
    return signs;
}

Matrix pseudo_inverse(const Matrix& x) {
    const Svd d = svd(x);
    const Index r = numerical_rank(d.s);
    Matrix out = Matrix::Zero(x.cols(), x.rows());
    for (Index i = 0; i < r; ++i)
        out.noalias() += d.vt.row(i).transpose() * (1.0 / d.s[i]) * d.u.col(i).transpose();
    return out;
}

PcaModel fit_pca(const Matrix& x, double variance_keep) {
    if (!(variance_keep > 0.0 && variance_keep <= 1.0))
        throw UsageError("fit_pca: variance_keep must lie in (0, 1]");
    require_valid(x, "fit_pca");
    if (x.rows() < 2) throw DataError("fit_pca: need at least two samples");

    Centered c = center(x);
    const Svd d = svd_right(c.centered);
    const Index rank = numerical_rank(d.s);
    if (rank == 0) throw DataError("fit_pca: zero total variance");

    const double denom = static_cast<double>(x.rows() - 1);
    const Vector eig = d.s.array().square() / denom;
    const double total = eig.head(rank).sum();
    if (!(total > 0.0)) throw DataError("fit_pca: zero total variance");

    Index k = 0;
    double cumulative = 0.0;
    while (k < rank) {
        cumulative += eig[k];
        ++k;
        if (cumulative >= variance_keep * total) break;
    }

    PcaModel model;
    model.mean = std::move(c.mean);
    model.components = d.vt.topRows(k).transpose();
    canonicalize_column_signs(model.components);
    model.explained_variance = eig.head(k);
    model.total_variance = eig.sum();
    model.variance_kept = cumulative / model.total_variance;
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& x) {
    if (x.cols() != model.input_dim())
        throw DataError("pca_transform: column count does not match the model");
    const Matrix centered = x.rowwise() - model.mean.transpose();
    return centered * model.components;
}

Matrix pca_inverse(const PcaModel& model, const Matrix& z) {
    if (z.cols() != model.rank())
        throw DataError("pca_inverse: column count does not match the model rank");
    Matrix x = z * model.components.transpose();
    x.rowwise() += model.mean.transpose();
    return x;
}

}  // namespace ccaprobe

#include "ccaprobe/cca.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace ccaprobe {
namespace {

// Symmetric inverse square root with the diagonal loading
// eps = 1e-10 * trace / n applied first.
Matrix regularized_inverse_sqrt(const Matrix& cov) {
    const double eps = 1e-10 * cov.trace() / static_cast<double>(cov.rows());
    Eigen::MatrixXd loaded = cov;
    loaded.diagonal().array() += eps;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(loaded);
    if (eig.info() != Eigen::Success)
        throw NumericalError("fit_cca: eigendecomposition of a covariance failed");
    const Eigen::VectorXd values = eig.eigenvalues();
    if (values.minCoeff() <= 0.0) throw NumericalError("fit_cca: covariance is not positive definite");
    const Eigen::MatrixXd& vecs = eig.eigenvectors();
    return vecs * values.cwiseSqrt().cwiseInverse().asDiagonal() * vecs.transpose();
}

}  // namespace

Side side_from_int(int side) {
    if (side == 1) return Side::first;
    if (side == 2) return Side::second;
    throw UsageError("side must be 1 or 2");
}

Matrix CcaBasis::original_map(Side side) const {
    return pca(side).components * basis(side);
}

CcaBasis fit_cca(const FeatureMatrix& x1, const FeatureMatrix& x2, double variance_keep) {
    require_valid(x1, "fit_cca (side 1)");
    require_valid(x2, "fit_cca (side 2)");
    if (x1.rows() != x2.rows()) throw DataError("fit_cca: sides have different sample counts");
    if (x1.rows() < 3) throw DataError("fit_cca: need at least three samples");

    CcaBasis basis;
    basis.pca1 = fit_pca(x1, variance_keep);
    basis.pca2 = fit_pca(x2, variance_keep);
    const Matrix z1 = pca_transform(basis.pca1, x1);
    const Matrix z2 = pca_transform(basis.pca2, x2);

    const Matrix w1 = regularized_inverse_sqrt(covariance(z1));
    const Matrix w2 = regularized_inverse_sqrt(covariance(z2));
    Matrix c12 = kernels::cross(z1, z2);
    c12 /= static_cast<double>(x1.rows() - 1);

    const Svd d = svd(w1 * c12 * w2);
    const Index k = std::min(z1.cols(), z2.cols());
    basis.rho = d.s.head(k);
    basis.b1 = w1 * d.u.leftCols(k);
    basis.b2 = w2 * d.vt.topRows(k).transpose();

    // Mirror side-1 sign flips on side 2 so every pair stays positively correlated.
    const Vector signs = canonicalize_column_signs(basis.b1);
    for (Index j = 0; j < k; ++j) basis.b2.col(j) *= signs[j];
    return basis;
}

FeatureMatrix canonical_variables(const CcaBasis& basis, const FeatureMatrix& x, Side side) {
    const PcaModel& pca = basis.pca(side);
    if (x.cols() != pca.input_dim())
        throw DataError("canonical_variables: column count does not match the fitted side");
    return pca_transform(pca, x) * basis.basis(side);
}

double column_correlation(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
    if (a.size() != b.size() || a.size() < 2) throw DataError("column_correlation: length mismatch");
    const Vector ac = a.array() - a.mean();
    const Vector bc = b.array() - b.mean();
    const double na = ac.norm(), nb = bc.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return ac.dot(bc) / (na * nb);
}

}  // namespace ccaprobe

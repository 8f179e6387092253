#include "ccaprobe/similarity.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/kernels.hpp"

namespace ccaprobe {

double mean_cca(const FeatureMatrix& x1, const FeatureMatrix& x2, double variance_keep) {
    return fit_cca(x1, x2, variance_keep).rho.mean();
}

double svcca(const FeatureMatrix& x1, const FeatureMatrix& x2) { return mean_cca(x1, x2, kSvccaVarianceKeep); }

double pwcca(const FeatureMatrix& x1, const FeatureMatrix& x2, Side reference, double variance_keep) {
    const CcaBasis basis = fit_cca(x1, x2, variance_keep);
    const FeatureMatrix& x = reference == Side::first ? x1 : x2;
    const Matrix xc = center(x).centered;
    const Matrix canon = canonical_variables(basis, x, reference);
    // cov(X, x'_i) for unit-variance x'_i; its squared norm is the variance
    // of X carried by canonical variable i.
    Matrix cov = kernels::cross(canon, xc);
    cov /= static_cast<double>(x.rows() - 1);
    const Vector weights = cov.rowwise().squaredNorm();
    const double total = weights.sum();
    if (!(total > 0.0)) throw DataError("pwcca: canonical variables carry no variance");
    return weights.dot(basis.rho) / total;
}

double linear_cka(const FeatureMatrix& x1, const FeatureMatrix& x2) {
    require_valid(x1, "linear_cka (side 1)");
    require_valid(x2, "linear_cka (side 2)");
    if (x1.rows() != x2.rows()) throw DataError("linear_cka: sides have different sample counts");
    const Matrix a = center(x1).centered;
    const Matrix b = center(x2).centered;
    // Averaging both traversal orders keeps the score bitwise symmetric in its arguments.
    const Matrix m = kernels::cross(a, b);
    double by_rows = 0.0, by_cols = 0.0;
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) by_rows += m(i, j) * m(i, j);
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i) by_cols += m(i, j) * m(i, j);
    const double cross = 0.5 * (by_rows + by_cols);
    const double self1 = kernels::cross(a, a).norm();
    const double self2 = kernels::cross(b, b).norm();
    if (!(self1 > 0.0) || !(self2 > 0.0)) throw DataError("linear_cka: zero-variance side");
    return cross / (self1 * self2);
}

SimilarityReport similarity_report(const FeatureMatrix& x1, const FeatureMatrix& x2) {
    SimilarityReport r;
    r.mean_cca = mean_cca(x1, x2, r.mean_cca_variance_keep);
    r.svcca = mean_cca(x1, x2, r.svcca_variance_keep);
    r.pwcca = pwcca(x1, x2, Side::first, r.pwcca_variance_keep);
    r.linear_cka = linear_cka(x1, x2);
    return r;
}

}  // namespace ccaprobe

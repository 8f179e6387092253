#pragma once

#include "ccaprobe/tensor.hpp"

namespace ccaprobe {

enum class Side { first = 1, second = 2 };

// Parses 1 or 2; anything else is a UsageError.
Side side_from_int(int side);

// Result of a CCA fit. The basis-change matrices act on PCA-reduced
// coordinates: canonical variables of side i are pca_transform(pca_i, X) * b_i.
struct CcaBasis {
    PcaModel pca1;
    PcaModel pca2;
    Matrix b1;   // k1 x k
    Matrix b2;   // k2 x k
    Vector rho;  // k, descending

    Index pairs() const { return rho.size(); }
    const PcaModel& pca(Side side) const { return side == Side::first ? pca1 : pca2; }
    const Matrix& basis(Side side) const { return side == Side::first ? b1 : b2; }

    // n_i x k map from centered original features to canonical variables
    // (PCA components composed with the basis change).
    Matrix original_map(Side side) const;
};

// center -> PCA(variance_keep) -> whiten -> SVD of the whitened cross-covariance.
CcaBasis fit_cca(const FeatureMatrix& x1, const FeatureMatrix& x2,
                 double variance_keep = kDefaultVarianceKeep);

// s x k canonical variables of `x` seen as data from `side`.
FeatureMatrix canonical_variables(const CcaBasis& basis, const FeatureMatrix& x, Side side);

// Pearson correlation of two equally long columns; 0 when either is constant.
double column_correlation(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

}  // namespace ccaprobe

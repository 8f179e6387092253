#pragma once

#include "ccaprobe/cca.hpp"
#include "ccaprobe/tensor.hpp"

namespace ccaprobe {

inline constexpr double kSvccaVarianceKeep = 0.99;

// Mean canonical correlation after the PCA pre-step.
double mean_cca(const FeatureMatrix& x1, const FeatureMatrix& x2, double variance_keep = kDefaultVarianceKeep);

// mean_cca with the 99% variance truncation.
double svcca(const FeatureMatrix& x1, const FeatureMatrix& x2);

// Canonical correlations weighted by the share of the reference side's
// variance each canonical variable accounts for.
double pwcca(const FeatureMatrix& x1, const FeatureMatrix& x2, Side reference = Side::first,
             double variance_keep = kDefaultVarianceKeep);

// ||X1c^T X2c||_F^2 / (||X1c^T X1c||_F ||X2c^T X2c||_F).
double linear_cka(const FeatureMatrix& x1, const FeatureMatrix& x2);

struct SimilarityReport {
    double mean_cca = 0.0;
    double svcca = 0.0;
    double pwcca = 0.0;
    double linear_cka = 0.0;
    double mean_cca_variance_keep = kDefaultVarianceKeep;
    double svcca_variance_keep = kSvccaVarianceKeep;
    double pwcca_variance_keep = kDefaultVarianceKeep;
};

SimilarityReport similarity_report(const FeatureMatrix& x1, const FeatureMatrix& x2);

}  // namespace ccaprobe

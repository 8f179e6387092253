#pragma once

#include "ccaprobe/cca.hpp"
#include "ccaprobe/experiments.hpp"
#include "ccaprobe/heads.hpp"

#include <optional>
#include <vector>

namespace ccaprobe {

struct FusionReport {
    double acc_cca_fusion = 0.0;
    double acc_logit_sum = 0.0;
    double acc_prob_average = 0.0;
    double acc_first = 0.0;   // single-sensor baselines
    double acc_second = 0.0;
    double agreement = 0.0;   // CCA-fusion prediction == logit-sum prediction
    Index k_used = 0;
};

struct CcaFusion {
    LinearHead classifier;        // over the k-dimensional fused space
    std::vector<int> predictions; // on the validation split
    double accuracy = 0.0;
};

// Sums the first k canonical variables of both sides and fits a multinomial
// logistic regression on the sum (train split), scored on the val split.
CcaFusion cca_fusion(const CcaBasis& basis, const LabeledFeatures& train1, const LabeledFeatures& train2,
                     const LabeledFeatures& val1, const LabeledFeatures& val2, Index k, Index n_classes,
                     const TrainHyper& hyper);

// argmax of Y1 + Y2 per row.
std::vector<int> logit_sum(const LinearHead& head1, const FeatureMatrix& x1, const LinearHead& head2,
                           const FeatureMatrix& x2);

// argmax of the mean of the two softmax outputs per row.
std::vector<int> prob_average(const LinearHead& head1, const FeatureMatrix& x1, const LinearHead& head2,
                              const FeatureMatrix& x2);

// Fits CCA on the train features, then compares CCA fusion with k components
// (default n_c) against logit summation and probability averaging.
FusionReport equivalence_test(const NetworkFeatures& first, const NetworkFeatures& second,
                              std::optional<Index> k, const TrainHyper& hyper,
                              double variance_keep = kDefaultVarianceKeep);

}  // namespace ccaprobe

#include "ccaprobe/fusion.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/kernels.hpp"

namespace ccaprobe {
namespace {

void require_aligned(const LabeledFeatures& a, const LabeledFeatures& b, const char* what) {
    if (a.size() != b.size() || a.labels != b.labels)
        throw DataError(std::string(what) + ": the two sensors' rows are not aligned");
}

void require_pair(const LinearHead& head1, const FeatureMatrix& x1, const LinearHead& head2,
                  const FeatureMatrix& x2) {
    if (x1.rows() != x2.rows()) throw DataError("late fusion: sample counts differ");
    if (head1.classes() != head2.classes()) throw DataError("late fusion: class counts differ");
}

}  // namespace

CcaFusion cca_fusion(const CcaBasis& basis, const LabeledFeatures& train1, const LabeledFeatures& train2,
                     const LabeledFeatures& val1, const LabeledFeatures& val2, Index k, Index n_classes,
                     const TrainHyper& hyper) {
    if (k < 1 || k > basis.pairs()) throw UsageError("cca_fusion: k must lie in [1, number of canonical pairs]");
    require_aligned(train1, train2, "cca_fusion");
    require_aligned(val1, val2, "cca_fusion");

    auto fused = [&](const LabeledFeatures& a, const LabeledFeatures& b) {
        const Matrix x1 = canonical_variables(basis, a.features, Side::first);
        const Matrix x2 = canonical_variables(basis, b.features, Side::second);
        return LabeledFeatures{x1.leftCols(k) + x2.leftCols(k), a.labels};
    };
    const LabeledFeatures train = fused(train1, train2);
    const LabeledFeatures val = fused(val1, val2);

    CcaFusion out;
    out.classifier = retrain_head(train, std::nullopt, n_classes, hyper);
    out.predictions = argmax_rows(logits(out.classifier, val.features));
    out.accuracy = score(out.predictions, val.labels, n_classes, Metric::accuracy);
    return out;
}

std::vector<int> logit_sum(const LinearHead& head1, const FeatureMatrix& x1, const LinearHead& head2,
                           const FeatureMatrix& x2) {
    require_pair(head1, x1, head2, x2);
    return argmax_rows(logits(head1, x1) + logits(head2, x2));
}

std::vector<int> prob_average(const LinearHead& head1, const FeatureMatrix& x1, const LinearHead& head2,
                              const FeatureMatrix& x2) {
    require_pair(head1, x1, head2, x2);
    const Matrix p1 = kernels::softmax_rows(logits(head1, x1));
    const Matrix p2 = kernels::softmax_rows(logits(head2, x2));
    return argmax_rows(0.5 * (p1 + p2));
}

FusionReport equivalence_test(const NetworkFeatures& first, const NetworkFeatures& second,
                              std::optional<Index> k, const TrainHyper& hyper, double variance_keep) {
    const Index n_classes = first.head.classes();
    if (second.head.classes() != n_classes) throw DataError("equivalence_test: class counts differ");
    require_aligned(first.train, second.train, "equivalence_test");
    require_aligned(first.val, second.val, "equivalence_test");

    const CcaBasis basis = fit_cca(first.train.features, second.train.features, variance_keep);
    FusionReport report;
    report.k_used = k.value_or(n_classes);
    const CcaFusion fusion = cca_fusion(basis, first.train, second.train, first.val, second.val, report.k_used,
                                        n_classes, hyper);

    const std::vector<int>& labels = first.val.labels;
    const std::vector<int> summed = logit_sum(first.head, first.val.features, second.head, second.val.features);
    const std::vector<int> averaged =
        prob_average(first.head, first.val.features, second.head, second.val.features);

    report.acc_cca_fusion = fusion.accuracy;
    report.acc_logit_sum = score(summed, labels, n_classes, Metric::accuracy);
    report.acc_prob_average = score(averaged, labels, n_classes, Metric::accuracy);
    report.acc_first = evaluate(first.head, first.val, Metric::accuracy);
    report.acc_second = evaluate(second.head, second.val, Metric::accuracy);
    std::size_t same = 0;
    for (std::size_t i = 0; i < summed.size(); ++i) same += summed[i] == fusion.predictions[i];
    report.agreement = static_cast<double>(same) / static_cast<double>(summed.size());
    return report;
}

}  // namespace ccaprobe

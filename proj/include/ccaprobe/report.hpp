#pragma once

#include "ccaprobe/experiments.hpp"
#include "ccaprobe/fusion.hpp"
#include "ccaprobe/similarity.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ccaprobe::report {

// basis_sensor,evaluated_sensor,method,metric,n_s,repeat,metric_before,metric_after
// One row per point; metric_after is empty when retraining was off.
std::string curves_csv(std::span<const CurveResult> curves, Metric metric);
// Rebuilds curves (points, aggregates, baseline) from curves_csv output.
std::vector<CurveResult> parse_curves_csv(std::string_view text);

std::string fusion_csv(const FusionReport& report, std::string_view first, std::string_view second);
FusionReport parse_fusion_csv(std::string_view text);
std::string fusion_text(const FusionReport& report, std::string_view first, std::string_view second);

std::string similarity_csv(const SimilarityReport& report);
SimilarityReport parse_similarity_csv(std::string_view text);
std::string similarity_text(const SimilarityReport& report);

std::string rho_text(const Vector& rho);

}  // namespace ccaprobe::report

#pragma once

#include "ccaprobe/experiments.hpp"

#include <span>
#include <string>

namespace ccaprobe {

// Line chart of metric vs n_s (log2 axis), one line per method with a +-1 std
// band, a dotted marker at n_s = n_classes, and a second panel for the
// retrained metric when present.
std::string curves_svg(std::span<const CurveResult> curves, Index n_classes, const std::string& title);

}  // namespace ccaprobe

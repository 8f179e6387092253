#pragma once

#include "ccaprobe/cca.hpp"
#include "ccaprobe/heads.hpp"
#include "ccaprobe/tensor.hpp"

#include <array>
#include <cstdint>
#include <string_view>

namespace ccaprobe {

enum class Method {
    cca_highest,
    cca_lowest,
    cca_random,
    pca_top,
    random_projection,
    random_selection,
    max_activation,
};

inline constexpr std::array<Method, 7> kAllMethods{
    Method::cca_highest,       Method::cca_lowest,       Method::cca_random,     Method::pca_top,
    Method::random_projection, Method::random_selection, Method::max_activation,
};

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);
bool is_cca(Method method);

// Rank-n_s idempotent map acting on centered feature rows:
// apply(X) = mean + (X - mean) * matrix^T.
struct Projector {
    Matrix matrix;  // n x n
    Index rank = 0;
    Method method = Method::cca_highest;
    std::uint64_t seed = 0;
    Vector mean;    // n

    Index dim() const { return matrix.rows(); }
    bool is_identity() const { return rank == dim(); }
};

// Original-space canonical map A (n x k) and its pseudo-inverse, reusable
// across every projector built from one basis.
struct CanonicalMaps {
    Matrix map;
    Matrix pinv;
};

CanonicalMaps canonical_maps(const CcaBasis& basis, Side side);

// Mean absolute activation per feature; the max_activation ranking statistic.
Vector mean_abs_activation(const Matrix& reference);

// What make_projector needs; unused members may stay null/empty.
struct ProjectionContext {
    Index dim = 0;                     // feature count n
    const CcaBasis* basis = nullptr;   // cca_*
    Side side = Side::first;           // which side of `basis` the features are
    const PcaModel* pca = nullptr;     // pca_top
    const Matrix* reference = nullptr; // max_activation statistic source
    Vector mean;                       // centering for non-CCA methods (zero if empty)
    std::uint64_t seed = 0;            // random methods
    const CanonicalMaps* maps = nullptr;  // optional cache for `basis`
    const Vector* activation = nullptr;   // optional cache for `reference`
};

// Largest n_s the method supports below n (n itself always works, as the identity).
Index max_components(Method method, const ProjectionContext& context);

Projector make_projector(Method method, Index n_s, const ProjectionContext& context);

FeatureMatrix apply(const Projector& p, const FeatureMatrix& x);

// Head whose logits on x equal the original head's logits on apply(p, x).
LinearHead fold_into_head(const LinearHead& head, const Projector& p);

}  // namespace ccaprobe

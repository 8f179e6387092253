#include "ccaprobe/projectors.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/kernels.hpp"
#include "ccaprobe/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <numeric>
#include <span>
#include <string>

namespace ccaprobe {
namespace {

constexpr std::array<std::string_view, 7> kMethodNames{
    "cca_highest", "cca_lowest", "cca_random", "pca_top", "random_projection", "random_selection", "max_activation",
};

Matrix coordinate_mask(Index n, std::span<const int> keep) {
    Matrix p = Matrix::Zero(n, n);
    for (int j : keep) p(j, j) = 1.0;
    return p;
}

// Oblique projection onto the chosen canonical directions along the others:
// P^T = A_S * pinv(A)_S, with A the n x k map to canonical variables.
Matrix canonical_projection(const CanonicalMaps& maps, std::span<const int> keep) {
    const Matrix& a = maps.map;
    const Matrix& a_pinv = maps.pinv;
    const auto n_s = static_cast<Index>(keep.size());
    Matrix a_s(a.rows(), n_s), a_pinv_s(n_s, a.rows());
    for (Index i = 0; i < n_s; ++i) {
        a_s.col(i) = a.col(keep[static_cast<std::size_t>(i)]);
        a_pinv_s.row(i) = a_pinv.row(keep[static_cast<std::size_t>(i)]);
    }
    return (a_s * a_pinv_s).transpose();
}

Vector context_mean(const ProjectionContext& context) {
    if (context.mean.size() == 0) return Vector::Zero(context.dim);
    if (context.mean.size() != context.dim) throw DataError("projector: mean length does not match dim");
    return context.mean;
}

}  // namespace

CanonicalMaps canonical_maps(const CcaBasis& basis, Side side) {
    CanonicalMaps maps;
    maps.map = basis.original_map(side);
    maps.pinv = pseudo_inverse(maps.map);
    return maps;
}

Vector mean_abs_activation(const Matrix& reference) {
    return kernels::column_means(reference.cwiseAbs());
}

std::string_view to_string(Method method) { return kMethodNames[static_cast<std::size_t>(method)]; }

Method method_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kMethodNames.size(); ++i)
        if (kMethodNames[i] == name) return static_cast<Method>(i);
    throw UsageError("unknown reduction method '" + std::string(name) + "'");
}

bool is_cca(Method method) {
    return method == Method::cca_highest || method == Method::cca_lowest || method == Method::cca_random;
}

Index max_components(Method method, const ProjectionContext& context) {
    if (is_cca(method)) {
        if (context.basis == nullptr) throw UsageError(std::string(to_string(method)) + ": needs a CCA basis");
        return context.basis->pairs();
    }
    if (method == Method::pca_top) {
        if (context.pca == nullptr) throw UsageError("pca_top: needs a PCA model");
        return context.pca->rank();
    }
    return context.dim;
}

Projector make_projector(Method method, Index n_s, const ProjectionContext& context) {
    const Index n = context.dim;
    if (n < 1) throw UsageError("projector: feature dimension must be positive");
    if (n_s < 1 || n_s > n) throw UsageError("projector: n_s must lie in [1, n]");

    Projector p;
    p.method = method;
    p.rank = n_s;
    p.seed = context.seed;

    if (is_cca(method)) {
        if (context.basis == nullptr) throw UsageError(std::string(to_string(method)) + ": needs a CCA basis");
        if (context.basis->pca(context.side).input_dim() != n)
            throw DataError("projector: CCA basis was fitted on a different feature dimension");
        p.mean = context.basis->pca(context.side).mean;
    } else if (method == Method::pca_top) {
        if (context.pca == nullptr) throw UsageError("pca_top: needs a PCA model");
        if (context.pca->input_dim() != n) throw DataError("pca_top: PCA model dimension mismatch");
        p.mean = context.pca->mean;
    } else {
        p.mean = context_mean(context);
    }

    if (n_s == n) {
        p.matrix = Matrix::Identity(n, n);
        return p;
    }
    if (n_s > max_components(method, context))
        throw UsageError(std::string(to_string(method)) + ": n_s exceeds the available components");

    switch (method) {
    case Method::cca_highest:
    case Method::cca_lowest:
    case Method::cca_random: {
        const Index k = context.basis->pairs();
        std::vector<int> keep(static_cast<std::size_t>(n_s));
        if (method == Method::cca_highest) {
            std::iota(keep.begin(), keep.end(), 0);
        } else if (method == Method::cca_lowest) {
            std::iota(keep.begin(), keep.end(), static_cast<int>(k - n_s));
        } else {
            Rng rng(context.seed);
            keep = sample_without_replacement(static_cast<int>(k), static_cast<int>(n_s), rng);
        }
        if (context.maps != nullptr) {
            p.matrix = canonical_projection(*context.maps, keep);
        } else {
            p.matrix = canonical_projection(canonical_maps(*context.basis, context.side), keep);
        }
        break;
    }
    case Method::pca_top: {
        const Matrix c = context.pca->components.leftCols(n_s);
        p.matrix = c * c.transpose();
        break;
    }
    case Method::random_projection: {
        Rng rng(context.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        Eigen::MatrixXd g(n, n_s);
        for (Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n_s);
        p.matrix = q * q.transpose();
        break;
    }
    case Method::random_selection: {
        Rng rng(context.seed);
        p.matrix = coordinate_mask(n, sample_without_replacement(static_cast<int>(n), static_cast<int>(n_s), rng));
        break;
    }
    case Method::max_activation: {
        if (context.reference == nullptr) throw UsageError("max_activation: needs a reference feature matrix");
        if (context.reference->cols() != n) throw DataError("max_activation: reference dimension mismatch");
        const Vector activation =
            context.activation != nullptr ? *context.activation : mean_abs_activation(*context.reference);
        if (activation.size() != n) throw DataError("max_activation: activation length mismatch");
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return activation[a] > activation[b]; });
        order.resize(static_cast<std::size_t>(n_s));
        p.matrix = coordinate_mask(n, order);
        break;
    }
    }
    return p;
}

FeatureMatrix apply(const Projector& p, const FeatureMatrix& x) {
    if (x.cols() != p.dim()) throw DataError("apply: feature count does not match the projector");
    if (p.is_identity()) return x;
    const Matrix centered = x.rowwise() - p.mean.transpose();
    Matrix out = kernels::affine(centered, p.matrix);
    out.rowwise() += p.mean.transpose();
    return out;
}

LinearHead fold_into_head(const LinearHead& head, const Projector& p) {
    validate(head);
    if (head.features() != p.dim()) throw DataError("fold_into_head: head and projector dimensions differ");
    if (p.is_identity()) return head;
    // logits = ((x - mu) P^T + mu) W^T + b = x (W P)^T + b + W (mu - P mu)
    LinearHead out;
    out.weights = head.weights * p.matrix;
    out.bias = head.bias + head.weights * (p.mean - p.matrix * p.mean);
    return out;
}

}  // namespace ccaprobe

#include "doctest.h"
#include "support.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/projectors.hpp"

using namespace ccaprobe;
using testing::gaussian;
using testing::max_abs;

namespace {

struct Fixture {
    Matrix x1, x2;
    CcaBasis basis;
    PcaModel pca;
    ProjectionContext ctx;

    explicit Fixture(std::uint64_t seed, Index n = 6, Index s = 400) {
        x1 = gaussian(s, n, seed) * (gaussian(n, n, seed + 1) + 2.0 * Matrix::Identity(n, n));
        x1.array() += 3.0;
        x2 = x1 * gaussian(n, n, seed + 2) + gaussian(s, n, seed + 3);
        basis = fit_cca(x1, x2);
        pca = fit_pca(x1, 1.0);
        ctx.dim = n;
        ctx.basis = &basis;
        ctx.pca = &pca;
        ctx.reference = &x1;
        ctx.mean = pca.mean;
        ctx.seed = seed + 4;
    }
};

// Orthonormal basis of the column space of m.
Matrix image(const Matrix& m) {
    const Svd d = svd(m);
    return d.u.leftCols(numerical_rank(d.s));
}

}  // namespace

TEST_CASE("every method gives the identity at n_s = n") {
    const Fixture f(1);
    for (Method m : kAllMethods) {
        CAPTURE(to_string(m));
        const Projector p = make_projector(m, 6, f.ctx);
        CHECK(max_abs(p.matrix - Matrix::Identity(6, 6)) < 1e-10);
        CHECK(p.is_identity());
        CHECK(apply(p, f.x1) == f.x1);
    }
}

TEST_CASE("random_selection keeps the drawn coordinates") {
    ProjectionContext ctx;
    ctx.dim = 4;
    bool seen = false;
    for (std::uint64_t seed = 0; seed < 200 && !seen; ++seed) {
        ctx.seed = seed;
        const Projector p = make_projector(Method::random_selection, 2, ctx);
        CHECK(p.matrix.isDiagonal());
        CHECK(p.matrix.trace() == 2.0);
        if (p.matrix(0, 0) == 1.0 && p.matrix(2, 2) == 1.0) {
            Matrix expected = Matrix::Zero(4, 4);
            expected.diagonal() << 1, 0, 1, 0;
            CHECK(p.matrix == expected);
            seen = true;
        }
    }
    CHECK(seen);
}

TEST_CASE("projectors are idempotent with the requested rank") {
    for (std::uint64_t seed : {10u, 20u, 30u}) {
        const Fixture f(seed);
        for (Method m : kAllMethods)
            for (Index n_s = 1; n_s < 6; ++n_s) {
                CAPTURE(to_string(m));
                CAPTURE(n_s);
                const Projector p = make_projector(m, n_s, f.ctx);
                CHECK(max_abs(p.matrix * p.matrix - p.matrix) < 1e-8);
                CHECK(numerical_rank(svd(p.matrix).s) == n_s);
                const Matrix once = apply(p, f.x1);
                CHECK(max_abs(apply(p, once) - once) < 1e-8);
            }
    }
}

TEST_CASE("cca_highest is oblique in general and symmetric for an orthogonal basis") {
    const Fixture f(40);
    const Projector oblique = make_projector(Method::cca_highest, 3, f.ctx);
    CHECK(max_abs(oblique.matrix - oblique.matrix.transpose()) > 1e-3);

    // Exactly whitened side 1: its canonical map is orthogonal.
    Matrix x1 = center(gaussian(500, 4, 41)).centered;
    const Eigen::MatrixXd cov = covariance(x1);
    const Eigen::MatrixXd l = cov.llt().matrixL();
    x1 = x1 * Matrix(l.inverse().transpose());
    const Matrix x2 = x1 * gaussian(4, 4, 42) + gaussian(500, 4, 43);
    const CcaBasis basis = fit_cca(x1, x2);
    ProjectionContext ctx;
    ctx.dim = 4;
    ctx.basis = &basis;
    const Projector p = make_projector(Method::cca_highest, 2, ctx);
    CHECK(max_abs(p.matrix - p.matrix.transpose()) < 1e-8);
}

TEST_CASE("cca_highest with every pair is the identity on the PCA subspace") {
    Matrix x1 = gaussian(300, 5, 50);
    x1.col(4) = x1.col(0) - 2.0 * x1.col(1);  // rank 4
    const Matrix x2 = gaussian(300, 4, 51) + x1.leftCols(4);
    const CcaBasis basis = fit_cca(x1, x2);
    REQUIRE(basis.pairs() == 4);
    ProjectionContext ctx;
    ctx.dim = 5;
    ctx.basis = &basis;
    const Projector p = make_projector(Method::cca_highest, 4, ctx);
    const Matrix& c = basis.pca1.components;
    CHECK(max_abs(p.matrix * c - c) < 1e-8);
    // Only four canonical pairs exist below n = 5.
    CHECK(max_components(Method::cca_lowest, ctx) == 4);
    CHECK(make_projector(Method::cca_lowest, 5, ctx).is_identity());
}

TEST_CASE("cca methods reject more components than canonical pairs") {
    Matrix x1 = gaussian(300, 6, 52);
    x1.col(5) = x1.col(0) + x1.col(1);
    x1.col(4) = x1.col(2) - x1.col(3);
    const CcaBasis basis = fit_cca(x1, gaussian(300, 6, 53) + x1);
    REQUIRE(basis.pairs() == 4);
    ProjectionContext ctx;
    ctx.dim = 6;
    ctx.basis = &basis;
    CHECK_NOTHROW(make_projector(Method::cca_random, 4, ctx));
    CHECK_THROWS_AS(make_projector(Method::cca_random, 5, ctx), UsageError);
}

TEST_CASE("cca_highest images are nested") {
    const Fixture f(60, 5);
    for (Index n_s = 2; n_s < 5; ++n_s) {
        const Matrix big = image(make_projector(Method::cca_highest, n_s, f.ctx).matrix);
        const Matrix small = image(make_projector(Method::cca_highest, n_s - 1, f.ctx).matrix);
        const Matrix residual = small - big * (big.transpose() * small);
        CHECK(residual.norm() < 1e-6);
    }
}

TEST_CASE("pca_top is the orthogonal projector on the leading components") {
    const Fixture f(70);
    const Projector p = make_projector(Method::pca_top, 2, f.ctx);
    const Matrix c = f.pca.components.leftCols(2);
    CHECK(max_abs(p.matrix - c * c.transpose()) < 1e-12);
    CHECK(max_abs(p.matrix - p.matrix.transpose()) < 1e-12);
}

TEST_CASE("random_projection keeps n_s / n of isotropic energy") {
    const Matrix x = gaussian(10000, 16, 80);
    ProjectionContext ctx;
    ctx.dim = 16;
    for (Index n_s : {2, 4, 8, 12}) {
        ctx.seed = 81 + static_cast<std::uint64_t>(n_s);
        const Projector p = make_projector(Method::random_projection, n_s, ctx);
        const double kept = apply(p, x).squaredNorm() / x.squaredNorm();
        const double expected = static_cast<double>(n_s) / 16.0;
        CHECK(std::abs(kept - expected) <= 0.05 * expected);
    }
}

TEST_CASE("max_activation keeps the coordinates with the largest mean magnitude") {
    Matrix x = gaussian(200, 5, 90);
    x.col(3) *= 10.0;
    x.col(1) *= 5.0;
    x.col(0).array() += 20.0;
    ProjectionContext ctx;
    ctx.dim = 5;
    ctx.reference = &x;
    const Projector p = make_projector(Method::max_activation, 3, ctx);
    Matrix expected = Matrix::Zero(5, 5);
    expected.diagonal() << 1, 1, 0, 1, 0;
    CHECK(p.matrix == expected);
    const Vector cached = mean_abs_activation(x);
    ctx.activation = &cached;
    CHECK(make_projector(Method::max_activation, 3, ctx).matrix == expected);
}

TEST_CASE("the mean is re-added around the projection") {
    const Fixture f(100);
    const Projector p = make_projector(Method::pca_top, 1, f.ctx);
    const Matrix at_mean = apply(p, f.pca.mean.transpose());
    CHECK(max_abs(at_mean - f.pca.mean.transpose()) < 1e-12);
}

TEST_CASE("cached canonical maps give the same projector") {
    const Fixture f(110);
    ProjectionContext ctx = f.ctx;
    const CanonicalMaps maps = canonical_maps(f.basis, Side::first);
    ctx.maps = &maps;
    for (Method m : {Method::cca_highest, Method::cca_lowest, Method::cca_random})
        CHECK(make_projector(m, 3, ctx).matrix == make_projector(m, 3, f.ctx).matrix);
}

TEST_CASE("folding a projector into a head matches projecting the features") {
    const Fixture f(120);
    const LinearHead head{gaussian(3, 6, 121), testing::gaussian_vector(3, 122)};
    for (Method m : kAllMethods) {
        const Projector p = make_projector(m, 2, f.ctx);
        CHECK(max_abs(logits(fold_into_head(head, p), f.x1) - logits(head, apply(p, f.x1))) < 1e-9);
    }
}

TEST_CASE("projector errors") {
    const Fixture f(130);
    CHECK_THROWS_AS(make_projector(Method::pca_top, 0, f.ctx), UsageError);
    CHECK_THROWS_AS(make_projector(Method::pca_top, 7, f.ctx), UsageError);
    ProjectionContext bare;
    bare.dim = 6;
    CHECK_THROWS_AS(make_projector(Method::cca_highest, 2, bare), UsageError);
    CHECK_THROWS_AS(make_projector(Method::pca_top, 2, bare), UsageError);
    CHECK_THROWS_AS(make_projector(Method::max_activation, 2, bare), UsageError);
    const Projector p = make_projector(Method::random_projection, 2, f.ctx);
    CHECK_THROWS_AS(apply(p, gaussian(3, 5, 131)), DataError);
    CHECK_THROWS_AS(method_from_string("nope"), UsageError);
    for (Method m : kAllMethods) CHECK(method_from_string(to_string(m)) == m);
}

#include "doctest.h"
#include "support.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/kernels.hpp"

#include <omp.h>

using namespace ccaprobe;
using testing::gaussian;

namespace {

// Shapes on both sides of the parallel threshold, including ragged blocks.
const std::vector<std::array<Index, 3>> kShapes{{1, 1, 1}, {3, 5, 2}, {17, 9, 13}, {600, 64, 64}, {2001, 33, 8}};

template <class F>
void for_thread_counts(F&& f) {
    const int saved = omp_get_max_threads();
    for (int threads : {1, 2, 3, 8}) {
        omp_set_num_threads(threads);
        CAPTURE(threads);
        f();
    }
    omp_set_num_threads(saved);
}

}  // namespace

TEST_CASE("affine matches the serial reference bitwise") {
    for (auto [s, n, m] : kShapes) {
        const Matrix x = gaussian(s, n, 1), w = gaussian(m, n, 2);
        const Vector b = testing::gaussian_vector(m, 3);
        const Matrix ref = kernels::serial::affine(x, w, b);
        const Matrix ref_nobias = kernels::serial::affine(x, w);
        for_thread_counts([&] {
            CHECK(kernels::affine(x, w, b) == ref);
            CHECK(kernels::affine(x, w) == ref_nobias);
        });
    }
}

TEST_CASE("affine agrees with a plain matrix product") {
    const Matrix x = gaussian(40, 7, 4), w = gaussian(5, 7, 5);
    const Vector b = testing::gaussian_vector(5, 6);
    Matrix expected = x * w.transpose();
    expected.rowwise() += b.transpose();
    CHECK(testing::max_abs(kernels::affine(x, w, b) - expected) < 1e-12);
}

TEST_CASE("cross matches the serial reference bitwise") {
    for (auto [s, p, q] : kShapes) {
        const Matrix a = gaussian(s, p, 7), b = gaussian(s, q, 8);
        const Matrix ref = kernels::serial::cross(a, b);
        CHECK(testing::max_abs(ref - a.transpose() * b) < 1e-9 * std::max<double>(1.0, static_cast<double>(s)));
        for_thread_counts([&] { CHECK(kernels::cross(a, b) == ref); });
    }
}

TEST_CASE("column sums and means match the serial reference bitwise") {
    for (auto [s, n, m] : kShapes) {
        (void)m;
        const Matrix x = gaussian(s, n, 9);
        const Vector sums = kernels::serial::column_sums(x);
        const Vector means = kernels::serial::column_means(x);
        for_thread_counts([&] {
            CHECK(kernels::column_sums(x) == sums);
            CHECK(kernels::column_means(x) == means);
        });
    }
}

TEST_CASE("relu and softmax match the serial reference bitwise") {
    for (auto [s, n, m] : kShapes) {
        (void)m;
        const Matrix x = gaussian(s, n, 10, 5.0);
        Matrix relu_ref = x;
        kernels::serial::relu_inplace(relu_ref);
        const Matrix soft_ref = kernels::serial::softmax_rows(x);
        for_thread_counts([&] {
            Matrix relu = x;
            kernels::relu_inplace(relu);
            CHECK(relu == relu_ref);
            CHECK(kernels::softmax_rows(x) == soft_ref);
        });
    }
}

TEST_CASE("shape errors are reported") {
    CHECK_THROWS_AS(kernels::affine(Matrix::Zero(2, 3), Matrix::Zero(2, 2)), DataError);
    CHECK_THROWS_AS(kernels::cross(Matrix::Zero(2, 3), Matrix::Zero(3, 3)), DataError);
    CHECK_THROWS_AS(kernels::column_means(Matrix(0, 3)), DataError);
}

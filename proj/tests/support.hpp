#pragma once

// Small helpers shared by the unit tests.

#include "ccaprobe/random.hpp"
#include "ccaprobe/tensor.hpp"

#include <cmath>
#include <random>

namespace testing {

using ccaprobe::Index;
using ccaprobe::Matrix;
using ccaprobe::Vector;

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed, double sigma = 1.0) {
    ccaprobe::Rng rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

inline Vector gaussian_vector(Index n, std::uint64_t seed) {
    const Matrix m = gaussian(n, 1, seed);
    return Vector(m.col(0));
}

// Haar-ish random orthogonal matrix from the QR of a Gaussian one.
inline Matrix random_orthogonal(Index n, std::uint64_t seed) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(gaussian(n, n, seed)));
    return Matrix(qr.householderQ());
}

// Plain two-pass Pearson correlation.
inline double pearson(const Vector& a, const Vector& b) {
    const double ma = a.mean(), mb = b.mean();
    double sab = 0, saa = 0, sbb = 0;
    for (Index i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing

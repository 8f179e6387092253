#include "ccaprobe/kernels.hpp"

#include "ccaprobe/error.hpp"

#include <algorithm>
#include <cmath>

namespace ccaprobe::kernels {
namespace {

// Below this many multiply-adds the fork/join overhead dominates.
constexpr Index kParallelWork = Index{1} << 15;

}  // namespace

Matrix affine(const Matrix& x, const Matrix& w, const Vector& bias) {
    const Index s = x.rows(), n = x.cols(), m = w.rows();
    if (w.cols() != n) throw DataError("affine: weight columns do not match input columns");
    if (bias.size() != 0 && bias.size() != m) throw DataError("affine: bias length mismatch");

    const Matrix wt = w.transpose();  // n x m, rows contiguous over outputs
    Matrix out(s, m);
    const bool has_bias = bias.size() != 0;
#pragma omp parallel for schedule(static) if (s * n * m > kParallelWork)
    for (Index i = 0; i < s; ++i) {
        double* __restrict y = out.row(i).data();
        for (Index c = 0; c < m; ++c) y[c] = has_bias ? bias[c] : 0.0;
        const double* xi = x.row(i).data();
        for (Index k = 0; k < n; ++k) {
            const double xik = xi[k];
            const double* wk = wt.row(k).data();
            for (Index c = 0; c < m; ++c) y[c] += xik * wk[c];
        }
    }
    return out;
}

Matrix cross(const Matrix& a, const Matrix& b) {
    const Index s = a.rows(), p = a.cols(), q = b.cols();
    if (b.rows() != s) throw DataError("cross: row counts differ");

    // Output rows are handled in blocks so each row of b is loaded once per
    // block; every element still sums over samples in ascending order.
    constexpr Index kBlock = 8;
    const Matrix at = a.transpose();
    const Index blocks = (p + kBlock - 1) / kBlock;
    Matrix out = Matrix::Zero(p, q);
#pragma omp parallel for schedule(static) if (s * p * q > kParallelWork)
    for (Index blk = 0; blk < blocks; ++blk) {
        const Index i0 = blk * kBlock, i1 = std::min(p, i0 + kBlock);
        for (Index r = 0; r < s; ++r) {
            const double* __restrict br = b.row(r).data();
            for (Index i = i0; i < i1; ++i) {
                const double ari = at(i, r);
                double* __restrict o = out.row(i).data();
                for (Index j = 0; j < q; ++j) o[j] += ari * br[j];
            }
        }
    }
    return out;
}

Vector column_sums(const Matrix& x) {
    const Index s = x.rows(), n = x.cols();
    Vector out = Vector::Zero(n);
    // Row-ordered sweep; each column is accumulated in ascending row order.
    // Parallel over column stripes.
    constexpr Index kStripe = 16;
    const Index stripes = (n + kStripe - 1) / kStripe;
#pragma omp parallel for schedule(static) if (s * n > kParallelWork)
    for (Index st = 0; st < stripes; ++st) {
        const Index j0 = st * kStripe, j1 = std::min(n, j0 + kStripe);
        double* __restrict acc = out.data();
        for (Index r = 0; r < s; ++r) {
            const double* __restrict xr = x.row(r).data();
            for (Index j = j0; j < j1; ++j) acc[j] += xr[j];
        }
    }
    return out;
}

Vector column_means(const Matrix& x) {
    if (x.rows() == 0) throw DataError("column_means: no rows");
    Vector out = column_sums(x);
    out /= static_cast<double>(x.rows());
    return out;
}

void relu_inplace(Matrix& x) {
    const Index total = x.size();
    double* d = x.data();
#pragma omp parallel for schedule(static) if (total > kParallelWork)
    for (Index i = 0; i < total; ++i) d[i] = d[i] > 0.0 ? d[i] : 0.0;
}

Matrix softmax_rows(const Matrix& logits) {
    const Index s = logits.rows(), m = logits.cols();
    Matrix out(s, m);
#pragma omp parallel for schedule(static) if (s * m > kParallelWork)
    for (Index i = 0; i < s; ++i) {
        double mx = logits(i, 0);
        for (Index c = 1; c < m; ++c) mx = std::max(mx, logits(i, c));
        double z = 0.0;
        for (Index c = 0; c < m; ++c) {
            out(i, c) = std::exp(logits(i, c) - mx);
            z += out(i, c);
        }
        for (Index c = 0; c < m; ++c) out(i, c) /= z;
    }
    return out;
}

}  // namespace ccaprobe::kernels

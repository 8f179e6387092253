#include "ccaprobe/error.hpp"
#include "ccaprobe/kernels.hpp"

#include <cmath>

namespace ccaprobe::kernels::serial {

Matrix affine(const Matrix& x, const Matrix& w, const Vector& bias) {
    if (w.cols() != x.cols()) throw DataError("affine: weight columns do not match input columns");
    if (bias.size() != 0 && bias.size() != w.rows()) throw DataError("affine: bias length mismatch");
    Matrix out(x.rows(), w.rows());
    for (Index i = 0; i < x.rows(); ++i)
        for (Index c = 0; c < w.rows(); ++c) {
            double acc = bias.size() != 0 ? bias[c] : 0.0;
            for (Index k = 0; k < x.cols(); ++k) acc += x(i, k) * w(c, k);
            out(i, c) = acc;
        }
    return out;
}

Matrix cross(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DataError("cross: row counts differ");
    Matrix out(a.cols(), b.cols());
    for (Index i = 0; i < a.cols(); ++i)
        for (Index j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (Index r = 0; r < a.rows(); ++r) acc += a(r, i) * b(r, j);
            out(i, j) = acc;
        }
    return out;
}

Vector column_sums(const Matrix& x) {
    Vector out(x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
        double acc = 0.0;
        for (Index r = 0; r < x.rows(); ++r) acc += x(r, j);
        out[j] = acc;
    }
    return out;
}

Vector column_means(const Matrix& x) {
    if (x.rows() == 0) throw DataError("column_means: no rows");
    Vector out = column_sums(x);
    for (Index j = 0; j < out.size(); ++j) out[j] /= static_cast<double>(x.rows());
    return out;
}

void relu_inplace(Matrix& x) {
    for (Index i = 0; i < x.rows(); ++i)
        for (Index j = 0; j < x.cols(); ++j)
            if (!(x(i, j) > 0.0)) x(i, j) = 0.0;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (Index i = 0; i < logits.rows(); ++i) {
        double mx = logits(i, 0);
        for (Index c = 1; c < logits.cols(); ++c)
            if (logits(i, c) > mx) mx = logits(i, c);
        double z = 0.0;
        for (Index c = 0; c < logits.cols(); ++c) z += std::exp(logits(i, c) - mx);
        for (Index c = 0; c < logits.cols(); ++c) out(i, c) = std::exp(logits(i, c) - mx) / z;
    }
    return out;
}

}  // namespace ccaprobe::kernels::serial

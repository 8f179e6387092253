#pragma once

// Data-parallel dense kernels used on the hot paths (covariances, logits,
// MLP layers, projections). The OpenMP versions assign every output element
// to exactly one thread and accumulate in a fixed order, so their results are
// bitwise identical to the serial reference for any thread count.

#include "ccaprobe/tensor.hpp"

namespace ccaprobe::kernels {

// x * w^T + bias (bias broadcast over rows; empty bias means none).
// x: s x n, w: m x n, bias: m or 0.
Matrix affine(const Matrix& x, const Matrix& w, const Vector& bias = Vector());

// a^T * b. a: s x p, b: s x q.
Matrix cross(const Matrix& a, const Matrix& b);

Vector column_means(const Matrix& x);
Vector column_sums(const Matrix& x);

// In place max(x, 0); returns nothing, mask is recoverable from the output.
void relu_inplace(Matrix& x);

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

namespace serial {

// Straight loops in the textbook order. Reference for the parallel kernels.
Matrix affine(const Matrix& x, const Matrix& w, const Vector& bias = Vector());
Matrix cross(const Matrix& a, const Matrix& b);
Vector column_means(const Matrix& x);
Vector column_sums(const Matrix& x);
void relu_inplace(Matrix& x);
Matrix softmax_rows(const Matrix& logits);

}  // namespace serial

}  // namespace ccaprobe::kernels

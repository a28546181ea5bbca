#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace minpred {

// Dense row-major matrix of 64-bit reals. All model state and batched
// activations live in this type; heavy products are delegated to Eigen maps
// over the same storage.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }

  std::size_t size() const { return rows * cols; }

  void resize(std::size_t r, std::size_t c) {
    rows = r;
    cols = c;
    data.assign(r * c, 0.0);
  }

  void fill(double value) { data.assign(data.size(), value); }
};

// out = a * b. Shapes are checked; `out` is resized.
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& out);
// out = a * b^T.
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);
// out = a^T * b.
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);

bool all_finite(std::span<const double> values);

}  // namespace minpred

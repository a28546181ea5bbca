#include "minpred/matrix.hpp"

#include <Eigen/Core>
#include <cmath>

#include "minpred/errors.hpp"

namespace minpred {

namespace {

using EigenRowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EigenRowMajor>;
using MutableMap = Eigen::Map<EigenRowMajor>;

ConstMap map_of(const Matrix& m) {
  return ConstMap(m.data.data(), static_cast<Eigen::Index>(m.rows),
                  static_cast<Eigen::Index>(m.cols));
}

MutableMap map_of(Matrix& m) {
  return MutableMap(m.data.data(), static_cast<Eigen::Index>(m.rows),
                    static_cast<Eigen::Index>(m.cols));
}

void require(bool ok, const char* what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols == b.rows, "gemm_nn: inner dimensions differ");
  if (out.rows != a.rows || out.cols != b.cols) out.resize(a.rows, b.cols);
  map_of(out).noalias() = map_of(a) * map_of(b);
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.cols == b.cols, "gemm_nt: inner dimensions differ");
  if (out.rows != a.rows || out.cols != b.rows) out.resize(a.rows, b.rows);
  map_of(out).noalias() = map_of(a) * map_of(b).transpose();
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  require(a.rows == b.rows, "gemm_tn: inner dimensions differ");
  if (out.rows != a.cols || out.cols != b.cols) out.resize(a.cols, b.cols);
  map_of(out).noalias() = map_of(a).transpose() * map_of(b);
}

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace minpred

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "minpred/matrix.hpp"

namespace minpred {

// Point set handed to the nearest-neighbor estimators.
struct SampleCloud {
  std::size_t n = 0;
  std::size_t d = 0;
  Matrix points;  // n x d

  static SampleCloud from_matrix(Matrix m);
  // Column subset of an existing cloud.
  SampleCloud select(const std::vector<std::size_t>& columns) const;

  const double* point(std::size_t i) const {
    return points.data.data() + i * d;
  }
};

// Concatenate clouds column-wise (same n).
SampleCloud hstack(const std::vector<const SampleCloud*>& parts);

// True when two identical rows exist (lexicographic sort detection).
bool has_duplicate_rows(const SampleCloud& cloud);

// Deterministic tie-breaking jitter: when exact duplicate rows exist (or
// `force` is set), every coordinate receives a perturbation of 1e-10 x
// per-dimension scale derived by hashing the point's bytes, its rank among
// identical rows, and the given tag. The jittered multiset does not depend
// on row order.
void jitter_duplicates(SampleCloud& cloud, std::uint64_t tag,
                       bool force = false);

// Median-split tree over the points under the maximum (Chebyshev) norm.
// Queries are exact. The cloud must outlive the tree.
class KdTree {
 public:
  explicit KdTree(const SampleCloud& cloud, std::size_t leaf_size = 16);

  // Distance to the k-th nearest neighbor of q; exclude_index >= 0 removes
  // that point (querying a cloud member against its own cloud).
  double kth_distance(const double* q, std::size_t k,
                      long exclude_index = -1) const;

  // Number of points with Chebyshev distance strictly below radius.
  std::size_t count_within(const double* q, double radius) const;

 private:
  struct Node {
    double split_value = 0.0;
    std::uint32_t split_dim = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    bool leaf = false;
  };

  std::int32_t build(std::size_t begin, std::size_t end, std::size_t leaf_size);

  const SampleCloud* cloud_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::vector<double> bounds_min_, bounds_max_;  // per node, d values
};

// Digamma function, accurate to ~1e-12 for positive arguments.
double digamma(double x);

}  // namespace minpred

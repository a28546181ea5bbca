#include "minpred/knn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <queue>

#include "minpred/errors.hpp"
#include "minpred/rng.hpp"

namespace minpred {

SampleCloud SampleCloud::from_matrix(Matrix m) {
  SampleCloud cloud;
  cloud.n = m.rows;
  cloud.d = m.cols;
  cloud.points = std::move(m);
  if (!all_finite(cloud.points.data)) {
    throw DataError("SampleCloud: non-finite entries");
  }
  return cloud;
}

SampleCloud SampleCloud::select(const std::vector<std::size_t>& columns) const {
  Matrix m(n, columns.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double* src = point(i);
    double* dst = m.data.data() + i * columns.size();
    for (std::size_t c = 0; c < columns.size(); ++c) dst[c] = src[columns[c]];
  }
  SampleCloud cloud;
  cloud.n = n;
  cloud.d = columns.size();
  cloud.points = std::move(m);
  return cloud;
}

SampleCloud hstack(const std::vector<const SampleCloud*>& parts) {
  if (parts.empty()) throw ShapeError("hstack: no clouds");
  const std::size_t n = parts.front()->n;
  std::size_t d = 0;
  for (const auto* part : parts) {
    if (part->n != n) throw ShapeError("hstack: sample counts differ");
    d += part->d;
  }
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    double* dst = m.data.data() + i * d;
    for (const auto* part : parts) {
      const double* src = part->point(i);
      dst = std::copy(src, src + part->d, dst);
    }
  }
  SampleCloud cloud;
  cloud.n = n;
  cloud.d = d;
  cloud.points = std::move(m);
  return cloud;
}

namespace {

bool row_less(const SampleCloud& cloud, std::size_t a, std::size_t b) {
  const double* pa = cloud.point(a);
  const double* pb = cloud.point(b);
  for (std::size_t c = 0; c < cloud.d; ++c) {
    if (pa[c] < pb[c]) return true;
    if (pa[c] > pb[c]) return false;
  }
  return false;
}

bool row_equal(const SampleCloud& cloud, std::size_t a, std::size_t b) {
  return std::memcmp(cloud.point(a), cloud.point(b),
                     cloud.d * sizeof(double)) == 0;
}

std::uint64_t hash_bytes(const void* data, std::size_t size,
                         std::uint64_t seed) {
  // FNV-1a folded with the seed.
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

bool has_duplicate_rows(const SampleCloud& cloud) {
  if (cloud.n < 2 || cloud.d == 0) return false;
  std::vector<std::size_t> idx(cloud.n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return row_less(cloud, a, b);
  });
  for (std::size_t i = 1; i < cloud.n; ++i) {
    if (row_equal(cloud, idx[i - 1], idx[i])) return true;
  }
  return false;
}

void jitter_duplicates(SampleCloud& cloud, std::uint64_t tag, bool force) {
  if (!force && !has_duplicate_rows(cloud)) return;

  std::vector<double> scale(cloud.d, 1.0);
  for (std::size_t c = 0; c < cloud.d; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < cloud.n; ++i) mean += cloud.point(i)[c];
    mean /= static_cast<double>(cloud.n);
    double var = 0.0;
    for (std::size_t i = 0; i < cloud.n; ++i) {
      const double dv = cloud.point(i)[c] - mean;
      var += dv * dv;
    }
    var /= static_cast<double>(cloud.n);
    scale[c] = var > 0.0 ? std::sqrt(var) : std::max(1.0, std::fabs(mean));
  }

  // Rank each row among its identical copies in sorted order so the jittered
  // multiset is independent of row order.
  std::vector<std::size_t> idx(cloud.n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return row_less(cloud, a, b);
  });
  std::vector<std::size_t> rank(cloud.n, 0);
  for (std::size_t i = 1; i < cloud.n; ++i) {
    if (row_equal(cloud, idx[i - 1], idx[i])) {
      rank[idx[i]] = rank[idx[i - 1]] + 1;
    }
  }

  constexpr double kJitterScale = 1e-10;
  for (std::size_t i = 0; i < cloud.n; ++i) {
    const std::uint64_t row_hash = hash_bytes(
        cloud.point(i), cloud.d * sizeof(double),
        Rng::derive(seed_tag::kJitter ^ tag, rank[i]));
    double* row = cloud.points.data.data() + i * cloud.d;
    for (std::size_t c = 0; c < cloud.d; ++c) {
      const std::uint64_t h = Rng::derive(row_hash, c);
      const double u =
          static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;  // [-1, 1)
      row[c] += u * kJitterScale * scale[c];
    }
  }
}

KdTree::KdTree(const SampleCloud& cloud, std::size_t leaf_size)
    : cloud_(&cloud) {
  if (cloud.n == 0 || cloud.d == 0) {
    throw ShapeError("KdTree: empty cloud");
  }
  order_.resize(cloud.n);
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * cloud.n / std::max<std::size_t>(1, leaf_size) + 8);
  build(0, cloud.n, std::max<std::size_t>(1, leaf_size));
}

std::int32_t KdTree::build(std::size_t begin, std::size_t end,
                           std::size_t leaf_size) {
  const std::size_t d = cloud_->d;
  const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  bounds_min_.resize(nodes_.size() * d);
  bounds_max_.resize(nodes_.size() * d);

  double* lo = bounds_min_.data() + static_cast<std::size_t>(id) * d;
  double* hi = bounds_max_.data() + static_cast<std::size_t>(id) * d;
  for (std::size_t c = 0; c < d; ++c) {
    lo[c] = std::numeric_limits<double>::infinity();
    hi[c] = -std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = begin; i < end; ++i) {
    const double* p = cloud_->point(order_[i]);
    for (std::size_t c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], p[c]);
      hi[c] = std::max(hi[c], p[c]);
    }
  }

  Node node;
  node.begin = static_cast<std::uint32_t>(begin);
  node.end = static_cast<std::uint32_t>(end);
  if (end - begin <= leaf_size) {
    node.leaf = true;
    nodes_[static_cast<std::size_t>(id)] = node;
    return id;
  }

  std::size_t split_dim = 0;
  double widest = -1.0;
  for (std::size_t c = 0; c < d; ++c) {
    const double width = hi[c] - lo[c];
    if (width > widest) {
      widest = width;
      split_dim = c;
    }
  }
  if (!(widest > 0.0)) {
    node.leaf = true;  // all points identical in every dimension
    nodes_[static_cast<std::size_t>(id)] = node;
    return id;
  }

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](std::size_t a, std::size_t b) {
                     return cloud_->point(a)[split_dim] <
                            cloud_->point(b)[split_dim];
                   });
  node.split_dim = static_cast<std::uint32_t>(split_dim);
  node.split_value = cloud_->point(order_[mid])[split_dim];
  nodes_[static_cast<std::size_t>(id)] = node;

  const std::int32_t left = build(begin, mid, leaf_size);
  const std::int32_t right = build(mid, end, leaf_size);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

namespace {

inline double chebyshev(const double* a, const double* b, std::size_t d,
                        double cutoff) {
  double best = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    const double diff = std::fabs(a[c] - b[c]);
    if (diff > best) {
      best = diff;
      if (best >= cutoff) return best;
    }
  }
  return best;
}

inline double box_distance(const double* q, const double* lo, const double* hi,
                           std::size_t d) {
  double best = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double diff = 0.0;
    if (q[c] < lo[c]) {
      diff = lo[c] - q[c];
    } else if (q[c] > hi[c]) {
      diff = q[c] - hi[c];
    }
    if (diff > best) best = diff;
  }
  return best;
}

}  // namespace

double KdTree::kth_distance(const double* q, std::size_t k,
                            long exclude_index) const {
  const std::size_t d = cloud_->d;
  const std::size_t available = cloud_->n - (exclude_index >= 0 ? 1 : 0);
  if (k == 0 || k > available) {
    throw ConfigError("KdTree::kth_distance: k out of range");
  }
  std::priority_queue<double> heap;  // max-heap of current best k distances

  // Depth-first with pruning; explicit stack of node ids.
  std::vector<std::int32_t> stack;
  stack.push_back(0);
  while (!stack.empty()) {
    const std::int32_t id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    const double worst =
        heap.size() == k ? heap.top() : std::numeric_limits<double>::infinity();
    const double* lo = bounds_min_.data() + static_cast<std::size_t>(id) * d;
    const double* hi = bounds_max_.data() + static_cast<std::size_t>(id) * d;
    if (box_distance(q, lo, hi, d) > worst) continue;

    if (node.leaf) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::size_t p = order_[i];
        if (exclude_index >= 0 &&
            p == static_cast<std::size_t>(exclude_index)) {
          continue;
        }
        const double cutoff = heap.size() == k
                                  ? heap.top()
                                  : std::numeric_limits<double>::infinity();
        const double dist = chebyshev(q, cloud_->point(p), d, cutoff);
        if (heap.size() < k) {
          heap.push(dist);
        } else if (dist < heap.top()) {
          heap.pop();
          heap.push(dist);
        }
      }
      continue;
    }
    // Visit the nearer child first.
    const std::size_t sd = node.split_dim;
    if (q[sd] <= node.split_value) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return heap.top();
}

std::size_t KdTree::count_within(const double* q, double radius) const {
  const std::size_t d = cloud_->d;
  std::size_t count = 0;
  std::vector<std::int32_t> stack;
  stack.push_back(0);
  while (!stack.empty()) {
    const std::int32_t id = stack.back();
    stack.pop_back();
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    const double* lo = bounds_min_.data() + static_cast<std::size_t>(id) * d;
    const double* hi = bounds_max_.data() + static_cast<std::size_t>(id) * d;
    const double near = box_distance(q, lo, hi, d);
    if (near >= radius) continue;

    // Box entirely inside the strict ball: farthest corner below radius.
    double far = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      far = std::max(far, std::max(std::fabs(q[c] - lo[c]),
                                   std::fabs(q[c] - hi[c])));
    }
    if (far < radius) {
      count += node.end - node.begin;
      continue;
    }
    if (node.leaf) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        if (chebyshev(q, cloud_->point(order_[i]), d, radius) < radius) {
          ++count;
        }
      }
      continue;
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
  return count;
}

double digamma(double x) {
  if (!(x > 0.0)) throw ConfigError("digamma: argument must be positive");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic series with Bernoulli terms through x^-10.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv -
            inv2 * (1.0 / 12.0 -
                    inv2 * (1.0 / 120.0 -
                            inv2 * (1.0 / 252.0 -
                                    inv2 * (1.0 / 240.0 - inv2 / 132.0))));
  return result;
}

}  // namespace minpred

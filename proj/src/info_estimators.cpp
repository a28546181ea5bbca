#include "minpred/info_estimators.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <vector>

#include "minpred/errors.hpp"

namespace minpred {

namespace {

void check_pair(const SampleCloud& x, const SampleCloud& y, std::size_t k,
                const char* name) {
  if (x.n != y.n) {
    throw ShapeError(std::string(name) + ": sample counts differ");
  }
  if (x.n <= k) {
    throw ConfigError(std::string(name) + ": need n > k");
  }
  if (x.n < kRecommendedMinSamples) {
    std::cerr << "[minpred] warning: " << name << " called with n=" << x.n
              << " samples; estimates below n=" << kRecommendedMinSamples
              << " are unreliable\n";
  }
}

// Accumulates sum over points of psi(count(i) + 1) through an integer
// histogram, so the result does not depend on sample order.
class PsiAccumulator {
 public:
  explicit PsiAccumulator(std::size_t n) : histogram_(n + 2, 0) {}

  void add(std::size_t count) { histogram_[count] += 1; }

  double sum() const {
    double total = 0.0;
    for (std::size_t c = 0; c < histogram_.size(); ++c) {
      if (histogram_[c] == 0) continue;
      total += static_cast<double>(histogram_[c]) *
               digamma(static_cast<double>(c + 1));
    }
    return total;
  }

 private:
  std::vector<std::size_t> histogram_;
};

std::vector<std::size_t> iota_columns(std::size_t begin, std::size_t count) {
  std::vector<std::size_t> cols(count);
  std::iota(cols.begin(), cols.end(), begin);
  return cols;
}

}  // namespace

double ksg_mutual_information(const SampleCloud& x, const SampleCloud& y,
                              std::size_t k) {
  check_pair(x, y, k, "ksg_mutual_information");
  if (x.d == 0 || y.d == 0) {
    throw ShapeError("ksg_mutual_information: zero-dimensional marginal");
  }
  const std::size_t n = x.n;

  SampleCloud joint = hstack({&x, &y});
  jitter_duplicates(joint, 0x6d69ULL);
  const SampleCloud xs = joint.select(iota_columns(0, x.d));
  const SampleCloud ys = joint.select(iota_columns(x.d, y.d));

  const KdTree joint_tree(joint);
  const KdTree x_tree(xs);
  const KdTree y_tree(ys);

  PsiAccumulator acc_x(n), acc_y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double radius =
        joint_tree.kth_distance(joint.point(i), k, static_cast<long>(i));
    // Counts exclude the point itself (distance 0 < radius).
    acc_x.add(x_tree.count_within(xs.point(i), radius) - 1);
    acc_y.add(y_tree.count_within(ys.point(i), radius) - 1);
  }
  const double nd = static_cast<double>(n);
  return digamma(static_cast<double>(k)) + digamma(nd) -
         (acc_x.sum() + acc_y.sum()) / nd;
}

double ksg_conditional_mi(const SampleCloud& x, const SampleCloud& y,
                          const SampleCloud& z, std::size_t k) {
  if (z.d == 0) {
    return ksg_mutual_information(x, y, k);
  }
  check_pair(x, y, k, "ksg_conditional_mi");
  if (z.n != x.n) {
    throw ShapeError("ksg_conditional_mi: sample counts differ");
  }
  const std::size_t n = x.n;

  SampleCloud joint = hstack({&x, &y, &z});
  jitter_duplicates(joint, 0x636d69ULL);
  const SampleCloud xz = joint.select([&] {
    auto cols = iota_columns(0, x.d);
    const auto zc = iota_columns(x.d + y.d, z.d);
    cols.insert(cols.end(), zc.begin(), zc.end());
    return cols;
  }());
  const SampleCloud yz = joint.select(iota_columns(x.d, y.d + z.d));
  const SampleCloud zs = joint.select(iota_columns(x.d + y.d, z.d));

  const KdTree joint_tree(joint);
  const KdTree xz_tree(xz);
  const KdTree yz_tree(yz);
  const KdTree z_tree(zs);

  PsiAccumulator acc_xz(n), acc_yz(n), acc_z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double radius =
        joint_tree.kth_distance(joint.point(i), k, static_cast<long>(i));
    acc_xz.add(xz_tree.count_within(xz.point(i), radius) - 1);
    acc_yz.add(yz_tree.count_within(yz.point(i), radius) - 1);
    acc_z.add(z_tree.count_within(zs.point(i), radius) - 1);
  }
  const double nd = static_cast<double>(n);
  return digamma(static_cast<double>(k)) -
         (acc_xz.sum() + acc_yz.sum() - acc_z.sum()) / nd;
}

double knn_kl_divergence(const SampleCloud& p, const SampleCloud& q,
                         std::size_t k) {
  if (p.d != q.d || p.d == 0) {
    throw ShapeError("knn_kl_divergence: dimension mismatch");
  }
  if (p.n <= k || q.n < k) {
    throw ConfigError("knn_kl_divergence: need n > k samples in each cloud");
  }
  if (p.n < kRecommendedMinSamples || q.n < kRecommendedMinSamples) {
    std::cerr << "[minpred] warning: knn_kl_divergence called with n=" << p.n
              << ", m=" << q.n << " samples; small-sample estimates are "
              << "unreliable\n";
  }

  SampleCloud ps = p;
  SampleCloud qs = q;
  // Jitter when zero neighbor distances are possible: duplicates within
  // either cloud or shared points across them.
  bool needs_jitter = has_duplicate_rows(ps) || has_duplicate_rows(qs);
  if (!needs_jitter) {
    SampleCloud merged = ps;
    merged.points.data.insert(merged.points.data.end(),
                              qs.points.data.begin(), qs.points.data.end());
    merged.n = ps.n + qs.n;
    merged.points.rows = merged.n;
    needs_jitter = has_duplicate_rows(merged);
  }
  if (needs_jitter) {
    jitter_duplicates(ps, 0x6b6c5f70ULL, /*force=*/true);
    jitter_duplicates(qs, 0x6b6c5f71ULL, /*force=*/true);
  }

  const KdTree p_tree(ps);
  const KdTree q_tree(qs);
  std::vector<double> log_ratios(ps.n);
  for (std::size_t i = 0; i < ps.n; ++i) {
    const double rho =
        p_tree.kth_distance(ps.point(i), k, static_cast<long>(i));
    const double nu = q_tree.kth_distance(ps.point(i), k, -1);
    if (!(rho > 0.0) || !(nu > 0.0)) {
      throw NumericalError(
          "knn_kl_divergence: zero neighbor distance survived jitter");
    }
    log_ratios[i] = std::log(nu / rho);
  }
  // Canonical accumulation order.
  std::sort(log_ratios.begin(), log_ratios.end());
  double sum = 0.0;
  for (double v : log_ratios) sum += v;

  const double n = static_cast<double>(ps.n);
  const double m = static_cast<double>(qs.n);
  return (static_cast<double>(ps.d) / n) * sum + std::log(m / (n - 1.0));
}

}  // namespace minpred

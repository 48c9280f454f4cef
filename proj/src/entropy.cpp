#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include "prelog/errors.hpp"
#include "prelog/mcsim.hpp"
#include "prelog/numeric.hpp"
#include "prelog/parallel.hpp"

namespace prelog {

namespace {

using cd = std::complex<double>;

constexpr int kJackknifeFolds = 10;
constexpr std::ptrdiff_t kLeafSize = 12;

// Static 2-d tree in implicit layout: the median of [lo, hi) sits at the
// midpoint, split on x at even depth and y at odd depth.
class PlanarTree {
 public:
  explicit PlanarTree(std::span<const cd> samples) : x_(samples.size()), y_(samples.size()) {
    std::vector<cd> pts(samples.begin(), samples.end());
    build(pts, 0, static_cast<std::ptrdiff_t>(pts.size()), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      x_[i] = pts[i].real();
      y_[i] = pts[i].imag();
    }
  }

  std::size_t size() const { return x_.size(); }

  /// Squared distance from stored point `self` to its k-th nearest other point.
  double kth_squared_distance(std::size_t self, int k) const {
    Query q{x_[self], y_[self], self, k, {}};
    q.best.fill(std::numeric_limits<double>::infinity());
    search(q, 0, static_cast<std::ptrdiff_t>(size()), 0);
    return q.best[k - 1];
  }

 private:
  struct Query {
    double x, y;
    std::size_t self;
    int k;
    std::array<double, 20> best;  // ascending squared distances
  };

  static void build(std::vector<cd>& pts, std::ptrdiff_t lo, std::ptrdiff_t hi, int depth) {
    if (hi - lo <= kLeafSize) return;
    const std::ptrdiff_t mid = lo + (hi - lo) / 2;
    const auto first = pts.begin();
    if (depth % 2 == 0)
      std::nth_element(first + lo, first + mid, first + hi, [](const cd& a, const cd& b) { return a.real() < b.real(); });
    else
      std::nth_element(first + lo, first + mid, first + hi, [](const cd& a, const cd& b) { return a.imag() < b.imag(); });
    build(pts, lo, mid, depth + 1);
    build(pts, mid + 1, hi, depth + 1);
  }

  void consider(Query& q, std::size_t i) const {
    if (i == q.self) return;
    const double dx = x_[i] - q.x, dy = y_[i] - q.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 >= q.best[q.k - 1]) return;
    int j = q.k - 1;
    while (j > 0 && q.best[j - 1] > d2) {
      q.best[j] = q.best[j - 1];
      --j;
    }
    q.best[j] = d2;
  }

  void search(Query& q, std::ptrdiff_t lo, std::ptrdiff_t hi, int depth) const {
    if (hi - lo <= kLeafSize) {
      for (std::ptrdiff_t i = lo; i < hi; ++i) consider(q, static_cast<std::size_t>(i));
      return;
    }
    const std::ptrdiff_t mid = lo + (hi - lo) / 2;
    consider(q, static_cast<std::size_t>(mid));
    const double diff = depth % 2 == 0 ? q.x - x_[mid] : q.y - y_[mid];
    if (diff < 0.0) {
      search(q, lo, mid, depth + 1);
      if (diff * diff < q.best[q.k - 1]) search(q, mid + 1, hi, depth + 1);
    } else {
      search(q, mid + 1, hi, depth + 1);
      if (diff * diff < q.best[q.k - 1]) search(q, lo, mid, depth + 1);
    }
  }

  std::vector<double> x_, y_;
};

void validate(std::span<const cd> samples, int k) {
  if (samples.size() < 100) throw DomainError("entropy estimation needs at least 100 samples");
  if (k < 1 || k > 20) throw DomainError("neighbour order must lie in [1, 20]");
  for (const cd& s : samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw DomainError("samples must be finite");
}

void reject_atoms(std::span<const cd> samples) {
  std::vector<cd> sorted(samples.begin(), samples.end());
  auto less = [](const cd& a, const cd& b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); };
  std::sort(sorted.begin(), sorted.end(), less);
  std::size_t repeats = 0;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1]) ++repeats;
  if (repeats * 100 > sorted.size())
    throw DegenerateSampleError("degenerate sample: more than 1% repeated points");
}

double estimate(std::span<const cd> samples, int k) {
  const PlanarTree tree(samples);
  const std::size_t n = tree.size();
  std::vector<double> d2(n);
  double floor = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = tree.kth_squared_distance(i, k);
    if (d2[i] > 0.0) floor = std::min(floor, d2[i]);
  }
  // Sparse ties (at most 1%) would give log(0); use the smallest positive radius.
  double sum = 0.0;
  for (const double v : d2) sum += std::log(v > 0.0 ? v : floor);
  const double count = static_cast<double>(n);
  return digamma(count) - digamma(k) + std::log(std::numbers::pi) + sum / count;
}

}  // namespace

double kozachenko_leonenko(std::span<const cd> samples, int k) {
  validate(samples, k);
  reject_atoms(samples);
  return estimate(samples, k);
}

namespace {

// 10-fold delete-a-group jackknife of `statistic` evaluated on the samples
// that remain after dropping every index congruent to the fold.
double jackknife_se(std::size_t count, const std::function<double(const std::vector<std::size_t>&)>& statistic) {
  std::array<double, kJackknifeFolds> folds{};
  parallel_for(kJackknifeFolds, [&](std::size_t g) {
    std::vector<std::size_t> kept;
    kept.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
      if (i % kJackknifeFolds != g) kept.push_back(i);
    folds[g] = statistic(kept);
  });
  const double mean = std::accumulate(folds.begin(), folds.end(), 0.0) / kJackknifeFolds;
  double ss = 0.0;
  for (const double f : folds) ss += (f - mean) * (f - mean);
  return std::sqrt(ss * (kJackknifeFolds - 1) / kJackknifeFolds);
}

std::vector<cd> subset(std::span<const cd> samples, const std::vector<std::size_t>& kept) {
  std::vector<cd> out;
  out.reserve(kept.size());
  for (const std::size_t i : kept) out.push_back(samples[i]);
  return out;
}

}  // namespace

EntropyEstimate estimate_entropy(std::span<const cd> samples, int k) {
  const double full = kozachenko_leonenko(samples, k);
  const double se = jackknife_se(samples.size(), [&](const auto& kept) { return estimate(subset(samples, kept), k); });
  return {full, se, samples.size(), k};
}

EntropyEstimate estimate_entropy_difference(std::span<const cd> first, std::span<const cd> second, int k) {
  if (first.size() != second.size()) throw DomainError("paired samples must have equal length");
  const double full = kozachenko_leonenko(first, k) - kozachenko_leonenko(second, k);
  const double se = jackknife_se(first.size(), [&](const auto& kept) {
    return estimate(subset(first, kept), k) - estimate(subset(second, kept), k);
  });
  return {full, se, first.size(), k};
}

}  // namespace prelog

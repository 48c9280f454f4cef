#pragma once

#include <algorithm>
#include <array>
#include <queue>
#include <vector>
#include <cmath>
#include <type_traits>

namespace prelog {

template <typename Value>
struct QuadratureResult {
  Value value{};
  double error_estimate = 0.0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F, typename Value>
void gauss_kronrod_panel(F& f, double lo, double hi, Value& kronrod, Value& gauss) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const Value mid = f(center);
  kronrod = mid * kKronrodWeights[7];
  gauss = mid * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const Value pair = f(center - dx) + f(center + dx);
    kronrod += pair * kKronrodWeights[i];
    if (i % 2 == 1) gauss += pair * kGaussWeights[i / 2];
  }
  kronrod *= half;
  gauss *= half;
}

template <typename Value>
struct Panel {
  double lo, hi;
  Value kronrod;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [lo, hi]:
/// the panel with the largest error estimate is bisected until the summed
/// estimate drops below abs_tolerance or max_panels is reached. Works for
/// real- and complex-valued integrands.
template <typename F>
auto integrate(F&& f, double lo, double hi, double abs_tolerance = 1e-10, std::size_t max_panels = 20000)
    -> QuadratureResult<std::decay_t<decltype(f(lo))>> {
  using Value = std::decay_t<decltype(f(lo))>;
  using Panel = detail::Panel<Value>;
  QuadratureResult<Value> out;
  if (hi <= lo) return out;

  auto make_panel = [&](double a, double b) {
    Value kronrod, gauss;
    detail::gauss_kronrod_panel(f, a, b, kronrod, gauss);
    return Panel{a, b, kronrod, std::abs(kronrod - gauss)};
  };
  std::priority_queue<Panel> panels;
  panels.push(make_panel(lo, hi));
  double total_error = panels.top().error;
  while (total_error > abs_tolerance && panels.size() < max_panels) {
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) break;
    panels.pop();
    const Panel left = make_panel(worst.lo, mid), right = make_panel(mid, worst.hi);
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }
  // Sum left to right so the result does not depend on heap layout.
  std::vector<Panel> all;
  all.reserve(panels.size());
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
  for (const Panel& p : all) {
    out.value += p.kronrod;
    out.error_estimate += p.error;
  }
  return out;
}

}  // namespace prelog

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace granmilp {

/// Axis-aligned box {v : lo <= v <= hi}.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  Box() = default;
  Box(std::vector<double> l, std::vector<double> h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("box bounds differ in length");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] <= hi[i])) throw std::invalid_argument("box has lo > hi at coordinate " + std::to_string(i));
  }

  [[nodiscard]] std::size_t size() const { return lo.size(); }

  [[nodiscard]] bool contains(std::span<const double> v, double tol = 0.0) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (v[i] < lo[i] - tol || v[i] > hi[i] + tol) return false;
    return true;
  }

  [[nodiscard]] std::vector<double> center() const {
    std::vector<double> c(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
  }
};

inline double clamp_to(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

inline void project_box_inplace(std::span<double> v, const Box& box) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = clamp_to(v[i], box.lo[i], box.hi[i]);
}

/// Euclidean projection onto a box: componentwise clamp.
inline std::vector<double> project_box(std::span<const double> v, const Box& box) {
  if (v.size() != box.size()) throw std::invalid_argument("project_box: dimension mismatch");
  std::vector<double> out(v.begin(), v.end());
  project_box_inplace(out, box);
  return out;
}

/// Projection onto {x >= 0, sum(x) <= radius}. Sums within a relative 1e-14
/// of the cap are treated as feasible so the map is exactly idempotent.
inline void project_capped_simplex_inplace(std::span<double> v, double radius) {
  double sum = 0.0;
  for (double& x : v) {
    x = std::max(x, 0.0);
    sum += x;
  }
  if (radius <= 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  if (sum <= radius * (1.0 + 1e-14)) return;

  // Sort-threshold rule on the clamped vector; the clamped zeros never enter
  // the support because the threshold is positive here.
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double t = (cumulative - radius) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
    else break;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
}

inline std::vector<double> project_capped_simplex(std::span<const double> v, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("capped simplex radius must be positive and finite");
  std::vector<double> out(v.begin(), v.end());
  project_capped_simplex_inplace(out, radius);
  return out;
}

}  // namespace granmilp

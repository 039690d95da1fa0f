#include "subpop/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "subpop/error.hpp"

namespace subpop {

FusionWeights::FusionWeights(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0)) {
    throw WeightViolation("alpha and beta must lie in [0, 1] (got " + std::to_string(alpha) +
                          ", " + std::to_string(beta) + ")");
  }
  const double gamma = 1.0 - alpha - beta;
  if (gamma < -1e-12) {
    throw WeightViolation("alpha + beta must not exceed 1 (got " +
                          std::to_string(alpha + beta) + ")");
  }
  gamma_ = std::max(gamma, 0.0);
}

void fuse_into(std::span<double> out, std::span<const double> base,
               std::span<const double> pps_std, std::span<const double> spps_std,
               const FusionWeights& w) {
  const std::size_t n = base.size();
  if (pps_std.size() != n || spps_std.size() != n || out.size() != n) {
    throw DimensionMismatch("fusion inputs differ in length");
  }
  const double a = w.alpha();
  const double b = w.beta();
  const double g = w.gamma();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = g * base[i] + a * pps_std[i] + b * spps_std[i];
  }
}

std::vector<double> fuse(std::span<const double> base, std::span<const double> pps_std,
                         std::span<const double> spps_std, const FusionWeights& w) {
  std::vector<double> out(base.size());
  fuse_into(out, base, pps_std, spps_std, w);
  return out;
}

std::vector<std::uint32_t> rank_top_k(std::span<const double> scores, std::size_t k) {
  if (k > scores.size()) {
    throw ConfigError("cutoff " + std::to_string(k) + " exceeds catalogue of " +
                      std::to_string(scores.size()) + " items");
  }
  const auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  // Bounded heap: the root is the worst of the current top k.
  std::vector<std::uint32_t> heap;
  heap.reserve(k + 1);
  if (k == 0) return heap;
  for (std::uint32_t i = 0; i < scores.size(); ++i) {
    if (heap.size() < k) {
      heap.push_back(i);
      std::push_heap(heap.begin(), heap.end(), better);
    } else if (better(i, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), better);
      heap.back() = i;
      std::push_heap(heap.begin(), heap.end(), better);
    }
  }
  std::sort(heap.begin(), heap.end(), better);
  return heap;
}

}  // namespace subpop

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace subpop {

// Convex weights over (base logits, standardized PPS, standardized sPPS).
// gamma = 1 - alpha - beta; a sum overshooting 1 by rounding (<= 1e-12) is
// accepted and gamma is then 0.
class FusionWeights {
 public:
  // WeightViolation if alpha or beta is outside [0, 1] or alpha + beta > 1.
  FusionWeights(double alpha, double beta);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

 private:
  double alpha_;
  double beta_;
  double gamma_;
};

struct ScoreVector {
  std::vector<double> base;
  std::vector<double> pps_std;
  std::vector<double> spps_std;
  std::vector<double> fused;
};

// gamma * base + alpha * pps_std + beta * spps_std, element-wise.
std::vector<double> fuse(std::span<const double> base, std::span<const double> pps_std,
                         std::span<const double> spps_std, const FusionWeights& w);
void fuse_into(std::span<double> out, std::span<const double> base,
               std::span<const double> pps_std, std::span<const double> spps_std,
               const FusionWeights& w);

// Indices of the k highest scores, best first; equal scores rank the lower
// index first.
std::vector<std::uint32_t> rank_top_k(std::span<const double> scores, std::size_t k);

}  // namespace subpop

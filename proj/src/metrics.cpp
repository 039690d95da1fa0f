#include "subpop/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>

#include "subpop/error.hpp"

namespace subpop {

RelevanceProfile::RelevanceProfile(std::vector<std::vector<Grade>> grades)
    : grades_(std::move(grades)) {}

std::optional<int> RelevanceProfile::grade(std::uint32_t user, std::uint32_t item) const {
  const auto rel = grades(user);
  const auto it = std::lower_bound(rel.begin(), rel.end(), item,
                                   [](const Grade& g, std::uint32_t v) { return g.first < v; });
  if (it == rel.end() || it->first != item) return std::nullopt;
  return it->second;
}

bool RelevanceProfile::has_positive(std::uint32_t user) const {
  const auto rel = grades(user);
  return std::any_of(rel.begin(), rel.end(), [](const Grade& g) { return g.second > 0; });
}

RelevanceProfile build_relevance(const EventLog& test) {
  std::vector<std::vector<Grade>> grades(test.num_users());
  for (std::uint32_t u = 0; u < test.num_users(); ++u) {
    // Events arrive in (timestamp, order) order, so ">=" lets the later
    // label win a magnitude tie.
    std::vector<Grade> latest;
    for (const auto& e : test.user_events(u)) latest.emplace_back(e.item, relevance_grade(e.type));
    std::stable_sort(latest.begin(), latest.end(),
                     [](const Grade& a, const Grade& b) { return a.first < b.first; });
    auto& out = grades[u];
    for (const auto& [item, g] : latest) {
      if (!out.empty() && out.back().first == item) {
        if (std::abs(g) >= std::abs(out.back().second)) out.back().second = g;
      } else {
        out.emplace_back(item, g);
      }
    }
  }
  return RelevanceProfile(std::move(grades));
}

namespace {

int gain_of(std::span<const Grade> rel, std::uint32_t item) {
  const auto it = std::lower_bound(rel.begin(), rel.end(), item,
                                   [](const Grade& g, std::uint32_t v) { return g.first < v; });
  if (it == rel.end() || it->first != item) return 0;
  return std::max(it->second, 0);
}

}  // namespace

double dcg_at_k(std::span<const std::uint32_t> recs, std::span<const Grade> rel,
                std::size_t k) {
  double dcg = 0.0;
  const std::size_t n = std::min(k, recs.size());
  for (std::size_t r = 0; r < n; ++r) {
    const int g = gain_of(rel, recs[r]);
    if (g > 0) dcg += g / std::log2(static_cast<double>(r) + 2.0);
  }
  return dcg;
}

double ideal_dcg_at_k(std::span<const Grade> rel, std::size_t k) {
  std::vector<int> gains;
  for (const auto& [item, g] : rel) {
    if (g > 0) gains.push_back(g);
  }
  std::sort(gains.begin(), gains.end(), std::greater<>());
  double idcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, gains.size()); ++r) {
    idcg += gains[r] / std::log2(static_cast<double>(r) + 2.0);
  }
  return idcg;
}

std::optional<double> ndcg_at_k(std::span<const std::uint32_t> recs,
                                std::span<const Grade> rel, std::size_t k) {
  if (k > recs.size()) {
    throw ConfigError("cutoff " + std::to_string(k) + " exceeds list of " +
                      std::to_string(recs.size()));
  }
  std::vector<std::uint32_t> sorted(recs.begin(), recs.end());
  std::sort(sorted.begin(), sorted.end());
  const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) throw DuplicateInRecs(*dup);
  const double idcg = ideal_dcg_at_k(rel, k);
  if (idcg <= 0.0) return std::nullopt;
  return dcg_at_k(recs, rel, k) / idcg;
}

double novelty_at_k(std::span<const std::uint32_t> recs, const UserPopularityProfile& profile,
                    std::size_t k, double epsilon) {
  if (profile.history_length() == 0) throw EmptyHistory();
  if (k == 0 || k > recs.size()) {
    throw ConfigError("cutoff " + std::to_string(k) + " invalid for list of " +
                      std::to_string(recs.size()));
  }
  const double total = static_cast<double>(profile.history_length());
  double sum = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    const double p = std::max(static_cast<double>(profile.item_count(recs[r])) / total, epsilon);
    sum += -std::log2(p);
  }
  return sum / static_cast<double>(k);
}

}  // namespace subpop

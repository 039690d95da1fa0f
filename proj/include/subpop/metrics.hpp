#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "subpop/dataset.hpp"
#include "subpop/popularity.hpp"

namespace subpop {

inline constexpr double kNoveltyEpsilon = 1e-8;

using Grade = std::pair<std::uint32_t, int>;  // (item, grade)

// Test-window grades per user, one per (user, item): the label with the
// largest |grade|, the later event winning ties of equal magnitude.
class RelevanceProfile {
 public:
  RelevanceProfile() = default;
  explicit RelevanceProfile(std::vector<std::vector<Grade>> grades);

  std::size_t num_users() const { return grades_.size(); }
  // Sorted by item.
  std::span<const Grade> grades(std::uint32_t user) const { return grades_.at(user); }
  std::optional<int> grade(std::uint32_t user, std::uint32_t item) const;
  bool has_positive(std::uint32_t user) const;

 private:
  std::vector<std::vector<Grade>> grades_;
};

RelevanceProfile build_relevance(const EventLog& test);

// DCG of the first k items with gain max(grade, 0), log2(rank + 1) discount.
double dcg_at_k(std::span<const std::uint32_t> recs, std::span<const Grade> rel,
                std::size_t k);
// DCG of the user's positive grades sorted descending, truncated at k.
double ideal_dcg_at_k(std::span<const Grade> rel, std::size_t k);

// nullopt when the user has no positive grade (IDCG = 0); such users are
// excluded from averages. Throws DuplicateInRecs.
std::optional<double> ndcg_at_k(std::span<const std::uint32_t> recs,
                                std::span<const Grade> rel, std::size_t k);

// (1/k) * sum over the top k of -log2(max(c_i / sum_j c_j, epsilon)).
// Throws EmptyHistory when the profile has no train events.
double novelty_at_k(std::span<const std::uint32_t> recs, const UserPopularityProfile& profile,
                    std::size_t k, double epsilon = kNoveltyEpsilon);

}  // namespace subpop

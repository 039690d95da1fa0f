#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "subpop/codebook.hpp"
#include "subpop/dataset.hpp"

namespace subpop {

// Repetition counts of one user's train history, at item and sub-ID level.
class UserPopularityProfile {
 public:
  UserPopularityProfile() = default;

  std::uint32_t user() const { return user_; }
  std::size_t history_length() const { return history_length_; }
  int splits() const { return splits_; }
  int codebook_size() const { return codebook_size_; }

  // c_i; zero for items the user never touched.
  std::uint32_t item_count(std::uint32_t item) const;
  // (item, count) pairs sorted by item.
  std::span<const std::pair<std::uint32_t, std::uint32_t>> item_counts() const {
    return item_counts_;
  }
  // c_j[k]: occurrences of code k at split j across the history.
  std::uint32_t subid_count(int split, Code code) const {
    return subid_counts_[static_cast<std::size_t>(split) * static_cast<std::size_t>(codebook_size_) + code];
  }

 private:
  friend UserPopularityProfile build_profile(std::uint32_t, std::span<const std::uint32_t>,
                                             const Codebook&);
  std::uint32_t user_ = 0;
  std::size_t history_length_ = 0;
  int splits_ = 0;
  int codebook_size_ = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> item_counts_;
  std::vector<std::uint32_t> subid_counts_;  // splits x V
};

// Throws IndexOutOfRange if a history item is outside the codebook.
UserPopularityProfile build_profile(std::uint32_t user, std::span<const std::uint32_t> history,
                                    const Codebook& cb);

// log(c_i + epsilon)
double pps_raw(const UserPopularityProfile& profile, std::uint32_t item, double epsilon);
// sum_j log(c_j[z_j(item)] + epsilon)
double spps_raw(const UserPopularityProfile& profile, std::uint32_t item, const Codebook& cb,
                double epsilon);

// Raw scores for the whole catalogue.
std::vector<double> pps_vector(const UserPopularityProfile& profile, std::size_t num_items,
                               double epsilon);
std::vector<double> spps_vector(const UserPopularityProfile& profile, const Codebook& cb,
                                double epsilon);

struct StandardizedScores {
  std::vector<double> values;
  double mu = 0.0;
  double sigma = 0.0;
};

// Z-score with the population standard deviation. A constant input yields
// sigma = 0 and all-zero values.
StandardizedScores standardize(std::span<const double> raw);

// Debug dump: `I user item count` rows then `S user split code count` rows.
void write_profile(std::ostream& out, const UserPopularityProfile& profile,
                   const IdIndex& users, const IdIndex& items);

}  // namespace subpop

#include "subpop/popularity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "subpop/error.hpp"

namespace subpop {

std::uint32_t UserPopularityProfile::item_count(std::uint32_t item) const {
  const auto it = std::lower_bound(
      item_counts_.begin(), item_counts_.end(), item,
      [](const std::pair<std::uint32_t, std::uint32_t>& p, std::uint32_t v) { return p.first < v; });
  return it != item_counts_.end() && it->first == item ? it->second : 0;
}

UserPopularityProfile build_profile(std::uint32_t user, std::span<const std::uint32_t> history,
                                    const Codebook& cb) {
  UserPopularityProfile p;
  p.user_ = user;
  p.history_length_ = history.size();
  p.splits_ = cb.splits();
  p.codebook_size_ = cb.codebook_size();
  p.subid_counts_.assign(static_cast<std::size_t>(p.splits_) * static_cast<std::size_t>(p.codebook_size_), 0);

  std::vector<std::uint32_t> sorted(history.begin(), history.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const auto code = cb.code_of(sorted[i]);
    const auto count = static_cast<std::uint32_t>(j - i);
    p.item_counts_.emplace_back(sorted[i], count);
    for (int s = 0; s < p.splits_; ++s) {
      p.subid_counts_[static_cast<std::size_t>(s) * static_cast<std::size_t>(p.codebook_size_) + code[static_cast<std::size_t>(s)]] += count;
    }
    i = j;
  }

  // Each history entry contributes one item count and one code per split.
  std::size_t item_total = 0;
  for (const auto& [item, count] : p.item_counts_) item_total += count;
  for (int s = 0; s < p.splits_; ++s) {
    const auto row = std::span<const std::uint32_t>(p.subid_counts_)
                         .subspan(static_cast<std::size_t>(s) * static_cast<std::size_t>(p.codebook_size_),
                                  static_cast<std::size_t>(p.codebook_size_));
    if (std::accumulate(row.begin(), row.end(), std::size_t{0}) != history.size()) {
      throw std::logic_error("sub-ID counts do not sum to the history length");
    }
  }
  if (item_total != history.size()) {
    throw std::logic_error("item counts do not sum to the history length");
  }
  return p;
}

double pps_raw(const UserPopularityProfile& profile, std::uint32_t item, double epsilon) {
  return std::log(static_cast<double>(profile.item_count(item)) + epsilon);
}

double spps_raw(const UserPopularityProfile& profile, std::uint32_t item, const Codebook& cb,
                double epsilon) {
  const auto code = cb.code_of(item);
  double total = 0.0;
  for (int s = 0; s < cb.splits(); ++s) {
    total += std::log(static_cast<double>(profile.subid_count(s, code[static_cast<std::size_t>(s)])) + epsilon);
  }
  return total;
}

std::vector<double> pps_vector(const UserPopularityProfile& profile, std::size_t num_items,
                               double epsilon) {
  std::vector<double> out(num_items, std::log(epsilon));
  for (const auto& [item, count] : profile.item_counts()) {
    if (item >= num_items) throw IndexOutOfRange("profile item outside catalogue");
    out[item] = std::log(static_cast<double>(count) + epsilon);
  }
  return out;
}

std::vector<double> spps_vector(const UserPopularityProfile& profile, const Codebook& cb,
                                double epsilon) {
  if (profile.splits() != cb.splits() || profile.codebook_size() != cb.codebook_size()) {
    throw DimensionMismatch("profile was built against a different codebook");
  }
  const auto splits = static_cast<std::size_t>(cb.splits());
  const auto size = static_cast<std::size_t>(cb.codebook_size());
  // Per-split log lookup, so each item costs m additions.
  std::vector<double> logs(splits * size);
  for (std::size_t s = 0; s < splits; ++s) {
    for (std::size_t k = 0; k < size; ++k) {
      logs[s * size + k] =
          std::log(static_cast<double>(profile.subid_count(static_cast<int>(s), static_cast<Code>(k))) + epsilon);
    }
  }
  std::vector<double> out(cb.num_items());
  const auto codes = cb.codes();
  for (std::size_t i = 0; i < cb.num_items(); ++i) {
    double total = 0.0;
    for (std::size_t s = 0; s < splits; ++s) total += logs[s * size + codes[i * splits + s]];
    out[i] = total;
  }
  return out;
}

StandardizedScores standardize(std::span<const double> raw) {
  StandardizedScores out;
  out.values.assign(raw.size(), 0.0);
  if (raw.empty()) return out;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double n = static_cast<double>(raw.size());
  out.mu = std::accumulate(raw.begin(), raw.end(), 0.0) / n;
  if (*lo == *hi) {
    out.mu = *lo;
    return out;
  }
  double ss = 0.0;
  for (const double x : raw) ss += (x - out.mu) * (x - out.mu);
  out.sigma = std::sqrt(ss / n);
  for (std::size_t i = 0; i < raw.size(); ++i) out.values[i] = (raw[i] - out.mu) / out.sigma;
  return out;
}

void write_profile(std::ostream& out, const UserPopularityProfile& profile,
                   const IdIndex& users, const IdIndex& items) {
  const auto& user = users.id(profile.user());
  for (const auto& [item, count] : profile.item_counts()) {
    out << "I\t" << user << '\t' << items.id(item) << '\t' << count << '\n';
  }
  for (int s = 0; s < profile.splits(); ++s) {
    for (int k = 0; k < profile.codebook_size(); ++k) {
      const auto c = profile.subid_count(s, static_cast<Code>(k));
      if (c > 0) out << "S\t" << user << '\t' << s << '\t' << k << '\t' << c << '\n';
    }
  }
}

}  // namespace subpop

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "subpop/codebook.hpp"
#include "subpop/dataset.hpp"

namespace subpop {

// Floor applied to every log-probability a scorer emits.
inline constexpr double kLogFloor = -50.0;

struct UserContext {
  std::uint32_t user = 0;
  // Train items in time order.
  std::span<const std::uint32_t> history;
};

struct BaseScores {
  std::vector<double> logits;
  // The scorer had no signal for this user and fell back to global popularity.
  bool cold_start = false;
};

// Produces one finite logit per catalogue item. Implementations are immutable
// after construction and score() is safe to call concurrently.
class BaseScorer {
 public:
  virtual ~BaseScorer() = default;
  virtual BaseScores score(const UserContext& context) const = 0;
  virtual std::size_t num_items() const = 0;
  virtual std::string name() const = 0;
};

// log(1 + train count), identical for every user.
class GlobalPopularityScorer final : public BaseScorer {
 public:
  explicit GlobalPopularityScorer(const EventLog& train);
  BaseScores score(const UserContext& context) const override;
  std::size_t num_items() const override { return logits_.size(); }
  std::string name() const override { return "globalpop"; }
  const std::vector<double>& logits() const { return logits_; }

 private:
  std::vector<double> logits_;
};

// First-order transitions pooled over all users' train sequences. A user's
// logits are the smoothed log transition probabilities out of their last
// train item:
//   log((n(last -> j) + s) / (n(last -> *) + s * |I|)), floored at kLogFloor.
// Users whose last item never starts a transition get global popularity and
// cold_start = true.
class MarkovScorer final : public BaseScorer {
 public:
  MarkovScorer(const EventLog& train, double smoothing);
  BaseScores score(const UserContext& context) const override;
  std::size_t num_items() const override { return fallback_.num_items(); }
  std::string name() const override { return "markov"; }

 private:
  double smoothing_;
  GlobalPopularityScorer fallback_;
  std::vector<std::size_t> offsets_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> targets_;  // (item, count)
  std::vector<std::uint64_t> totals_;
};

// Dot product between every item's reconstructed embedding and the mean
// embedding of the user's last `window` train items.
class SvdDotScorer final : public BaseScorer {
 public:
  SvdDotScorer(std::shared_ptr<const Codebook> cb, SubEmbeddingTable table,
               std::size_t window = 50);
  BaseScores score(const UserContext& context) const override;
  std::size_t num_items() const override { return cb_->num_items(); }
  std::string name() const override { return "svddot"; }

 private:
  std::shared_ptr<const Codebook> cb_;
  SubEmbeddingTable table_;
  std::size_t window_;
};

// Dense per-user logit rows read from a file, keyed by dense user index.
class ExternalLogits {
 public:
  ExternalLogits(std::size_t num_items,
                 std::unordered_map<std::uint32_t, std::vector<double>> rows)
      : num_items_(num_items), rows_(std::move(rows)) {}
  std::size_t num_items() const { return num_items_; }
  bool contains(std::uint32_t user) const { return rows_.count(user) != 0; }
  const std::vector<double>& row(std::uint32_t user) const;
  std::size_t num_users() const { return rows_.size(); }

 private:
  std::size_t num_items_;
  std::unordered_map<std::uint32_t, std::vector<double>> rows_;
};

// Accepts either layout, one per line:
//   dense:  user<TAB>s_1,s_2,...,s_|I|   (scores in dense item-index order)
//   sparse: user<TAB>item<TAB>score      (needs a `#default<TAB>value` line)
// Rows for users outside `users` are ignored. Every user in `required` must be
// present (MissingUser otherwise); NaN/inf scores raise NonFiniteScore.
ExternalLogits load_external_logits(const std::filesystem::path& path, const IdIndex& users,
                                    const IdIndex& items,
                                    std::span<const std::uint32_t> required);

class ExternalScorer final : public BaseScorer {
 public:
  explicit ExternalScorer(ExternalLogits logits) : logits_(std::move(logits)) {}
  BaseScores score(const UserContext& context) const override;
  std::size_t num_items() const override { return logits_.num_items(); }
  std::string name() const override { return "external"; }

 private:
  ExternalLogits logits_;
};

}  // namespace subpop

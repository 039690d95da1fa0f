#include "subpop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "subpop/error.hpp"
#include "subpop/rng.hpp"

namespace subpop {

void validate(const SynthConfig& cfg) {
  if (cfg.users == 0 || cfg.items == 0 || cfg.genres == 0 || cfg.events_per_user == 0 ||
      cfg.pool_size == 0) {
    throw ConfigError("synth counts must be positive");
  }
  if (cfg.genres > cfg.items) throw ConfigError("more genres than items");
  if (cfg.pool_size > cfg.items / cfg.genres) {
    throw ConfigError("pool_size " + std::to_string(cfg.pool_size) +
                      " exceeds genre block of " + std::to_string(cfg.items / cfg.genres));
  }
  auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!probability(cfg.repeat_prob) || !probability(cfg.genre_affinity) ||
      !probability(cfg.like_fraction)) {
    throw ConfigError("synth probabilities must lie in [0, 1]");
  }
  if (!(cfg.zipf_exponent >= 0.0) || !std::isfinite(cfg.zipf_exponent)) {
    throw ConfigError("zipf exponent must be finite and non-negative");
  }
}

std::size_t synth_genre(const SynthConfig& cfg, std::size_t item_number) {
  // Block g covers [ceil(g * items / genres), ceil((g + 1) * items / genres)).
  return item_number * cfg.genres / cfg.items;
}

namespace {

std::size_t genre_begin(const SynthConfig& cfg, std::size_t g) {
  return (g * cfg.items + cfg.genres - 1) / cfg.genres;
}

}  // namespace

EventLog generate(const SynthConfig& cfg) {
  validate(cfg);
  std::vector<double> cumulative(cfg.pool_size);
  double total = 0.0;
  for (std::size_t r = 0; r < cfg.pool_size; ++r) {
    total += 1.0 / std::pow(static_cast<double>(r + 1), cfg.zipf_exponent);
    cumulative[r] = total;
  }
  for (auto& c : cumulative) c /= total;

  // Start offsets span about a third of a user's own timeline, so most
  // users are still active when a global temporal cut falls.
  const auto span = static_cast<std::uint64_t>(cfg.events_per_user) * 2;
  std::vector<Event> events;
  events.reserve(cfg.users * cfg.events_per_user);
  std::vector<std::size_t> pool;
  std::vector<std::size_t> block;
  std::vector<bool> seen(cfg.items);
  for (std::size_t u = 0; u < cfg.users; ++u) {
    SplitMix64 rng(derive_seed(cfg.seed, u));
    const std::size_t home = rng.below(cfg.genres);
    const std::size_t begin = genre_begin(cfg, home);
    const std::size_t end = genre_begin(cfg, home + 1);
    block.resize(end - begin);
    for (std::size_t i = 0; i < block.size(); ++i) block[i] = begin + i;
    for (std::size_t i = 0; i < cfg.pool_size; ++i) {
      std::swap(block[i], block[i + rng.below(block.size() - i)]);
    }
    pool.assign(block.begin(), block.begin() + static_cast<std::ptrdiff_t>(cfg.pool_size));
    std::fill(seen.begin(), seen.end(), false);

    const std::string user_id = "u" + std::to_string(u);
    std::int64_t t = static_cast<std::int64_t>(rng.below(span));
    for (std::size_t n = 0; n < cfg.events_per_user; ++n) {
      t += 1 + static_cast<std::int64_t>(rng.below(10));
      std::size_t item = 0;
      if (rng.uniform() < cfg.repeat_prob) {
        const double x = rng.uniform();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), x);
        const auto rank = std::min<std::size_t>(
            static_cast<std::size_t>(it - cumulative.begin()), cfg.pool_size - 1);
        item = pool[rank];
      } else if (rng.uniform() < cfg.genre_affinity) {
        item = begin + rng.below(end - begin);
      } else {
        item = rng.below(cfg.items);
      }
      EventType type = EventType::kPlay;
      if (seen[item] && rng.uniform() < cfg.like_fraction) type = EventType::kLike;
      seen[item] = true;
      events.push_back({user_id, "i" + std::to_string(item), t, type});
    }
  }
  return EventLog::from_events(events);
}

}  // namespace subpop

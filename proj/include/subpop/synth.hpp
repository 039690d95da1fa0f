#pragma once

#include <cstddef>
#include <cstdint>

#include "subpop/dataset.hpp"

namespace subpop {

// Seeded generator of repetitive, genre-structured listening logs. Items are
// split into `genres` contiguous blocks; each user gets a home genre and a
// personal pool of `pool_size` items inside it. Per event:
//   with repeat_prob       -> pool item, Zipf(zipf_exponent) over pool rank
//   else with genre_affinity -> uniform item of the home genre
//   else                   -> uniform catalogue item
// Events are plays; a repeated item is relabelled a like with probability
// like_fraction. User u draws from SplitMix64(derive_seed(seed, u)), so the
// output does not depend on generation order.
struct SynthConfig {
  std::size_t users = 100;
  std::size_t items = 1000;
  std::size_t genres = 10;
  std::size_t events_per_user = 100;
  double repeat_prob = 0.7;
  std::size_t pool_size = 20;
  double genre_affinity = 0.9;
  double zipf_exponent = 1.0;
  double like_fraction = 0.1;
  std::uint64_t seed = 0;
};

// ConfigError on any out-of-range field (pool larger than a genre block,
// probabilities outside [0, 1], zero counts).
void validate(const SynthConfig& cfg);

EventLog generate(const SynthConfig& cfg);

// Genre block of the item with numeric id `item_number` ("i<number>").
std::size_t synth_genre(const SynthConfig& cfg, std::size_t item_number);

}  // namespace subpop

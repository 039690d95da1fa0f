#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "subpop/codebook.hpp"
#include "subpop/error.hpp"
#include "subpop/metrics.hpp"
#include "subpop/rng.hpp"

using namespace subpop;
using fixture::ev;

namespace {

Codebook identity_codebook(std::size_t items) {
  std::vector<Code> codes(items);
  std::iota(codes.begin(), codes.end(), 0u);
  return Codebook(1, static_cast<int>(items), 1, items, std::move(codes));
}

std::vector<Grade> random_grades(SplitMix64& rng, std::size_t n, std::uint32_t universe) {
  const int vocab[] = {2, 1, -1, -2};
  std::vector<std::uint32_t> items(universe);
  std::iota(items.begin(), items.end(), 0u);
  for (std::size_t i = 0; i < n; ++i) std::swap(items[i], items[i + rng.below(universe - i)]);
  std::vector<Grade> rel;
  for (std::size_t i = 0; i < n; ++i) rel.emplace_back(items[i], vocab[rng.below(4)]);
  std::sort(rel.begin(), rel.end());
  return rel;
}

}  // namespace

TEST_CASE("relevance dedup") {
  SUBCASE("later like replaces a play") {
    const auto log = fixture::log_of({ev("u", "i", 1), ev("u", "i", 2, EventType::kLike)});
    CHECK(build_relevance(log).grade(0, 0) == 2);
  }
  SUBCASE("equal magnitude goes to the later event") {
    const auto log = fixture::log_of({ev("u", "i", 1), ev("u", "i", 2, EventType::kSkip)});
    CHECK(build_relevance(log).grade(0, 0) == -1);
    const auto reversed = fixture::log_of({ev("u", "i", 1, EventType::kSkip), ev("u", "i", 2)});
    CHECK(build_relevance(reversed).grade(0, 0) == 1);
  }
  SUBCASE("larger magnitude wins regardless of order") {
    const auto log = fixture::log_of({ev("u", "i", 1, EventType::kDislike), ev("u", "i", 2)});
    CHECK(build_relevance(log).grade(0, 0) == -2);
  }
  SUBCASE("negative only") {
    const auto log = fixture::log_of({ev("u", "i", 1, EventType::kDislike)});
    const auto rel = build_relevance(log);
    CHECK(rel.grade(0, 0) == -2);
    CHECK_FALSE(rel.has_positive(0));
    CHECK_FALSE(rel.grade(0, 5).has_value());
  }
}

TEST_CASE("relevance is a fixpoint of its own serialisation") {
  SplitMix64 rng(3);
  const EventType types[] = {EventType::kPlay, EventType::kLike, EventType::kSkip,
                             EventType::kDislike};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Event> events;
    for (int k = 0; k < 60; ++k) {
      events.push_back(ev("u" + std::to_string(rng.below(4)), "i" + std::to_string(rng.below(8)),
                          static_cast<std::int64_t>(rng.below(20)), types[rng.below(4)]));
    }
    const auto log = fixture::log_of(events);
    const auto rel = build_relevance(log);
    std::vector<Interaction> again;
    std::uint64_t order = 0;
    for (std::uint32_t u = 0; u < rel.num_users(); ++u) {
      for (const auto& [item, g] : rel.grades(u)) {
        const EventType t = g == 2 ? EventType::kLike
                            : g == 1 ? EventType::kPlay
                            : g == -1 ? EventType::kSkip
                                      : EventType::kDislike;
        again.push_back(Interaction{u, item, 0, order++, t});
      }
    }
    const auto rel2 = build_relevance(EventLog(log.user_index(), log.item_index(), again));
    for (std::uint32_t u = 0; u < rel.num_users(); ++u) {
      CHECK(std::equal(rel.grades(u).begin(), rel.grades(u).end(), rel2.grades(u).begin(),
                       rel2.grades(u).end()));
    }
  }
}

TEST_CASE("ndcg hand examples") {
  const std::vector<Grade> a2 = {{0, 2}};
  const std::vector<std::uint32_t> ax = {0, 9};
  CHECK(*ndcg_at_k(ax, a2, 2) == 1.0);

  const std::vector<Grade> ab = {{0, 2}, {1, 1}};
  const std::vector<std::uint32_t> ba = {1, 0};
  // (1/1 + 2/log2 3) / (2/1 + 1/log2 3) = 0.859719...
  const double expected = (1.0 + 2.0 / std::log2(3.0)) / (2.0 + 1.0 / std::log2(3.0));
  CHECK(std::abs(*ndcg_at_k(ba, ab, 2) - expected) < 1e-14);
  CHECK(std::abs(*ndcg_at_k(ba, ab, 2) - 0.859719) < 1e-6);

  const std::vector<Grade> negative = {{0, -2}};
  CHECK_FALSE(ndcg_at_k(ax, negative, 2).has_value());
}

TEST_CASE("ndcg errors") {
  const std::vector<Grade> rel = {{0, 1}};
  const std::vector<std::uint32_t> dup = {0, 0};
  CHECK_THROWS_AS(ndcg_at_k(dup, rel, 2), DuplicateInRecs);
  const std::vector<std::uint32_t> one = {0};
  CHECK_THROWS_AS(ndcg_at_k(one, rel, 2), ConfigError);
}

TEST_CASE("ideal DCG equals the exhaustive maximum") {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = 1 + rng.below(6);
    const auto k = 1 + rng.below(6);
    const auto rel = random_grades(rng, n, 10);
    std::vector<int> grades;
    for (const auto& [item, g] : rel) grades.push_back(g);
    CHECK(ideal_dcg_at_k(rel, k) == oracle::max_dcg_by_enumeration(grades, k));
  }
}

TEST_CASE("ndcg stays in [0, 1] and hits 1 only at an ideal ordering") {
  SplitMix64 rng(45);
  for (int trial = 0; trial < 300; ++trial) {
    const auto rel = random_grades(rng, 1 + rng.below(6), 12);
    std::vector<std::uint32_t> recs(12);
    std::iota(recs.begin(), recs.end(), 0u);
    for (std::size_t i = 11; i > 0; --i) std::swap(recs[i], recs[rng.below(i + 1)]);
    const auto k = 1 + rng.below(6);
    const auto v = ndcg_at_k(recs, rel, k);
    if (!v) continue;
    CHECK(*v >= 0.0);
    CHECK(*v <= 1.0 + 1e-15);
    std::vector<int> got;
    for (std::size_t r = 0; r < k; ++r) {
      const auto it = std::find_if(rel.begin(), rel.end(),
                                   [&](const Grade& g) { return g.first == recs[r]; });
      got.push_back(it == rel.end() ? 0 : std::max(it->second, 0));
    }
    std::vector<int> ideal;
    for (const auto& [item, g] : rel) ideal.push_back(std::max(g, 0));
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    ideal.resize(k, 0);
    CHECK((*v == 1.0) == (got == ideal));
  }
}

TEST_CASE("novelty analytic values") {
  const auto cb = identity_codebook(10);
  const std::vector<std::uint32_t> ab = {0, 1};
  const auto p = build_profile(0, ab, cb);
  const std::vector<std::uint32_t> unseen = {5, 6, 7};
  CHECK(novelty_at_k(unseen, p, 3) == doctest::Approx(26.5754).epsilon(1e-3 / 26.5754));
  CHECK(novelty_at_k(unseen, p, 3) == -std::log2(1e-8));
  const std::vector<std::uint32_t> a_unseen = {0, 9};
  CHECK(novelty_at_k(a_unseen, p, 2) == doctest::Approx(13.7877).epsilon(1e-4 / 13.7877));

  const std::vector<std::uint32_t> same(4, 3);
  const auto familiar = build_profile(0, same, cb);
  const std::vector<std::uint32_t> three = {3};
  CHECK(novelty_at_k(three, familiar, 1) == 0.0);

  CHECK_THROWS_AS(novelty_at_k(three, build_profile(0, {}, cb), 1), EmptyHistory);
  CHECK_THROWS_AS(novelty_at_k(three, p, 2), ConfigError);
}

TEST_CASE("novelty bounds and monotonicity") {
  SplitMix64 rng(46);
  const std::size_t items = 40;
  const auto cb = identity_codebook(items);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint32_t> h(1 + rng.below(100));
    for (auto& i : h) i = static_cast<std::uint32_t>(rng.below(1 + rng.below(items)));
    const auto p = build_profile(0, h, cb);
    std::vector<std::uint32_t> recs(items);
    std::iota(recs.begin(), recs.end(), 0u);
    for (std::size_t i = items - 1; i > 0; --i) std::swap(recs[i], recs[rng.below(i + 1)]);
    const auto k = 1 + rng.below(10);
    const double eps = std::pow(10.0, -static_cast<double>(1 + rng.below(10)));
    const double n = novelty_at_k(recs, p, k, eps);
    CHECK(n >= 0.0);
    // Averaging k equal terms can round up by an ulp.
    CHECK(n <= -std::log2(eps) * (1 + 1e-12));

    // Swap one top-k item for a strictly less consumed item from outside.
    const auto slot = rng.below(k);
    for (std::size_t j = k; j < items; ++j) {
      if (p.item_count(recs[j]) < p.item_count(recs[slot])) {
        auto swapped = recs;
        std::swap(swapped[slot], swapped[j]);
        CHECK(novelty_at_k(swapped, p, k, eps) >= n);
        break;
      }
    }
  }
}

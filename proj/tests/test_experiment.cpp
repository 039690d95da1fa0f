#include <algorithm>
#include <filesystem>
#include <numeric>
#include <regex>

#include "bench.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "subpop/error.hpp"
#include "subpop/experiment.hpp"
#include "subpop/popularity.hpp"

using namespace subpop;

namespace {

const SynthConfig kSmall{.users = 80, .items = 300, .genres = 5, .events_per_user = 60,
                         .pool_size = 10, .seed = 21};
const CodebookConfig kCodes{.splits = 4, .codebook_size = 16, .embedding_dim = 32};

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

ReportRow row(double ndcg, double novelty, SweepMode mode = SweepMode::kPpsOnly) {
  ReportRow r;
  r.mode = mode;
  r.ndcg = ndcg;
  r.novelty = novelty;
  return r;
}

}  // namespace

TEST_CASE("sweep specs") {
  const auto pps = SweepSpec::defaults(SweepMode::kPpsOnly);
  CHECK(pps.points().size() == 10);
  CHECK(pps.points().back().alpha() == doctest::Approx(0.9));
  CHECK(pps.points().back().beta() == 0.0);
  const auto spps = SweepSpec::defaults(SweepMode::kSppsOnly);
  CHECK(spps.points()[3].beta() == doctest::Approx(0.3));
  const auto combined = SweepSpec::defaults(SweepMode::kCombined);
  CHECK(combined.points().size() == 11);
  CHECK(combined.points().back().alpha() + combined.points().back().beta() ==
        doctest::Approx(1.0));

  SweepSpec bad{.mode = SweepMode::kCombined, .alpha_grid = {0.6}, .fixed_beta = 0.6};
  CHECK_THROWS_AS(bad.points(), WeightViolation);
  SweepSpec empty{.mode = SweepMode::kPpsOnly};
  CHECK_THROWS_AS(empty.points(), ConfigError);
  CHECK(parse_sweep_mode("spps-only") == SweepMode::kSppsOnly);
  CHECK_THROWS_AS(parse_sweep_mode("both"), ConfigError);
}

TEST_CASE("eval users exclude missing history and missing positives") {
  using fixture::ev;
  const auto log = fixture::log_of({
      ev("a", "x", 1), ev("a", "y", 9),                          // evaluated
      ev("b", "x", 9),                                            // no train history
      ev("c", "y", 2), ev("c", "x", 9, EventType::kDislike),      // no positive grade
      ev("d", "z", 3),                                            // no test events
  });
  const auto split = split_at(log, 9, 0.5);
  const auto rel = build_relevance(split.test);
  const auto eval = select_eval_users(split, rel);
  REQUIRE(eval.users.size() == 1);
  CHECK(log.users().id(eval.users[0]) == "a");
  CHECK(eval.no_history == 1);
  CHECK(eval.no_positive == 1);
  CHECK(eval.excluded() == 2);
}

TEST_CASE("eval user sampling is seeded") {
  const auto bench = fixture::make_bench(kSmall, kCodes);
  const auto rel = build_relevance(bench.split.test);
  const auto all = select_eval_users(bench.split, rel);
  const auto a = select_eval_users(bench.split, rel, 10, 5);
  const auto b = select_eval_users(bench.split, rel, 10, 5);
  CHECK(a.users.size() == 10);
  CHECK(a.users == b.users);
  CHECK(std::is_sorted(a.users.begin(), a.users.end()));
  CHECK(std::includes(all.users.begin(), all.users.end(), a.users.begin(), a.users.end()));
}

TEST_CASE("zero weights reproduce the base scorer") {
  for (const auto base : {fixture::Base::kMarkov, fixture::Base::kGlobalPop,
                          fixture::Base::kSvdDot}) {
    const auto bench = fixture::make_bench(kSmall, kCodes, base);
    const EvalConfig cfg{.k = 20};
    const SweepSpec spec{.mode = SweepMode::kPpsOnly, .alpha_grid = {0.0}};
    const auto report = run_sweep(bench.pipeline(), spec, cfg);
    const auto direct = evaluate_base_scorer(bench.pipeline(), cfg);
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].ndcg == direct.ndcg);
    CHECK(report.rows[0].novelty == direct.novelty);
    CHECK(report.rows[0].users_evaluated == direct.users_evaluated);
    CHECK(report.rows[0].users_excluded == direct.users_excluded);
    CHECK(report.per_user_ndcg[0] == direct.per_user_ndcg);
  }
}

TEST_CASE("alpha = 1 ranks by the user's own counts") {
  const auto bench = fixture::make_bench(kSmall, kCodes);
  const EvalConfig cfg{.k = 15};
  const auto recs = recommend(bench.pipeline(), FusionWeights(1.0, 0.0), cfg);
  REQUIRE_FALSE(recs.empty());
  for (const auto& r : recs) {
    const auto profile = build_profile(r.user, bench.split.train.user_items(r.user),
                                       *bench.codebook);
    std::vector<std::uint32_t> order(bench.codebook->num_items());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return profile.item_count(a) > profile.item_count(b);
    });
    order.resize(cfg.k);
    CHECK(r.items == order);
  }
}

TEST_CASE("a perfect memoriser gains accuracy and loses novelty from PPS") {
  const auto bench = fixture::make_bench(
      SynthConfig{.users = 100, .items = 400, .genres = 4, .events_per_user = 80,
                  .repeat_prob = 0.95, .pool_size = 8, .seed = 4},
      kCodes, fixture::Base::kGlobalPop);
  const SweepSpec spec{.mode = SweepMode::kPpsOnly, .alpha_grid = {0.0, 0.5}};
  const auto report = run_sweep(bench.pipeline(), spec, EvalConfig{.k = 10});
  CHECK(report.rows[1].ndcg > report.rows[0].ndcg);
  CHECK(report.rows[1].novelty < report.rows[0].novelty);
}

TEST_CASE("sweeps are identical across thread counts") {
  const auto bench = fixture::make_bench(kSmall, kCodes);
  std::vector<SweepSpec> specs = {SweepSpec::defaults(SweepMode::kPpsOnly),
                                  SweepSpec::defaults(SweepMode::kSppsOnly),
                                  SweepSpec::defaults(SweepMode::kCombined)};
  const auto one = run_sweep(bench.pipeline(), specs, EvalConfig{.k = 20, .threads = 1});
  const auto three = run_sweep(bench.pipeline(), specs, EvalConfig{.k = 20, .threads = 3});
  CHECK(render_report(one) == render_report(three));
  CHECK(render_svg(one) == render_svg(three));
  CHECK(one.per_user_novelty == three.per_user_novelty);
  CHECK(one.rows.size() == 31);
}

TEST_CASE("pipeline consistency checks") {
  const auto bench = fixture::make_bench(kSmall, kCodes);
  const SweepSpec spec = SweepSpec::defaults(SweepMode::kPpsOnly);
  CHECK_THROWS_AS(run_sweep(bench.pipeline(), spec, EvalConfig{.k = 0}), ConfigError);
  CHECK_THROWS_AS(run_sweep(bench.pipeline(), spec, EvalConfig{.k = 100000}), ConfigError);
  CHECK_THROWS_AS(run_sweep(bench.pipeline(), spec, EvalConfig{.pps_epsilon = 0}), ConfigError);
  Pipeline broken = bench.pipeline();
  broken.codebook = nullptr;
  CHECK_THROWS_AS(run_sweep(broken, spec, EvalConfig{}), ConfigError);
  const Codebook tiny(1, 1, 1, 3, {0, 0, 0});
  broken = bench.pipeline();
  broken.codebook = &tiny;
  CHECK_THROWS_AS(run_sweep(broken, spec, EvalConfig{}), DimensionMismatch);
}

TEST_CASE("threshold table") {
  const std::vector<ReportRow> rows = {row(0.4159, 8.0), row(0.3248, 10.5)};
  const std::vector<double> taus = {0.0, 10.0, 12.0};
  const auto t = threshold_table(rows, taus);
  CHECK(*t[0] == 0.4159);
  CHECK(*t[1] == 0.3248);
  CHECK_FALSE(t[2].has_value());
  CHECK_THROWS_AS(threshold_table({}, taus), ConfigError);
}

TEST_CASE("threshold view never increases with tau") {
  const auto bench = fixture::make_bench(kSmall, kCodes);
  std::vector<SweepSpec> specs = {SweepSpec::defaults(SweepMode::kPpsOnly),
                                  SweepSpec::defaults(SweepMode::kSppsOnly)};
  const auto report = run_sweep(bench.pipeline(), specs, EvalConfig{.k = 20});
  std::vector<double> taus;
  for (int i = 0; i <= 60; ++i) taus.push_back(i * 0.5);
  for (const auto mode : {SweepMode::kPpsOnly, SweepMode::kSppsOnly}) {
    const auto t = threshold_table(report.rows_for(mode), taus);
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t[i]) {
        REQUIRE(t[i - 1].has_value());
        CHECK(*t[i] <= *t[i - 1]);
      }
    }
  }
  const auto text = render_threshold_table(report, kDefaultThresholds);
  CHECK(text.rfind("method\tnovelty>=0\tnovelty>=10\tnovelty>=12\tnovelty>=14\n", 0) == 0);
  CHECK(text.find("\nPPS\t") != std::string::npos);
  CHECK(text.find("\nsPPS\t") != std::string::npos);
}

TEST_CASE("report TSV") {
  TradeoffReport report;
  report.k = 40;
  report.rows = {row(0.5, 7.25), row(0.25, 9.0, SweepMode::kSppsOnly)};
  report.rows[1].beta = 0.3;
  report.rows[1].users_evaluated = 12;
  report.rows[1].users_excluded = 3;
  const auto text = render_report(report);
  CHECK(text ==
        "alpha\tbeta\tndcg@40\tnovelty@40\tusers_evaluated\tusers_excluded\tmode\n"
        "0.0000\t0.0000\t0.500000\t7.250000\t0\t0\tpps-only\n"
        "0.0000\t0.3000\t0.250000\t9.000000\t12\t3\tspps-only\n");
}

TEST_CASE("svg plot") {
  TradeoffReport two;
  two.rows = {row(0.5, 7.0), row(0.4, 9.0)};
  const auto svg = render_svg(two);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "<polyline") == 1);
  CHECK(std::regex_search(svg, std::regex("points=\"[0-9.]+,[0-9.]+ [0-9.]+,[0-9.]+\"")));
  CHECK(svg.find("#d62728") != std::string::npos);

  TradeoffReport three = two;
  three.rows.push_back(row(0.45, 8.0, SweepMode::kSppsOnly));
  three.rows.push_back(row(0.42, 8.5, SweepMode::kCombined));
  three.rows.back().beta = 0.9;
  const auto all = render_svg(three);
  CHECK(count(all, "<polyline") == 3);
  for (const char* id : {"id=\"pps-only\"", "id=\"spps-only\"", "id=\"combined\"",
                         "#d62728", "#1f77b4", "#2ca02c"}) {
    CHECK(all.find(id) != std::string::npos);
  }
  CHECK(render_svg(three) == all);

  TradeoffReport one;
  one.rows = {row(0.5, 7.0)};
  CHECK_THROWS_AS(render_svg(one), ConfigError);
  CHECK_THROWS_AS(emit_plot(two, "/nonexistent/dir/plot.svg"), IoError);
}

TEST_CASE("recommendation dump") {
  const auto bench = fixture::make_bench(kSmall, kCodes);
  const auto recs = recommend(bench.pipeline(), FusionWeights(0.4, 0.4), EvalConfig{.k = 5});
  const auto text = render_recs(recs, bench.split.train.users(), bench.split.train.items());
  CHECK(text.rfind("user\trank\titem\tscore\n", 0) == 0);
  CHECK(count(text, "\n") == 1 + recs.size() * 5);
  for (const auto& r : recs) {
    CHECK(std::is_sorted(r.scores.rbegin(), r.scores.rend()));
  }
}

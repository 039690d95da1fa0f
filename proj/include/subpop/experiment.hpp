#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subpop/codebook.hpp"
#include "subpop/dataset.hpp"
#include "subpop/fusion.hpp"
#include "subpop/metrics.hpp"
#include "subpop/scorer.hpp"

namespace subpop {

enum class SweepMode { kPpsOnly, kSppsOnly, kCombined };

// "pps-only", "spps-only", "combined".
const char* sweep_mode_name(SweepMode mode);
SweepMode parse_sweep_mode(const std::string& text);

// One trade-off curve:
//   PpsOnly  -> (alpha, 0) for alpha in alpha_grid
//   SppsOnly -> (0, beta)  for beta in beta_grid
//   Combined -> (alpha, fixed_beta) for alpha in alpha_grid
struct SweepSpec {
  SweepMode mode = SweepMode::kPpsOnly;
  std::vector<double> alpha_grid;
  std::vector<double> beta_grid;
  double fixed_beta = 0.9;

  // Default grids: {0, 0.1, ..., 0.9} for the single-signal modes; alpha in
  // {0, 0.01, ..., 0.1} for Combined, the only range that stays convex with
  // beta = 0.9.
  static SweepSpec defaults(SweepMode mode);

  // Throws WeightViolation if any pair leaves the simplex.
  std::vector<FusionWeights> points() const;
};

struct EvalConfig {
  std::size_t k = 40;
  double pps_epsilon = 1.0;
  double novelty_epsilon = kNoveltyEpsilon;
  bool standardize_logits = false;
  unsigned threads = 1;
  // Evaluate a seeded random subset of this many eligible users.
  std::optional<std::size_t> eval_users;
  std::uint64_t eval_seed = 0;
};

// Users with test events, minus those without train history or without any
// positive test grade.
struct EvalUsers {
  std::vector<std::uint32_t> users;  // ascending
  std::size_t no_history = 0;
  std::size_t no_positive = 0;
  std::size_t excluded() const { return no_history + no_positive; }
};

EvalUsers select_eval_users(const TemporalSplit& split, const RelevanceProfile& relevance,
                            std::optional<std::size_t> sample = std::nullopt,
                            std::uint64_t seed = 0);

struct ReportRow {
  SweepMode mode = SweepMode::kPpsOnly;
  double alpha = 0.0;
  double beta = 0.0;
  double ndcg = 0.0;
  double novelty = 0.0;
  std::size_t users_evaluated = 0;
  std::size_t users_excluded = 0;
};

struct TradeoffReport {
  std::size_t k = 40;
  std::vector<ReportRow> rows;
  std::vector<std::uint32_t> users;
  // Indexed [row][user slot], so thresholds and plots need no re-ranking.
  std::vector<std::vector<double>> per_user_ndcg;
  std::vector<std::vector<double>> per_user_novelty;
  std::size_t cold_start_users = 0;

  std::vector<ReportRow> rows_for(SweepMode mode) const;
};

// Everything grid points share: immutable once built.
struct Pipeline {
  const TemporalSplit* split = nullptr;
  const Codebook* codebook = nullptr;
  const BaseScorer* scorer = nullptr;
};

TradeoffReport run_sweep(const Pipeline& pipeline, std::span<const SweepSpec> specs,
                         const EvalConfig& config);
TradeoffReport run_sweep(const Pipeline& pipeline, const SweepSpec& spec,
                         const EvalConfig& config);

struct MetricReport {
  std::size_t k = 0;
  double ndcg = 0.0;
  double novelty = 0.0;
  std::vector<double> per_user_ndcg;
  std::vector<double> per_user_novelty;
  std::size_t users_evaluated = 0;
  std::size_t users_excluded = 0;
};

// Ranks raw base logits with no popularity signal at all.
MetricReport evaluate_base_scorer(const Pipeline& pipeline, const EvalConfig& config);

struct UserRecs {
  std::uint32_t user = 0;
  std::vector<std::uint32_t> items;
  std::vector<double> scores;
};

// Top-k fused recommendations for every evaluated user at one weight pair.
std::vector<UserRecs> recommend(const Pipeline& pipeline, const FusionWeights& weights,
                                const EvalConfig& config);
// TSV rows: user, rank (1-based), item, fused score.
std::string render_recs(std::span<const UserRecs> recs, const IdIndex& users,
                        const IdIndex& items);

// Best NDCG among rows whose novelty >= tau, per tau; nullopt when no row
// qualifies.
std::vector<std::optional<double>> threshold_table(std::span<const ReportRow> rows,
                                                   std::span<const double> thresholds);

inline const std::vector<double> kDefaultThresholds = {0.0, 10.0, 12.0, 14.0};

// Header `alpha beta ndcg@K novelty@K users_evaluated users_excluded mode`.
std::string render_report(const TradeoffReport& report);
// One line per sweep mode present, one column per threshold, a dash when empty.
std::string render_threshold_table(const TradeoffReport& report,
                                   std::span<const double> thresholds);
// Novelty on x, NDCG on y; one polyline per mode (PPS red, sPPS blue,
// combined green). Needs at least two rows.
std::string render_svg(const TradeoffReport& report);
void emit_plot(const TradeoffReport& report, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace subpop

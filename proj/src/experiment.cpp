#include "subpop/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>

#include "subpop/error.hpp"
#include "subpop/parallel.hpp"
#include "subpop/popularity.hpp"
#include "subpop/rng.hpp"

namespace subpop {

const char* sweep_mode_name(SweepMode mode) {
  switch (mode) {
    case SweepMode::kPpsOnly: return "pps-only";
    case SweepMode::kSppsOnly: return "spps-only";
    case SweepMode::kCombined: return "combined";
  }
  return "?";
}

SweepMode parse_sweep_mode(const std::string& text) {
  if (text == "pps-only") return SweepMode::kPpsOnly;
  if (text == "spps-only") return SweepMode::kSppsOnly;
  if (text == "combined") return SweepMode::kCombined;
  throw ConfigError("unknown sweep mode '" + text + "'");
}

SweepSpec SweepSpec::defaults(SweepMode mode) {
  SweepSpec spec;
  spec.mode = mode;
  for (int i = 0; i <= 9; ++i) {
    spec.beta_grid.push_back(i / 10.0);
  }
  if (mode == SweepMode::kCombined) {
    for (int i = 0; i <= 10; ++i) spec.alpha_grid.push_back(i / 100.0);
  } else {
    spec.alpha_grid = spec.beta_grid;
  }
  return spec;
}

std::vector<FusionWeights> SweepSpec::points() const {
  std::vector<FusionWeights> out;
  switch (mode) {
    case SweepMode::kPpsOnly:
      for (const double a : alpha_grid) out.emplace_back(a, 0.0);
      break;
    case SweepMode::kSppsOnly:
      for (const double b : beta_grid) out.emplace_back(0.0, b);
      break;
    case SweepMode::kCombined:
      for (const double a : alpha_grid) out.emplace_back(a, fixed_beta);
      break;
  }
  if (out.empty()) throw ConfigError(std::string("empty grid for ") + sweep_mode_name(mode));
  return out;
}

std::vector<ReportRow> TradeoffReport::rows_for(SweepMode mode) const {
  std::vector<ReportRow> out;
  for (const auto& r : rows) {
    if (r.mode == mode) out.push_back(r);
  }
  return out;
}

EvalUsers select_eval_users(const TemporalSplit& split, const RelevanceProfile& relevance,
                            std::optional<std::size_t> sample, std::uint64_t seed) {
  EvalUsers out;
  for (std::uint32_t u = 0; u < split.test.num_users(); ++u) {
    if (split.test.user_events(u).empty()) continue;
    if (split.train.user_events(u).empty()) {
      ++out.no_history;
    } else if (!relevance.has_positive(u)) {
      ++out.no_positive;
    } else {
      out.users.push_back(u);
    }
  }
  if (sample && *sample < out.users.size()) {
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < *sample; ++i) {
      std::swap(out.users[i], out.users[i + rng.below(out.users.size() - i)]);
    }
    out.users.resize(*sample);
    std::sort(out.users.begin(), out.users.end());
  }
  return out;
}

namespace {

struct UserSignals {
  std::vector<std::uint32_t> history;
  std::vector<double> base;
  StandardizedScores pps;
  StandardizedScores spps;
  UserPopularityProfile profile;
  bool cold_start = false;
};

void check_pipeline(const Pipeline& p, const EvalConfig& config) {
  if (!p.split || !p.codebook || !p.scorer) throw ConfigError("incomplete pipeline");
  const std::size_t items = p.split->train.num_items();
  if (p.codebook->num_items() != items) {
    throw DimensionMismatch("codebook covers " + std::to_string(p.codebook->num_items()) +
                            " items, catalogue has " + std::to_string(items));
  }
  if (p.scorer->num_items() != items) {
    throw DimensionMismatch("scorer covers " + std::to_string(p.scorer->num_items()) +
                            " items, catalogue has " + std::to_string(items));
  }
  if (config.k == 0 || config.k > items) {
    throw ConfigError("cutoff k=" + std::to_string(config.k) + " invalid for " +
                      std::to_string(items) + " items");
  }
  if (!(config.pps_epsilon > 0.0)) throw ConfigError("PPS epsilon must be positive");
  if (!(config.novelty_epsilon > 0.0 && config.novelty_epsilon <= 1.0)) {
    throw ConfigError("novelty epsilon must lie in (0, 1]");
  }
}

UserSignals compute_signals(const Pipeline& p, const EvalConfig& config, std::uint32_t user) {
  UserSignals s;
  s.history = p.split->train.user_items(user);
  BaseScores scores = p.scorer->score(UserContext{user, s.history});
  if (scores.logits.size() != p.codebook->num_items()) {
    throw DimensionMismatch("scorer returned the wrong number of logits");
  }
  for (const double v : scores.logits) {
    if (!std::isfinite(v)) throw NonFiniteScore(user);
  }
  s.cold_start = scores.cold_start;
  s.base = config.standardize_logits ? standardize(scores.logits).values
                                     : std::move(scores.logits);
  s.profile = build_profile(user, s.history, *p.codebook);
  s.pps = standardize(pps_vector(s.profile, p.codebook->num_items(), config.pps_epsilon));
  s.spps = standardize(spps_vector(s.profile, *p.codebook, config.pps_epsilon));
  return s;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double total = 0.0;
  for (const double x : v) total += x;
  return total / static_cast<double>(v.size());
}

}  // namespace

TradeoffReport run_sweep(const Pipeline& pipeline, std::span<const SweepSpec> specs,
                         const EvalConfig& config) {
  check_pipeline(pipeline, config);
  struct Point {
    SweepMode mode;
    FusionWeights weights;
  };
  std::vector<Point> points;
  for (const auto& spec : specs) {
    for (const auto& w : spec.points()) points.push_back({spec.mode, w});
  }
  if (points.empty()) throw ConfigError("sweep has no grid points");

  const RelevanceProfile relevance = build_relevance(pipeline.split->test);
  const EvalUsers eval =
      select_eval_users(*pipeline.split, relevance, config.eval_users, config.eval_seed);
  const std::size_t n_users = eval.users.size();

  TradeoffReport report;
  report.k = config.k;
  report.users = eval.users;
  report.per_user_ndcg.assign(points.size(), std::vector<double>(n_users, 0.0));
  report.per_user_novelty.assign(points.size(), std::vector<double>(n_users, 0.0));
  std::vector<char> cold(n_users, 0);

  const std::size_t items = pipeline.codebook->num_items();
  parallel_for(n_users, config.threads, [&](std::size_t slot) {
    const std::uint32_t user = eval.users[slot];
    const UserSignals s = compute_signals(pipeline, config, user);
    cold[slot] = s.cold_start ? 1 : 0;
    std::vector<double> fused(items);
    for (std::size_t p = 0; p < points.size(); ++p) {
      fuse_into(fused, s.base, s.pps.values, s.spps.values, points[p].weights);
      const auto top = rank_top_k(fused, config.k);
      report.per_user_ndcg[p][slot] = ndcg_at_k(top, relevance.grades(user), config.k).value();
      report.per_user_novelty[p][slot] =
          novelty_at_k(top, s.profile, config.k, config.novelty_epsilon);
    }
  });

  report.cold_start_users = static_cast<std::size_t>(std::count(cold.begin(), cold.end(), 1));
  for (std::size_t p = 0; p < points.size(); ++p) {
    ReportRow row;
    row.mode = points[p].mode;
    row.alpha = points[p].weights.alpha();
    row.beta = points[p].weights.beta();
    row.ndcg = mean(report.per_user_ndcg[p]);
    row.novelty = mean(report.per_user_novelty[p]);
    row.users_evaluated = n_users;
    row.users_excluded = eval.excluded();
    report.rows.push_back(row);
  }
  return report;
}

TradeoffReport run_sweep(const Pipeline& pipeline, const SweepSpec& spec,
                         const EvalConfig& config) {
  return run_sweep(pipeline, std::span<const SweepSpec>(&spec, 1), config);
}

MetricReport evaluate_base_scorer(const Pipeline& pipeline, const EvalConfig& config) {
  check_pipeline(pipeline, config);
  const RelevanceProfile relevance = build_relevance(pipeline.split->test);
  const EvalUsers eval =
      select_eval_users(*pipeline.split, relevance, config.eval_users, config.eval_seed);
  MetricReport out;
  out.k = config.k;
  out.per_user_ndcg.assign(eval.users.size(), 0.0);
  out.per_user_novelty.assign(eval.users.size(), 0.0);
  parallel_for(eval.users.size(), config.threads, [&](std::size_t slot) {
    const std::uint32_t user = eval.users[slot];
    const auto history = pipeline.split->train.user_items(user);
    auto logits = pipeline.scorer->score(UserContext{user, history}).logits;
    if (config.standardize_logits) logits = standardize(logits).values;
    const auto top = rank_top_k(logits, config.k);
    const auto profile = build_profile(user, history, *pipeline.codebook);
    out.per_user_ndcg[slot] = ndcg_at_k(top, relevance.grades(user), config.k).value();
    out.per_user_novelty[slot] = novelty_at_k(top, profile, config.k, config.novelty_epsilon);
  });
  out.ndcg = mean(out.per_user_ndcg);
  out.novelty = mean(out.per_user_novelty);
  out.users_evaluated = eval.users.size();
  out.users_excluded = eval.excluded();
  return out;
}

std::vector<UserRecs> recommend(const Pipeline& pipeline, const FusionWeights& weights,
                                const EvalConfig& config) {
  check_pipeline(pipeline, config);
  const RelevanceProfile relevance = build_relevance(pipeline.split->test);
  const EvalUsers eval =
      select_eval_users(*pipeline.split, relevance, config.eval_users, config.eval_seed);
  std::vector<UserRecs> out(eval.users.size());
  parallel_for(eval.users.size(), config.threads, [&](std::size_t slot) {
    const std::uint32_t user = eval.users[slot];
    const UserSignals s = compute_signals(pipeline, config, user);
    const auto fused = fuse(s.base, s.pps.values, s.spps.values, weights);
    UserRecs recs{user, rank_top_k(fused, config.k), {}};
    for (const auto item : recs.items) recs.scores.push_back(fused[item]);
    out[slot] = std::move(recs);
  });
  return out;
}

namespace {

std::string format(const char* fmt, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, fmt, value);
  return buffer;
}

}  // namespace

std::string render_recs(std::span<const UserRecs> recs, const IdIndex& users,
                        const IdIndex& items) {
  std::string out = "user\trank\titem\tscore\n";
  for (const auto& r : recs) {
    for (std::size_t i = 0; i < r.items.size(); ++i) {
      out += users.id(r.user) + '\t' + std::to_string(i + 1) + '\t' + items.id(r.items[i]) +
             '\t' + format("%.9g", r.scores[i]) + '\n';
    }
  }
  return out;
}

std::vector<std::optional<double>> threshold_table(std::span<const ReportRow> rows,
                                                   std::span<const double> thresholds) {
  if (rows.empty()) throw ConfigError("threshold table needs at least one report row");
  std::vector<std::optional<double>> out;
  for (const double tau : thresholds) {
    std::optional<double> best;
    for (const auto& r : rows) {
      if (r.novelty >= tau && (!best || r.ndcg > *best)) best = r.ndcg;
    }
    out.push_back(best);
  }
  return out;
}

std::string render_report(const TradeoffReport& report) {
  const std::string k = std::to_string(report.k);
  std::string out = "alpha\tbeta\tndcg@" + k + "\tnovelty@" + k +
                    "\tusers_evaluated\tusers_excluded\tmode\n";
  for (const auto& r : report.rows) {
    out += format("%.4f", r.alpha) + '\t' + format("%.4f", r.beta) + '\t' +
           format("%.6f", r.ndcg) + '\t' + format("%.6f", r.novelty) + '\t' +
           std::to_string(r.users_evaluated) + '\t' + std::to_string(r.users_excluded) + '\t' +
           sweep_mode_name(r.mode) + '\n';
  }
  return out;
}

namespace {

constexpr SweepMode kModes[] = {SweepMode::kPpsOnly, SweepMode::kSppsOnly,
                                SweepMode::kCombined};

const char* mode_label(SweepMode mode) {
  switch (mode) {
    case SweepMode::kPpsOnly: return "PPS";
    case SweepMode::kSppsOnly: return "sPPS";
    case SweepMode::kCombined: return "PPS+sPPS";
  }
  return "?";
}

const char* mode_colour(SweepMode mode) {
  switch (mode) {
    case SweepMode::kPpsOnly: return "#d62728";
    case SweepMode::kSppsOnly: return "#1f77b4";
    case SweepMode::kCombined: return "#2ca02c";
  }
  return "#000000";
}

}  // namespace

std::string render_threshold_table(const TradeoffReport& report,
                                   std::span<const double> thresholds) {
  std::string out = "method";
  for (const double tau : thresholds) out += "\tnovelty>=" + format("%g", tau);
  out += '\n';
  for (const SweepMode mode : kModes) {
    const auto rows = report.rows_for(mode);
    if (rows.empty()) continue;
    out += mode_label(mode);
    for (const auto& cell : threshold_table(rows, thresholds)) {
      out += '\t';
      out += cell ? format("%.4f", *cell) : "—";
    }
    out += '\n';
  }
  return out;
}

std::string render_svg(const TradeoffReport& report) {
  if (report.rows.size() < 2) throw ConfigError("a trade-off plot needs at least two rows");
  constexpr double kWidth = 720, kHeight = 480;
  constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  auto padded = [](double lo, double hi) {
    if (hi - lo < 1e-12) return std::pair{lo - 1.0, hi + 1.0};
    const double pad = 0.05 * (hi - lo);
    return std::pair{lo - pad, hi + pad};
  };
  double nov_lo = report.rows[0].novelty, nov_hi = nov_lo;
  double ndcg_lo = report.rows[0].ndcg, ndcg_hi = ndcg_lo;
  for (const auto& r : report.rows) {
    nov_lo = std::min(nov_lo, r.novelty);
    nov_hi = std::max(nov_hi, r.novelty);
    ndcg_lo = std::min(ndcg_lo, r.ndcg);
    ndcg_hi = std::max(ndcg_hi, r.ndcg);
  }
  const auto [x0, x1] = padded(nov_lo, nov_hi);
  const auto [y0, y1] = padded(ndcg_lo, ndcg_hi);
  auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * plot_w; };
  auto py = [&](double v) { return kTop + (1.0 - (v - y0) / (y1 - y0)) * plot_h; };
  auto f2 = [](double v) { return format("%.2f", v); };

  const std::string k = std::to_string(report.k);
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
         "viewBox=\"0 0 720 480\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"" + f2(kLeft + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"14\">NDCG@" + k + " vs personalised Novelty@" + k + "</text>\n";
  svg += "<rect x=\"" + f2(kLeft) + "\" y=\"" + f2(kTop) + "\" width=\"" + f2(plot_w) +
         "\" height=\"" + f2(plot_h) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = x0 + (x1 - x0) * t / 4.0;
    const double yv = y0 + (y1 - y0) * t / 4.0;
    svg += "<line x1=\"" + f2(px(xv)) + "\" y1=\"" + f2(kTop + plot_h) + "\" x2=\"" +
           f2(px(xv)) + "\" y2=\"" + f2(kTop + plot_h + 5) + "\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + f2(px(xv)) + "\" y=\"" + f2(kTop + plot_h + 20) +
           "\" text-anchor=\"middle\">" + format("%.2f", xv) + "</text>\n";
    svg += "<line x1=\"" + f2(kLeft - 5) + "\" y1=\"" + f2(py(yv)) + "\" x2=\"" + f2(kLeft) +
           "\" y2=\"" + f2(py(yv)) + "\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + f2(kLeft - 8) + "\" y=\"" + f2(py(yv) + 4) +
           "\" text-anchor=\"end\">" + format("%.3f", yv) + "</text>\n";
  }
  svg += "<text x=\"" + f2(kLeft + plot_w / 2) + "\" y=\"" + f2(kHeight - 15) +
         "\" text-anchor=\"middle\">Novelty@" + k + "</text>\n";
  svg += "<text x=\"20\" y=\"" + f2(kTop + plot_h / 2) + "\" text-anchor=\"middle\" "
         "transform=\"rotate(-90 20 " + f2(kTop + plot_h / 2) + ")\">NDCG@" + k + "</text>\n";

  int legend = 0;
  for (const SweepMode mode : kModes) {
    const auto rows = report.rows_for(mode);
    if (rows.empty()) continue;
    const std::string id = sweep_mode_name(mode);
    const std::string colour = mode_colour(mode);
    std::string points;
    for (const auto& r : rows) {
      if (!points.empty()) points += ' ';
      points += f2(px(r.novelty)) + "," + f2(py(r.ndcg));
    }
    svg += "<g id=\"" + id + "\">\n";
    svg += "<polyline fill=\"none\" stroke=\"" + colour + "\" stroke-width=\"2\" points=\"" +
           points + "\"/>\n";
    for (const auto& r : rows) {
      svg += "<circle cx=\"" + f2(px(r.novelty)) + "\" cy=\"" + f2(py(r.ndcg)) +
             "\" r=\"3\" fill=\"" + colour + "\"/>\n";
    }
    svg += "</g>\n";
    const double ly = kTop + 10 + 20 * legend++;
    const double lx = kLeft + plot_w + 15;
    svg += "<line x1=\"" + f2(lx) + "\" y1=\"" + f2(ly) + "\" x2=\"" + f2(lx + 20) +
           "\" y2=\"" + f2(ly) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    std::string label = mode_label(mode);
    if (mode == SweepMode::kCombined) label += " (beta=" + format("%.2f", rows.front().beta) + ")";
    svg += "<text x=\"" + f2(lx + 26) + "\" y=\"" + f2(ly + 4) + "\">" + label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void emit_plot(const TradeoffReport& report, const std::filesystem::path& path) {
  write_text(path, render_svg(report));
}

}  // namespace subpop

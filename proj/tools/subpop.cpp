// subpop: synthetic data generation and accuracy/novelty trade-off sweeps.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subpop/codebook.hpp"
#include "subpop/dataset.hpp"
#include "subpop/error.hpp"
#include "subpop/experiment.hpp"
#include "subpop/popularity.hpp"
#include "subpop/scorer.hpp"
#include "subpop/synth.hpp"

namespace {

using namespace subpop;

struct RunOptions {
  std::string data;
  std::string format = "auto";
  std::string split_in;
  std::size_t top_items = 0;
  double holdout = 0.1;
  std::string scorer = "markov";
  std::string logits;
  double markov_smoothing = 0.0;
  std::size_t history_window = 50;
  int splits = 32;
  int codebook_size = 256;
  int embedding_dim = 256;
  std::uint64_t svd_seed = 0;
  double svd_tol = 1e-7;
  int svd_max_iter = 300;
  std::size_t k = 40;
  std::string mode = "all";
  std::vector<double> alpha_grid;
  std::vector<double> beta_grid;
  double fixed_beta = 0.9;
  std::optional<double> alpha;
  std::optional<double> beta;
  double pps_epsilon = 1.0;
  double novelty_epsilon = kNoveltyEpsilon;
  bool standardize_logits = false;
  std::optional<std::size_t> eval_users;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string plot;
  std::string table;
  std::vector<double> thresholds = kDefaultThresholds;
  std::string dump_recs;
  std::string split_out;
  std::string codebook_out;
  std::string profiles_out;
};

void note(const std::string& message) { std::cerr << "[subpop] " << message << '\n'; }

std::unique_ptr<BaseScorer> make_scorer(const RunOptions& o, const TemporalSplit& split,
                                        const std::shared_ptr<const Codebook>& cb) {
  if (o.scorer == "globalpop") return std::make_unique<GlobalPopularityScorer>(split.train);
  if (o.scorer == "markov") return std::make_unique<MarkovScorer>(split.train, o.markov_smoothing);
  if (o.scorer == "svddot") {
    return std::make_unique<SvdDotScorer>(cb, SubEmbeddingTable::random(*cb, o.seed),
                                          o.history_window);
  }
  if (o.scorer == "external") {
    if (o.logits.empty()) throw ConfigError("--scorer external needs --logits");
    // Coverage is checked against every user that could be evaluated.
    const auto relevance = build_relevance(split.test);
    const auto eval = select_eval_users(split, relevance);
    return std::make_unique<ExternalScorer>(
        load_external_logits(o.logits, split.train.users(), split.train.items(), eval.users));
  }
  throw ConfigError("unknown scorer '" + o.scorer + "'");
}

std::vector<SweepSpec> make_specs(const RunOptions& o) {
  std::vector<SweepMode> modes;
  if (o.mode == "all") {
    modes = {SweepMode::kPpsOnly, SweepMode::kSppsOnly, SweepMode::kCombined};
  } else {
    modes = {parse_sweep_mode(o.mode)};
  }
  std::vector<SweepSpec> specs;
  for (const auto mode : modes) {
    SweepSpec spec = SweepSpec::defaults(mode);
    spec.fixed_beta = o.fixed_beta;
    if (!o.alpha_grid.empty()) spec.alpha_grid = o.alpha_grid;
    if (!o.beta_grid.empty()) spec.beta_grid = o.beta_grid;
    if (mode == SweepMode::kCombined && o.alpha_grid.empty()) {
      // Keep the default combined grid inside the simplex for any fixed beta.
      spec.alpha_grid.clear();
      const double room = 1.0 - o.fixed_beta;
      for (int i = 0; i <= 10; ++i) spec.alpha_grid.push_back(room * i / 10.0);
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

int run(const RunOptions& o) {
  TemporalSplit split;
  if (!o.split_in.empty()) {
    std::ifstream in(o.split_in);
    if (!in) throw IoError("cannot open '" + o.split_in + "'");
    split = read_split(in);
  } else {
    if (o.data.empty()) throw ConfigError("--data or --split is required");
    const LogFormat format = o.format == "auto" ? format_from_path(o.data)
                             : o.format == "csv" ? LogFormat::kCsv
                                                 : LogFormat::kTsv;
    EventLog log = load_events(o.data, format);
    note(std::to_string(log.num_events()) + " events, " + std::to_string(log.num_users()) +
        " users, " + std::to_string(log.num_items()) + " items");
    if (o.top_items > 0) {
      log = sample_top_items(log, o.top_items);
      note("kept top " + std::to_string(log.num_items()) + " items: " +
          std::to_string(log.num_events()) + " events, " + std::to_string(log.num_users()) +
          " users");
    }
    split = temporal_split(log, o.holdout);
  }
  note("train " + std::to_string(split.train.num_events()) + " / test " +
      std::to_string(split.test.num_events()) + " events, cut at t=" +
      std::to_string(split.split_timestamp));
  if (!o.split_out.empty()) {
    std::ofstream out(o.split_out);
    if (!out) throw IoError("cannot write '" + o.split_out + "'");
    write_split(out, split);
  }

  CodebookConfig cc;
  cc.splits = o.splits;
  cc.codebook_size = o.codebook_size;
  cc.embedding_dim = o.embedding_dim;
  cc.svd_seed = o.svd_seed;
  cc.svd_tol = o.svd_tol;
  cc.svd_max_iter = o.svd_max_iter;
  cc.threads = o.threads;
  auto cb = std::make_shared<const Codebook>(build_codebook(split.train, cc));
  note("codebook: m=" + std::to_string(cb->splits()) + " V=" + std::to_string(cb->codebook_size()));
  if (!o.codebook_out.empty()) {
    std::ofstream out(o.codebook_out);
    if (!out) throw IoError("cannot write '" + o.codebook_out + "'");
    write_codebook(out, *cb, split.train.items());
  }
  if (!o.profiles_out.empty()) {
    std::ofstream out(o.profiles_out);
    if (!out) throw IoError("cannot write '" + o.profiles_out + "'");
    for (std::uint32_t u = 0; u < split.train.num_users(); ++u) {
      const auto history = split.train.user_items(u);
      write_profile(out, build_profile(u, history, *cb), split.train.users(), split.train.items());
    }
  }

  const auto scorer = make_scorer(o, split, cb);
  const Pipeline pipeline{&split, cb.get(), scorer.get()};
  EvalConfig ec;
  ec.k = o.k;
  ec.pps_epsilon = o.pps_epsilon;
  ec.novelty_epsilon = o.novelty_epsilon;
  ec.standardize_logits = o.standardize_logits;
  ec.threads = o.threads;
  ec.eval_users = o.eval_users;
  ec.eval_seed = o.seed;

  if (o.alpha.has_value() != o.beta.has_value()) {
    throw ConfigError("--alpha and --beta must be given together");
  }
  if (!o.dump_recs.empty()) {
    if (!o.alpha) throw ConfigError("--dump-recs needs --alpha and --beta");
    const auto recs = recommend(pipeline, FusionWeights(*o.alpha, *o.beta), ec);
    write_text(o.dump_recs, render_recs(recs, split.train.users(), split.train.items()));
  }

  std::vector<SweepSpec> specs;
  if (o.alpha) {
    SweepSpec single;
    single.mode = *o.beta == 0.0 ? SweepMode::kPpsOnly
                  : *o.alpha == 0.0 ? SweepMode::kSppsOnly
                                    : SweepMode::kCombined;
    single.alpha_grid = {*o.alpha};
    single.beta_grid = {*o.beta};
    single.fixed_beta = *o.beta;
    specs.push_back(single);
  } else {
    specs = make_specs(o);
  }
  const TradeoffReport report = run_sweep(pipeline, specs, ec);
  note(std::to_string(report.rows.empty() ? 0 : report.rows.front().users_evaluated) +
      " users evaluated, " +
      std::to_string(report.rows.empty() ? 0 : report.rows.front().users_excluded) +
      " excluded, " + std::to_string(report.cold_start_users) + " cold-start fallbacks");

  const std::string tsv = render_report(report);
  if (o.out.empty()) {
    std::cout << tsv;
  } else {
    write_text(o.out, tsv);
  }
  if (!o.table.empty()) write_text(o.table, render_threshold_table(report, o.thresholds));
  if (!o.plot.empty()) emit_plot(report, o.plot);
  return 0;
}

int synth(const SynthConfig& cfg, const std::string& out) {
  const EventLog log = generate(cfg);
  if (out.empty()) {
    write_events(std::cout, log);
  } else {
    std::ofstream file(out);
    if (!file) throw IoError("cannot write '" + out + "'");
    write_events(file, log);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personalised item- and sub-ID popularity for sequential recommendation"};
  app.require_subcommand(1);

  SynthConfig sc;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic event TSV");
  synth_cmd->add_option("--users", sc.users)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--items", sc.items)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--genres", sc.genres)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--events-per-user", sc.events_per_user)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--repeat-prob", sc.repeat_prob)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--pool-size", sc.pool_size)->check(CLI::PositiveNumber);
  synth_cmd->add_option("--genre-affinity", sc.genre_affinity)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--zipf-exponent", sc.zipf_exponent);
  synth_cmd->add_option("--like-fraction", sc.like_fraction)->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--seed", sc.seed);
  synth_cmd->add_option("--out", synth_out, "Output TSV (stdout if omitted)");

  RunOptions o;
  auto* run_cmd = app.add_subcommand("run", "Build split, codebook and scorer; sweep (alpha, beta)");
  run_cmd->set_config("--config", "", "key=value file with the same option names");
  run_cmd->add_option("--data", o.data, "Event file: user, item, timestamp, event");
  run_cmd->add_option("--format", o.format)->check(CLI::IsMember({"auto", "tsv", "csv"}));
  run_cmd->add_option("--split", o.split_in, "Read a cached split instead of --data");
  run_cmd->add_option("--top-items", o.top_items, "Keep only the N most popular items");
  run_cmd->add_option("--holdout", o.holdout, "Fraction of latest events held out")
      ->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--scorer", o.scorer)
      ->check(CLI::IsMember({"globalpop", "markov", "svddot", "external"}));
  run_cmd->add_option("--logits", o.logits, "External logits file (--scorer external)");
  run_cmd->add_option("--markov-smoothing", o.markov_smoothing);
  run_cmd->add_option("--history-window", o.history_window);
  run_cmd->add_option("--splits", o.splits, "Codebook splits m");
  run_cmd->add_option("--codebook-size", o.codebook_size, "Codes per split V");
  run_cmd->add_option("--embedding-dim", o.embedding_dim);
  run_cmd->add_option("--svd-seed", o.svd_seed);
  run_cmd->add_option("--svd-tol", o.svd_tol);
  run_cmd->add_option("--svd-max-iter", o.svd_max_iter);
  run_cmd->add_option("--k", o.k, "Ranking cutoff");
  run_cmd->add_option("--mode", o.mode)
      ->check(CLI::IsMember({"pps-only", "spps-only", "combined", "all"}));
  run_cmd->add_option("--alpha-grid", o.alpha_grid)->delimiter(',');
  run_cmd->add_option("--beta-grid", o.beta_grid)->delimiter(',');
  run_cmd->add_option("--fixed-beta", o.fixed_beta, "Beta held fixed in combined mode");
  run_cmd->add_option("--alpha", o.alpha, "Single weight pair (with --beta)");
  run_cmd->add_option("--beta", o.beta);
  run_cmd->add_option("--pps-epsilon", o.pps_epsilon);
  run_cmd->add_option("--novelty-epsilon", o.novelty_epsilon);
  run_cmd->add_flag("--standardize-logits", o.standardize_logits);
  run_cmd->add_option("--eval-users", o.eval_users, "Evaluate a random subset of N users");
  run_cmd->add_option("--seed", o.seed, "Seed for user subsampling and embeddings");
  run_cmd->add_option("--threads", o.threads)->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", o.out, "Report TSV (stdout if omitted)");
  run_cmd->add_option("--plot", o.plot, "Trade-off SVG");
  run_cmd->add_option("--table", o.table, "Novelty-threshold table TSV");
  run_cmd->add_option("--thresholds", o.thresholds)->delimiter(',');
  run_cmd->add_option("--dump-recs", o.dump_recs, "Top-k per user at --alpha/--beta");
  run_cmd->add_option("--split-out", o.split_out);
  run_cmd->add_option("--codebook-out", o.codebook_out);
  run_cmd->add_option("--profiles-out", o.profiles_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (*synth_cmd) return synth(sc, synth_out);
    return run(o);
  } catch (const Error& e) {
    std::cerr << "subpop: " << category_name(e.category()) << " error: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "subpop: internal error: " << e.what() << '\n';
    return 1;
  }
}

#include "subpop/scorer.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>

#include "subpop/error.hpp"

namespace subpop {

GlobalPopularityScorer::GlobalPopularityScorer(const EventLog& train) {
  if (train.empty()) throw EmptyLog("popularity scorer needs train events");
  std::vector<std::uint64_t> counts(train.num_items(), 0);
  for (const auto& e : train.interactions()) ++counts[e.item];
  logits_.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    logits_[i] = std::log1p(static_cast<double>(counts[i]));
  }
}

BaseScores GlobalPopularityScorer::score(const UserContext&) const { return {logits_, false}; }

MarkovScorer::MarkovScorer(const EventLog& train, double smoothing)
    : smoothing_(smoothing), fallback_(train) {
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) {
    throw ConfigError("Markov smoothing must be a finite non-negative number");
  }
  const std::size_t num_items = train.num_items();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  pairs.reserve(train.num_events());
  for (std::uint32_t u = 0; u < train.num_users(); ++u) {
    const auto events = train.user_events(u);
    for (std::size_t t = 1; t < events.size(); ++t) {
      pairs.emplace_back(events[t - 1].item, events[t].item);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  offsets_.assign(num_items + 1, 0);
  totals_.assign(num_items, 0);
  for (std::size_t i = 0; i < pairs.size();) {
    std::size_t j = i;
    while (j < pairs.size() && pairs[j] == pairs[i]) ++j;
    targets_.emplace_back(pairs[i].second, static_cast<std::uint32_t>(j - i));
    ++offsets_[pairs[i].first + 1];
    totals_[pairs[i].first] += j - i;
    i = j;
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
}

BaseScores MarkovScorer::score(const UserContext& context) const {
  if (context.history.empty() || totals_[context.history.back()] == 0) {
    return {fallback_.logits(), true};
  }
  const std::uint32_t source = context.history.back();
  const double denominator = static_cast<double>(totals_[source]) +
                             smoothing_ * static_cast<double>(num_items());
  const double unseen =
      smoothing_ > 0.0 ? std::max(std::log(smoothing_ / denominator), kLogFloor) : kLogFloor;
  BaseScores out{std::vector<double>(num_items(), unseen), false};
  for (std::size_t r = offsets_[source]; r < offsets_[source + 1]; ++r) {
    const auto [target, count] = targets_[r];
    out.logits[target] =
        std::max(std::log((static_cast<double>(count) + smoothing_) / denominator), kLogFloor);
  }
  return out;
}

SvdDotScorer::SvdDotScorer(std::shared_ptr<const Codebook> cb, SubEmbeddingTable table,
                           std::size_t window)
    : cb_(std::move(cb)), table_(std::move(table)), window_(window) {
  if (!cb_) throw ConfigError("svddot scorer needs a codebook");
  if (window_ == 0) throw ConfigError("history window must be positive");
  if (table_.splits() != cb_->splits()) {
    throw DimensionMismatch("sub-embedding table does not match codebook splits");
  }
  for (int j = 0; j < cb_->splits(); ++j) {
    if (table_.split(j).rows() != cb_->codebook_size() ||
        table_.split(j).cols() != cb_->sub_dim()) {
      throw DimensionMismatch("sub-embedding table shape does not match the codebook");
    }
  }
}

BaseScores SvdDotScorer::score(const UserContext& context) const {
  const auto splits = cb_->splits();
  const auto size = static_cast<std::size_t>(cb_->codebook_size());
  BaseScores out{std::vector<double>(cb_->num_items(), 0.0), false};
  if (context.history.empty()) {
    out.cold_start = true;
    return out;
  }
  const std::size_t take = std::min(window_, context.history.size());
  const auto recent = context.history.last(take);
  Eigen::VectorXd user = Eigen::VectorXd::Zero(cb_->embedding_dim());
  for (const auto item : recent) user += reconstruct_embedding(*cb_, table_, item);
  user /= static_cast<double>(take);

  // <user, w_i> = sum_j <user_j, table_j[z_j(i)]>; precompute per code.
  std::vector<double> dots(static_cast<std::size_t>(splits) * size);
  for (int j = 0; j < splits; ++j) {
    const Eigen::VectorXd part = user.segment(j * cb_->sub_dim(), cb_->sub_dim());
    const Eigen::VectorXd per_code = table_.split(j) * part;
    for (std::size_t k = 0; k < size; ++k) {
      dots[static_cast<std::size_t>(j) * size + k] = per_code(static_cast<Eigen::Index>(k));
    }
  }
  const auto codes = cb_->codes();
  for (std::size_t i = 0; i < cb_->num_items(); ++i) {
    double total = 0.0;
    for (int j = 0; j < splits; ++j) {
      total += dots[static_cast<std::size_t>(j) * size +
                    codes[i * static_cast<std::size_t>(splits) + static_cast<std::size_t>(j)]];
    }
    out.logits[i] = total;
  }
  return out;
}

const std::vector<double>& ExternalLogits::row(std::uint32_t user) const {
  const auto it = rows_.find(user);
  if (it == rows_.end()) throw MissingUser("#" + std::to_string(user));
  return it->second;
}

namespace {

std::vector<std::string_view> split_on(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_score(std::string_view text, std::size_t row) {
  const std::string s(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ParseError(row, "score '" + s + "' is not a number");
  }
  if (!std::isfinite(v)) throw NonFiniteScore(row);
  return v;
}

}  // namespace

ExternalLogits load_external_logits(const std::filesystem::path& path, const IdIndex& users,
                                    const IdIndex& items,
                                    std::span<const std::uint32_t> required) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::size_t num_items = items.size();
  std::unordered_map<std::uint32_t, std::vector<double>> rows;
  std::unordered_map<std::uint32_t, bool> is_sparse;
  std::optional<double> sparse_default;
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> triples;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto f = split_on(line, '\t');
      if (f[0] == "#default") {
        if (f.size() != 2) throw ParseError(row, "malformed #default line");
        sparse_default = parse_score(f[1], row);
      }
      continue;
    }
    const auto f = split_on(line, '\t');
    if (f.size() != 2 && f.size() != 3) {
      throw ParseError(row, "expected 2 (dense) or 3 (sparse) fields");
    }
    const auto user = users.find(f[0]);
    if (!user) continue;
    const bool sparse = f.size() == 3;
    const auto [mode, inserted] = is_sparse.emplace(*user, sparse);
    if (!inserted && (mode->second != sparse || !sparse)) {
      throw ParseError(row, "user '" + std::string(f[0]) + "' listed more than once");
    }
    if (sparse) {
      const auto item = items.find(f[1]);
      if (!item) throw ParseError(row, "unknown item '" + std::string(f[1]) + "'");
      triples.emplace_back(*user, *item, parse_score(f[2], row));
    } else {
      const auto scores = split_on(f[1], ',');
      if (scores.size() != num_items) {
        throw ParseError(row, "dense row has " + std::to_string(scores.size()) +
                                  " scores, expected " + std::to_string(num_items));
      }
      std::vector<double> values;
      values.reserve(num_items);
      for (const auto s : scores) values.push_back(parse_score(s, row));
      rows.emplace(*user, std::move(values));
    }
  }
  if (!triples.empty()) {
    if (!sparse_default) throw ParseError(row, "sparse logits need a #default line");
    for (const auto& [user, item, score] : triples) {
      auto [it, inserted] = rows.try_emplace(user, num_items, *sparse_default);
      it->second[item] = score;
    }
  }
  for (const auto user : required) {
    if (!rows.count(user)) throw MissingUser(users.id(user));
  }
  return ExternalLogits(num_items, std::move(rows));
}

BaseScores ExternalScorer::score(const UserContext& context) const {
  return {logits_.row(context.user), false};
}

}  // namespace subpop

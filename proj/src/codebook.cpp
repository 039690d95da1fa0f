#include "subpop/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "subpop/error.hpp"
#include "subpop/parallel.hpp"
#include "subpop/rng.hpp"

namespace subpop {

Codebook::Codebook(int splits, int codebook_size, int sub_dim, std::size_t num_items,
                   std::vector<Code> codes, Eigen::MatrixXd item_factors,
                   Eigen::VectorXd singular_values)
    : splits_(splits),
      codebook_size_(codebook_size),
      sub_dim_(sub_dim),
      num_items_(num_items),
      codes_(std::move(codes)),
      item_factors_(std::move(item_factors)),
      singular_values_(std::move(singular_values)) {
  if (splits_ < 1 || codebook_size_ < 1 || sub_dim_ < 1) {
    throw ConfigError("codebook needs positive splits, size and sub-dimension");
  }
  if (codes_.size() != num_items_ * static_cast<std::size_t>(splits_)) {
    throw DimensionMismatch("code table does not match items x splits");
  }
  for (const Code c : codes_) {
    if (c >= static_cast<Code>(codebook_size_)) {
      throw IndexOutOfRange("code outside [0, V)");
    }
  }
  for (Eigen::Index j = 1; j < singular_values_.size(); ++j) {
    if (singular_values_(j) > singular_values_(j - 1)) {
      throw ConfigError("singular values must be non-increasing");
    }
  }
}

std::span<const Code> Codebook::code_of(std::size_t item) const {
  if (item >= num_items_) {
    throw IndexOutOfRange("item " + std::to_string(item) + " outside codebook of " +
                          std::to_string(num_items_) + " items");
  }
  return std::span<const Code>(codes_).subspan(item * static_cast<std::size_t>(splits_),
                                                static_cast<std::size_t>(splits_));
}

SparseMatrix build_interaction_matrix(const EventLog& train) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(train.num_events());
  for (std::uint32_t u = 0; u < train.num_users(); ++u) {
    auto items = train.user_items(u);
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    for (const auto i : items) triplets.emplace_back(u, i, 1.0);
  }
  SparseMatrix matrix(static_cast<Eigen::Index>(train.num_users()),
                      static_cast<Eigen::Index>(train.num_items()));
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  return matrix;
}

Codebook assign_codes(const Eigen::MatrixXd& item_factors,
                      const Eigen::VectorXd& singular_values, int codebook_size,
                      int sub_dim, unsigned threads) {
  if (codebook_size < 1) throw ConfigError("codebook size must be >= 1");
  const auto num_items = static_cast<std::size_t>(item_factors.rows());
  const auto splits = static_cast<int>(item_factors.cols());
  if (splits < 1) throw DimensionMismatch("item factors have no columns");
  std::vector<Code> codes(num_items * static_cast<std::size_t>(splits));
  parallel_for(static_cast<std::size_t>(splits), threads, [&](std::size_t j) {
    std::vector<std::uint32_t> order(num_items);
    std::iota(order.begin(), order.end(), 0u);
    const auto column = item_factors.col(static_cast<Eigen::Index>(j));
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (column(a) != column(b)) return column(a) < column(b);
      return a < b;
    });
    for (std::size_t rank = 0; rank < num_items; ++rank) {
      const auto bucket = rank * static_cast<std::size_t>(codebook_size) / num_items;
      codes[order[rank] * static_cast<std::size_t>(splits) + j] = static_cast<Code>(bucket);
    }
  });
  return Codebook(splits, codebook_size, sub_dim, num_items, std::move(codes),
                  item_factors, singular_values);
}

Codebook build_codebook(const EventLog& train, const CodebookConfig& config) {
  if (train.empty()) throw EmptyLog("cannot build a codebook from an empty train log");
  if (config.embedding_dim < config.splits || config.embedding_dim % config.splits != 0) {
    throw DimensionMismatch("embedding dimension " + std::to_string(config.embedding_dim) +
                            " is not a multiple of " + std::to_string(config.splits) +
                            " splits");
  }
  const SparseMatrix matrix = build_interaction_matrix(train);
  SvdOptions options;
  options.rank = config.splits;
  options.seed = config.svd_seed;
  options.tol = config.svd_tol;
  options.max_iter = config.svd_max_iter;
  const TruncatedSvd svd = truncated_svd(matrix, options);
  return assign_codes(svd.item_factors, svd.singular_values, config.codebook_size,
                      config.embedding_dim / config.splits, config.threads);
}

SubEmbeddingTable::SubEmbeddingTable(std::vector<Eigen::MatrixXd> tables)
    : tables_(std::move(tables)) {}

SubEmbeddingTable SubEmbeddingTable::random(const Codebook& cb, std::uint64_t seed) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(cb.embedding_dim()));
  std::vector<Eigen::MatrixXd> tables;
  for (int j = 0; j < cb.splits(); ++j) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    Eigen::MatrixXd t(cb.codebook_size(), cb.sub_dim());
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = rng.uniform(-bound, bound);
    }
    tables.push_back(std::move(t));
  }
  return SubEmbeddingTable(std::move(tables));
}

Eigen::VectorXd reconstruct_embedding(const Codebook& cb, const SubEmbeddingTable& table,
                                      std::size_t item) {
  if (table.splits() != cb.splits()) {
    throw DimensionMismatch("embedding table has " + std::to_string(table.splits()) +
                            " splits, codebook has " + std::to_string(cb.splits()));
  }
  const auto code = cb.code_of(item);
  Eigen::VectorXd out(cb.embedding_dim());
  for (int j = 0; j < cb.splits(); ++j) {
    const auto& t = table.split(j);
    if (t.rows() != cb.codebook_size() || t.cols() != cb.sub_dim()) {
      throw DimensionMismatch("sub-embedding table shape does not match the codebook");
    }
    out.segment(j * cb.sub_dim(), cb.sub_dim()) = t.row(code[j]).transpose();
  }
  return out;
}

void write_codebook(std::ostream& out, const Codebook& cb, const IdIndex& items) {
  if (items.size() != cb.num_items()) {
    throw DimensionMismatch("item index does not match the codebook");
  }
  out << "#subpop-codebook\tv1\tm=" << cb.splits() << "\tV=" << cb.codebook_size()
      << "\tsub_dim=" << cb.sub_dim() << '\n';
  out << "#sigma";
  std::ostringstream value;
  value.precision(17);
  for (Eigen::Index j = 0; j < cb.singular_values().size(); ++j) {
    value.str("");
    value << cb.singular_values()(j);
    out << '\t' << value.str();
  }
  out << '\n';
  for (std::size_t i = 0; i < cb.num_items(); ++i) {
    out << items.id(static_cast<std::uint32_t>(i));
    for (const Code c : cb.code_of(i)) out << '\t' << c;
    out << '\n';
  }
}

Codebook read_codebook(std::istream& in, const IdIndex& items) {
  std::string line;
  std::size_t row = 1;
  if (!std::getline(in, line)) throw ParseError(row, "missing codebook header");
  int splits = 0;
  int size = 0;
  int sub_dim = 0;
  if (std::sscanf(line.c_str(), "#subpop-codebook\tv1\tm=%d\tV=%d\tsub_dim=%d", &splits,
                  &size, &sub_dim) != 3) {
    throw ParseError(row, "unsupported codebook header");
  }
  ++row;
  if (!std::getline(in, line) || line.rfind("#sigma", 0) != 0) {
    throw ParseError(row, "missing singular-value line");
  }
  std::vector<double> sigma;
  {
    std::istringstream fields(line.substr(6));
    double s = 0.0;
    while (fields >> s) sigma.push_back(s);
  }
  std::vector<Code> codes(items.size() * static_cast<std::size_t>(splits));
  std::vector<bool> seen(items.size(), false);
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id;
    std::getline(fields, id, '\t');
    const auto item = items.find(id);
    if (!item) throw ParseError(row, "unknown item '" + id + "'");
    if (seen[*item]) throw ParseError(row, "duplicate item '" + id + "'");
    seen[*item] = true;
    for (int j = 0; j < splits; ++j) {
      long long c = -1;
      if (!(fields >> c) || c < 0 || c >= size) throw ParseError(row, "bad code");
      codes[*item * static_cast<std::size_t>(splits) + static_cast<std::size_t>(j)] =
          static_cast<Code>(c);
    }
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ParseError(row, "codebook does not cover every item");
  }
  Eigen::VectorXd singular_values =
      Eigen::Map<Eigen::VectorXd>(sigma.data(), static_cast<Eigen::Index>(sigma.size()));
  return Codebook(splits, size, sub_dim, items.size(), std::move(codes), {},
                  std::move(singular_values));
}

}  // namespace subpop

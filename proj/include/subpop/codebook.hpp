#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "subpop/dataset.hpp"
#include "subpop/svd.hpp"

namespace subpop {

using Code = std::uint32_t;

// Sub-item codebook: every item maps to an m-tuple of codes in [0, V). The
// SVD factors that produced the assignment are kept alongside (they are empty
// for a codebook read back from disk).
class Codebook {
 public:
  Codebook() = default;
  Codebook(int splits, int codebook_size, int sub_dim, std::size_t num_items,
           std::vector<Code> codes, Eigen::MatrixXd item_factors = {},
           Eigen::VectorXd singular_values = {});

  int splits() const { return splits_; }
  int codebook_size() const { return codebook_size_; }
  int sub_dim() const { return sub_dim_; }
  int embedding_dim() const { return splits_ * sub_dim_; }
  std::size_t num_items() const { return num_items_; }

  // Throws IndexOutOfRange for item >= num_items().
  std::span<const Code> code_of(std::size_t item) const;
  Code code(std::size_t item, int split) const {
    return codes_[item * static_cast<std::size_t>(splits_) + static_cast<std::size_t>(split)];
  }
  std::span<const Code> codes() const { return codes_; }

  const Eigen::MatrixXd& item_factors() const { return item_factors_; }
  const Eigen::VectorXd& singular_values() const { return singular_values_; }

 private:
  int splits_ = 0;
  int codebook_size_ = 0;
  int sub_dim_ = 0;
  std::size_t num_items_ = 0;
  std::vector<Code> codes_;  // row-major num_items x splits
  Eigen::MatrixXd item_factors_;
  Eigen::VectorXd singular_values_;
};

// Binary user x item matrix: 1 where the user touched the item in `train`.
SparseMatrix build_interaction_matrix(const EventLog& train);

// Each split j sorts items by factor column j (ties by item index) and cuts
// the order into V contiguous equal-frequency buckets; the bucket rank is the
// code. Splits are processed independently, optionally in parallel.
Codebook assign_codes(const Eigen::MatrixXd& item_factors,
                      const Eigen::VectorXd& singular_values, int codebook_size,
                      int sub_dim = 8, unsigned threads = 1);

struct CodebookConfig {
  int splits = 32;
  int codebook_size = 256;
  int embedding_dim = 256;
  std::uint64_t svd_seed = 0;
  double svd_tol = 1e-7;
  int svd_max_iter = 300;
  unsigned threads = 1;
};

// Interaction matrix -> rank-m truncated SVD -> per-split quantile codes.
Codebook build_codebook(const EventLog& train, const CodebookConfig& config);

// One V x sub_dim table per split.
class SubEmbeddingTable {
 public:
  SubEmbeddingTable() = default;
  explicit SubEmbeddingTable(std::vector<Eigen::MatrixXd> tables);

  // Entries uniform in [-1/sqrt(d), 1/sqrt(d)], d = m * sub_dim.
  static SubEmbeddingTable random(const Codebook& cb, std::uint64_t seed);

  int splits() const { return static_cast<int>(tables_.size()); }
  const Eigen::MatrixXd& split(int j) const { return tables_.at(static_cast<std::size_t>(j)); }

 private:
  std::vector<Eigen::MatrixXd> tables_;
};

// Concatenation of table[j].row(code_j(item)) over the splits.
Eigen::VectorXd reconstruct_embedding(const Codebook& cb, const SubEmbeddingTable& table,
                                      std::size_t item);

// TSV: a version header, a singular-value line, then `item_id, z_1 .. z_m`
// per item in dense index order.
void write_codebook(std::ostream& out, const Codebook& cb, const IdIndex& items);
Codebook read_codebook(std::istream& in, const IdIndex& items);

}  // namespace subpop

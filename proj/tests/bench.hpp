#pragma once

// End-to-end pipeline over synthetic data, shared by the experiment tests
// and the acceptance runner.

#include <memory>
#include <string>

#include "subpop/codebook.hpp"
#include "subpop/dataset.hpp"
#include "subpop/experiment.hpp"
#include "subpop/scorer.hpp"
#include "subpop/synth.hpp"

namespace fixture {

struct Bench {
  subpop::TemporalSplit split;
  std::shared_ptr<const subpop::Codebook> codebook;
  std::unique_ptr<subpop::BaseScorer> scorer;

  subpop::Pipeline pipeline() const { return {&split, codebook.get(), scorer.get()}; }
};

enum class Base { kGlobalPop, kMarkov, kSvdDot };

inline Bench make_bench(const subpop::EventLog& log, const subpop::CodebookConfig& cb,
                        Base base = Base::kMarkov, double holdout = 0.1) {
  Bench b;
  b.split = subpop::temporal_split(log, holdout);
  b.codebook = std::make_shared<subpop::Codebook>(subpop::build_codebook(b.split.train, cb));
  switch (base) {
    case Base::kGlobalPop:
      b.scorer = std::make_unique<subpop::GlobalPopularityScorer>(b.split.train);
      break;
    case Base::kMarkov:
      b.scorer = std::make_unique<subpop::MarkovScorer>(b.split.train, 0.0);
      break;
    case Base::kSvdDot:
      b.scorer = std::make_unique<subpop::SvdDotScorer>(
          b.codebook, subpop::SubEmbeddingTable::random(*b.codebook, cb.svd_seed));
      break;
  }
  return b;
}

inline Bench make_bench(const subpop::SynthConfig& synth, const subpop::CodebookConfig& cb,
                        Base base = Base::kMarkov) {
  return make_bench(subpop::generate(synth), cb, base);
}

}  // namespace fixture

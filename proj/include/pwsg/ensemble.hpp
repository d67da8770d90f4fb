#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "pwsg/apparatus.hpp"

namespace pwsg {

/// Tallies of an ensemble run.  Keys are the per-stage outcome signs of
/// surviving particles; discarded particles are counted separately, so
/// the counts plus n_discarded always total n_total.
struct RunStats {
  std::map<std::vector<int>, std::uint64_t> counts;
  std::uint64_t n_total = 0;
  std::uint64_t n_discarded = 0;
  std::uint64_t seed = 0;
  std::uint64_t n_survived() const { return n_total - n_discarded; }
};

/// n initial offsets, uniform over the packet width, from the documented
/// counter scheme (stream 0, counters 0..n-1).  Identical on every call.
std::vector<double> sample_initial(std::uint64_t n, double w,
                                   std::uint64_t seed);

/// Run n independent particles down the chain.  Stage j draws its offsets
/// from stream j, so editing one stage never perturbs another stage's
/// samples, and any evaluation order gives the same tallies.
RunStats run_ensemble(const ExperimentChain& chain, std::uint64_t n,
                      std::uint64_t seed,
                      TransverseMode mode = TransverseMode::FreshSample);

/// Same run with a per-particle observer (index, offsets used, result),
/// for callers that also want a particle-level table.
using ChainObserver = std::function<void(
    std::uint64_t, std::span<const double>, const ChainResult&)>;
RunStats run_ensemble(const ExperimentChain& chain, std::uint64_t n,
                      std::uint64_t seed, TransverseMode mode,
                      const ChainObserver& observer);

/// Quantum-mechanical prediction for the chain: probability of each
/// surviving outcome sequence (amplitudes composed stage by stage) and the
/// total survival probability.
struct ChainDistribution {
  std::map<std::vector<int>, double> p_sequence;  // joint with survival
  double p_survive = 0.0;
};

ChainDistribution chain_outcome_distribution(const ExperimentChain& chain);

struct BornRow {
  std::vector<int> labels;
  std::uint64_t count = 0;
  double freq = 0.0;       // among survivors
  double predicted = 0.0;  // conditional on survival
  double stderr_ = 0.0;    // binomial, sqrt(p(1-p)/n)
  double z = 0.0;
};

/// Frequencies vs. predictions with binomial z-scores; any |z| > 4 sets
/// fail.  Survival itself is z-tested the same way.
struct BornReport {
  std::vector<BornRow> rows;
  std::uint64_t n_survived = 0;
  double survival_freq = 0.0;
  double survival_predicted = 0.0;
  double survival_z = 0.0;
  bool fail = false;
};

BornReport compare_to_born(const RunStats& stats,
                           const ExperimentChain& chain);

}  // namespace pwsg

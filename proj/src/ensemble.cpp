#include "pwsg/ensemble.hpp"

#include <cmath>
#include <limits>

#include "pwsg/rng.hpp"

namespace pwsg {

std::vector<double> sample_initial(std::uint64_t n, double w,
                                   std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i)
    out.push_back(uniform_symmetric(seed, 0, i, 0.5 * w));
  return out;
}

RunStats run_ensemble(const ExperimentChain& chain, std::uint64_t n,
                      std::uint64_t seed, TransverseMode mode) {
  return run_ensemble(chain, n, seed, mode, nullptr);
}

RunStats run_ensemble(const ExperimentChain& chain, std::uint64_t n,
                      std::uint64_t seed, TransverseMode mode,
                      const ChainObserver& observer) {
  chain.validate();
  RunStats stats;
  stats.n_total = n;
  stats.seed = seed;
  std::vector<double> z0s(chain.stages.size());
  std::vector<int> signs;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < chain.stages.size(); ++j)
      z0s[j] = uniform_symmetric(seed, j, i, 0.5 * chain.stages[j].device.w);
    const ChainResult r = run_chain(chain, z0s, mode);
    if (observer) observer(i, z0s, r);
    if (r.discarded) {
      ++stats.n_discarded;
      continue;
    }
    signs.clear();
    for (const OutcomeLabel& l : r.labels) signs.push_back(l.sign);
    ++stats.counts[signs];
  }
  return stats;
}

namespace {

void accumulate(const ExperimentChain& chain, std::size_t stage_idx,
                const Spinor& guide, double prob, std::vector<int>& prefix,
                ChainDistribution& dist) {
  if (stage_idx == chain.stages.size()) {
    dist.p_sequence[prefix] += prob;
    dist.p_survive += prob;
    return;
  }
  const Stage& stage = chain.stages[stage_idx];
  const auto [p_plus, p_minus] = born_probabilities(guide, stage.device.axis);
  const auto chi = eigenspinors(stage.device.axis);
  for (const int sign : {+1, -1}) {
    const double p = sign > 0 ? p_plus : p_minus;
    if (p == 0.0) continue;
    // Which port this outcome leaves through depends on polarity.
    const bool upper =
        (sign > 0) == (stage.device.polarity == Polarity::Standard);
    if ((stage.selection == Selection::KeepUpperPort && !upper) ||
        (stage.selection == Selection::KeepLowerPort && upper))
      continue;  // probability mass discarded here
    prefix.push_back(sign);
    accumulate(chain, stage_idx + 1, sign > 0 ? chi.plus : chi.minus,
               prob * p, prefix, dist);
    prefix.pop_back();
  }
}

}  // namespace

ChainDistribution chain_outcome_distribution(const ExperimentChain& chain) {
  chain.validate();
  ChainDistribution dist;
  std::vector<int> prefix;
  accumulate(chain, 0, chain.input, 1.0, prefix, dist);
  return dist;
}

namespace {

double z_score(double freq, double p, std::uint64_t n) {
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  if (se == 0.0)
    return freq == p ? 0.0 : std::numeric_limits<double>::infinity();
  return (freq - p) / se;
}

}  // namespace

BornReport compare_to_born(const RunStats& stats,
                           const ExperimentChain& chain) {
  const ChainDistribution dist = chain_outcome_distribution(chain);
  BornReport report;
  report.n_survived = stats.n_survived();
  report.survival_predicted = dist.p_survive;
  if (stats.n_total == 0) return report;  // empty report, nothing to test

  report.survival_freq = static_cast<double>(report.n_survived) /
                         static_cast<double>(stats.n_total);
  report.survival_z =
      z_score(report.survival_freq, dist.p_survive, stats.n_total);
  if (std::abs(report.survival_z) > 4.0) report.fail = true;

  // Union of observed and predicted sequences, in map order.
  std::map<std::vector<int>, std::uint64_t> merged;
  for (const auto& [labels, count] : stats.counts) merged[labels] = count;
  for (const auto& [labels, p] : dist.p_sequence) merged.emplace(labels, 0);

  for (const auto& [labels, count] : merged) {
    BornRow row;
    row.labels = labels;
    row.count = count;
    const auto it = dist.p_sequence.find(labels);
    const double joint = it == dist.p_sequence.end() ? 0.0 : it->second;
    row.predicted = dist.p_survive == 0.0 ? 0.0 : joint / dist.p_survive;
    if (report.n_survived > 0) {
      row.freq = static_cast<double>(count) /
                 static_cast<double>(report.n_survived);
      row.stderr_ = std::sqrt(row.predicted * (1.0 - row.predicted) /
                              static_cast<double>(report.n_survived));
      row.z = z_score(row.freq, row.predicted, report.n_survived);
      if (std::abs(row.z) > 4.0) report.fail = true;
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace pwsg

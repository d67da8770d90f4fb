#include "pwsg/apparatus.hpp"

#include <algorithm>
#include <cmath>

#include "pwsg/errors.hpp"

namespace pwsg {

bool operator==(const OutcomeLabel& a, const OutcomeLabel& b) {
  return a.axis.theta == b.axis.theta && a.sign == b.sign;
}

OutcomeLabel label_outcome(Branch branch, const DeviceConfig& d) {
  const bool upper = branch == Branch::Upper;
  const bool standard = d.polarity == Polarity::Standard;
  return {d.axis, upper == standard ? +1 : -1};
}

void ExperimentChain::validate() const {
  if (stages.empty()) throw ConfigError("chain has no stages");
  if (!input.is_normalized())
    throw ConfigError("chain input spinor is not normalized");
  for (std::size_t i = 0; i + 1 < stages.size(); ++i) {
    if (stages[i].selection == Selection::MeasureBoth)
      throw ConfigError("only the last stage may measure both ports");
  }
}

namespace {

// Offset of the exit point within the exit band, measured from the band
// center.  Initial offsets uniform over the slice feeding one branch map
// affinely onto the full band width, so a uniform packet stays uniform --
// this is what makes CarryThrough statistically identical to FreshSample.
double exit_band_offset(const TrajectoryRecord& rec, const WaveField& field) {
  const double half = 0.5 * field.device().w;
  const double weight = rec.exit_branch == Branch::Upper
                            ? std::norm(field.a_plus())
                            : std::norm(field.a_minus());
  if (weight <= 0.0)  // only reachable via the measure-zero critical tie
    return rec.exit_branch == Branch::Upper ? half : -half;
  const double depth = rec.exit_branch == Branch::Upper
                           ? (half - rec.z0) / weight
                           : (half + rec.z0) / weight;
  const double off = rec.exit_branch == Branch::Upper ? half - depth
                                                      : depth - half;
  return std::clamp(off, -half, half);
}

}  // namespace

WaveField make_device_field(const Spinor& s, const DeviceConfig& d) {
  const auto [cp, cm] = decompose(s, d.axis);
  // The field is built in canonical orientation: its a_plus rides the
  // upper band.  Reversal swaps which spin component that is.
  return d.polarity == Polarity::Reversed ? WaveField(d, cm, cp)
                                          : WaveField(d, cp, cm);
}

PassResult pass_device(const Spinor& s, double z0, const DeviceConfig& d) {
  const WaveField field = make_device_field(s, d);

  PassResult r;
  const double reach = d.overlap_extent();
  r.record = propagate_analytic(z0, field, -reach, 2.0 * reach);
  r.branch = r.record.exit_branch;
  r.label = label_outcome(r.branch, d);
  const auto chi = eigenspinors(d.axis);
  r.post_spinor = r.label.sign > 0 ? chi.plus : chi.minus;
  r.exit_offset = exit_band_offset(r.record, field);
  return r;
}

ChainResult run_chain(const ExperimentChain& chain,
                      std::span<const double> z0_per_stage,
                      TransverseMode mode) {
  chain.validate();
  if (z0_per_stage.size() != chain.stages.size())
    throw ConfigError("need one transverse offset per stage");

  ChainResult result;
  Spinor guide = chain.input;
  double next_z0 = z0_per_stage[0];
  for (std::size_t i = 0; i < chain.stages.size(); ++i) {
    const Stage& stage = chain.stages[i];
    const double z0 =
        mode == TransverseMode::CarryThrough ? next_z0 : z0_per_stage[i];
    PassResult pass = pass_device(guide, z0, stage.device);
    result.labels.push_back(pass.label);

    if ((stage.selection == Selection::KeepUpperPort &&
         pass.branch != Branch::Upper) ||
        (stage.selection == Selection::KeepLowerPort &&
         pass.branch != Branch::Lower)) {
      result.discarded = true;
      result.discard_stage = static_cast<int>(i);
      result.records.push_back(std::move(pass.record));
      return result;
    }

    guide = pass.post_spinor;
    if (mode == TransverseMode::CarryThrough && i + 1 < chain.stages.size()) {
      // Rescale the band offset if the next packet has a different width.
      const double scale = chain.stages[i + 1].device.w / stage.device.w;
      next_z0 = pass.exit_offset * scale;
    }
    result.records.push_back(std::move(pass.record));
  }
  return result;
}

}  // namespace pwsg

#include "gateminer/pipeline.hpp"

#include <map>

namespace gateminer {

ThresholdSweep effective_sweep(const Recording& rec, const ExtractOptions& opts) {
  if (opts.sweep) return *opts.sweep;
  if (!rec.meta.thresholds_mv.empty()) return ThresholdSweep{rec.meta.thresholds_mv};
  return ThresholdSweep::standard();
}

std::vector<ExtractionRecord> extract_records(const Recording& rec, const ExtractOptions& opts) {
  std::vector<std::string> channels = opts.channels.empty() ? std::vector<std::string>{rec.meta.output_channel} : opts.channels;
  for (const auto& c : channels) {
    if (!rec.find_channel(c)) throw SignalError(SignalErrorKind::UnknownChannel, "no channel \"" + c + "\"");
  }
  const auto windows = segment(rec, opts.segments);
  const auto sweep = sweep_bits(windows, channels, effective_sweep(rec, opts), opts.peaks);

  // Thresholds frequently agree; minimise each distinct table once.
  std::map<std::string, SopExpression> minimized;
  std::vector<ExtractionRecord> out;
  for (const auto& tb : sweep) {
    for (const auto& cb : tb.channels) {
      auto it = minimized.find(cb.bits);
      const auto tt = table_from_bits(rec.meta.n_inputs, cb.bits);
      if (it == minimized.end()) it = minimized.emplace(cb.bits, minimize(tt, opts.minimize)).first;
      out.push_back(make_record(rec.meta.repeat_index, tb.threshold_mv, cb.channel, tt, it->second));
    }
  }
  return out;
}

StateGraph recording_state_graph(const Recording& rec, double threshold_mv, std::vector<std::string> channels,
                                 StateNodeMode mode, const PeakOptions& peaks, const SegmentOptions& segments) {
  if (channels.empty()) channels = rec.channel_names();
  const auto windows = segment(rec, segments);
  const auto sweep = sweep_bits(windows, channels, ThresholdSweep{{threshold_mv}}, peaks);
  std::vector<std::pair<InputState, std::string>> outputs;
  for (const auto& w : windows) {
    std::string out;
    for (const auto& cb : sweep.front().channels) out.push_back(cb.bits[w.state.ordinal]);
    outputs.emplace_back(w.state, std::move(out));
  }
  return build_state_graph(outputs, mode);
}

}  // namespace gateminer

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gateminer/census.hpp"
#include "gateminer/circuit.hpp"
#include "gateminer/logic.hpp"
#include "gateminer/recording.hpp"
#include "gateminer/signal.hpp"

namespace gateminer {

struct ExtractOptions {
  /// Defaults to the manifest thresholds, or the standard sweep when the
  /// manifest lists none.
  std::optional<ThresholdSweep> sweep;
  /// Empty = the manifest's output channel only.
  std::vector<std::string> channels;
  PeakOptions peaks;
  SegmentOptions segments;
  MinimizeOptions minimize;
};

ThresholdSweep effective_sweep(const Recording& rec, const ExtractOptions& opts);

/// Records ordered by threshold, then channel selection order.
std::vector<ExtractionRecord> extract_records(const Recording& rec, const ExtractOptions& opts = {});

/// State graph at one threshold; each node is the concatenated bits of
/// `channels` (all recording channels when empty) at one input state.
StateGraph recording_state_graph(const Recording& rec, double threshold_mv, std::vector<std::string> channels = {},
                                 StateNodeMode mode = StateNodeMode::MergedOutputs, const PeakOptions& peaks = {},
                                 const SegmentOptions& segments = {});

}  // namespace gateminer

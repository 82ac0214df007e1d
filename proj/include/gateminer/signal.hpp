#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gateminer/recording.hpp"

namespace gateminer {

struct ChannelSlice {
  std::string name;
  std::vector<double> samples;
};

/// Samples of one input state, [begin, end) in recording indices.
struct StateWindow {
  InputState state;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<ChannelSlice> channels;

  std::size_t size() const { return end - begin; }
  const ChannelSlice* find_channel(const std::string& name) const;
};

struct PeakEvent {
  std::string channel;
  std::size_t sample_index = 0;
  /// Signed, relative to the band baseline.
  double amplitude_v = 0.0;

  friend bool operator==(const PeakEvent&, const PeakEvent&) = default;
};

struct ThresholdSweep {
  std::vector<double> thresholds_mv;

  /// 100, 150, ..., 550 mV.
  static ThresholdSweep standard();
  void validate() const;
};

enum class PeakPolicy {
  /// Out-of-band sample that is also a local extremum of |signal|.
  Extremum,
  /// Every out-of-band sample.
  AnyExcursion,
};

std::string to_string(PeakPolicy policy);
PeakPolicy peak_policy_from_string(const std::string& text);

struct PeakOptions {
  PeakPolicy policy = PeakPolicy::Extremum;
  double baseline_v = 0.0;
};

struct SegmentOptions {
  /// Rising-edge level for the sync trace; defaults to the midpoint between
  /// its minimum and maximum.
  std::optional<double> sync_threshold_v;
};

enum class SignalErrorKind { EdgeCountMismatch, TraceTooShort, UnknownChannel, BadThreshold };

std::string to_string(SignalErrorKind kind);

class SignalError : public std::runtime_error {
 public:
  SignalError(SignalErrorKind kind, const std::string& message);
  SignalErrorKind kind() const { return kind_; }

 private:
  SignalErrorKind kind_;
};

/// Indices i with sync[i] > level and (i == 0 or sync[i-1] <= level).
std::vector<std::size_t> sync_rising_edges(const std::vector<double>& sync, double level);

std::vector<StateWindow> segment(const Recording& rec, const SegmentOptions& opts = {});

std::vector<PeakEvent> detect_peaks(const StateWindow& window, const std::string& channel, double threshold_mv,
                                    const PeakOptions& opts = {});

struct ChannelBits {
  std::string channel;
  /// Character i is the output at state ordinal i.
  std::string bits;
  /// Peaks paired with the ordinal of the state they fell in.
  std::vector<std::pair<InputState, PeakEvent>> peaks;
};

struct ThresholdBits {
  double threshold_mv = 0.0;
  std::vector<ChannelBits> channels;

  const ChannelBits& channel(const std::string& name) const;
};

/// One entry per threshold, ascending; channels in recording order.
std::vector<ThresholdBits> sweep_bits(const Recording& rec, const ThresholdSweep& sweep, const PeakOptions& peak_opts = {},
                                      const SegmentOptions& seg_opts = {});

/// Same as above over already segmented windows.
std::vector<ThresholdBits> sweep_bits(const std::vector<StateWindow>& windows, const std::vector<std::string>& channels,
                                      const ThresholdSweep& sweep, const PeakOptions& peak_opts = {});

/// `[{threshold_mv, channel, bits, peaks:[{state, index, amplitude_v}]}, ...]`
std::string sweep_to_json(const std::vector<ThresholdBits>& sweep);

}  // namespace gateminer

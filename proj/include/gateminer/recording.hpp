#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gateminer {

/// Largest supported input width. 2^16 states is far beyond any recording
/// the acquisition hardware produces.
inline constexpr int kMaxInputs = 16;

enum class SyncMode { Channel, None };

std::string to_string(SyncMode mode);
SyncMode sync_mode_from_string(const std::string& text);

/// Run metadata stored next to each recording as `<stem>.manifest.json`.
struct RunManifest {
  int n_inputs = 2;
  double state_duration_s = 15.0;
  double sample_rate_hz = 1.0;
  std::uint64_t repeat_index = 0;
  std::vector<double> thresholds_mv;
  std::string output_channel = "ch0";
  SyncMode sync = SyncMode::Channel;
  /// Name of the pseudo-random algorithm for synthetic recordings, empty
  /// for measured data.
  std::string generator;

  /// Number of input states, 2^n_inputs.
  std::size_t state_count() const { return std::size_t{1} << n_inputs; }
  /// Nominal samples per input state, rounded to the nearest sample.
  std::size_t samples_per_state() const;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

struct Trace {
  std::string name;
  std::vector<double> samples;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Multichannel voltage recording (volts) with an optional sync track.
struct Recording {
  double sample_rate_hz = 1.0;
  std::vector<Trace> channels;
  std::optional<std::vector<double>> sync;
  RunManifest meta;

  std::size_t length() const;
  const Trace* find_channel(const std::string& name) const;
  const Trace& channel(const std::string& name) const;
  std::vector<std::string> channel_names() const;

  friend bool operator==(const Recording&, const Recording&) = default;
};

/// One applied input combination. Bit 0 of the display string is input A,
/// which is the most significant bit of the ordinal.
struct InputState {
  int width = 0;
  std::uint32_t ordinal = 0;

  std::string bits() const;
  /// Value of input `var` (0 = A).
  bool input(int var) const { return (ordinal >> (width - 1 - var)) & 1U; }

  static InputState from_bits(const std::string& bits);

  friend bool operator==(const InputState&, const InputState&) = default;
};

enum class RecordingErrorKind {
  MalformedHeader,
  RaggedRow,
  NonMonotoneTime,
  MissingSync,
  BadValue,
  MissingManifest,
  BadManifest,
  InvariantViolation,
  Io,
};

std::string to_string(RecordingErrorKind kind);

class RecordingError : public std::runtime_error {
 public:
  RecordingError(RecordingErrorKind kind, const std::string& message,
                 std::optional<std::size_t> row = std::nullopt);

  RecordingErrorKind kind() const { return kind_; }
  /// 1-based data row index for row-level errors.
  std::optional<std::size_t> row() const { return row_; }

 private:
  RecordingErrorKind kind_;
  std::optional<std::size_t> row_;
};

/// Throws RecordingError(BadManifest) when a manifest invariant fails.
void validate(const RunManifest& manifest);
/// Throws RecordingError(InvariantViolation) when a recording invariant fails.
void validate(const Recording& rec);

struct ReadResult {
  Recording recording;
  std::vector<std::string> warnings;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path);

ReadResult read_recording_with_warnings(const std::filesystem::path& path);
Recording read_recording(const std::filesystem::path& path);
void write_recording(const Recording& rec, const std::filesystem::path& path);

std::string manifest_to_json(const RunManifest& manifest, double sample_rate_hz);
RunManifest manifest_from_json(const std::string& text, double* sample_rate_hz = nullptr);

/// All 2^n input states in counting order.
std::vector<InputState> state_schedule(const RunManifest& manifest);
std::vector<InputState> state_schedule(int n_inputs);

}  // namespace gateminer

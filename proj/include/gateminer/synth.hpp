#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gateminer/logic.hpp"
#include "gateminer/recording.hpp"

namespace gateminer {

/// Identifier written to the manifest `generator` field.
inline constexpr const char* kGeneratorName = "mt19937_64/boxmuller";

/// Portable sampling on top of std::mt19937_64, whose output sequence is
/// fixed by the standard. The std distributions are not, so the transforms
/// are spelled out here.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// [0, n)
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Box-Muller, one draw per call (the second variate is discarded).
  double normal(double mean, double sd);

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finaliser.
std::uint64_t splitmix64(std::uint64_t x);
/// Per-recording seed: splitmix64(seed ^ splitmix64(repeat_index)).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t repeat_index);

struct SynthChannel {
  std::string name;
  TruthTable target;
};

struct SynthConfig {
  int n_inputs = 2;
  double state_duration_s = 15.0;
  double sample_rate_hz = 1.0;
  std::vector<SynthChannel> channels;
  /// Spike magnitude is uniform in [mean - spread, mean + spread].
  double spike_mean_mv = 450.0;
  double spike_spread_mv = 50.0;
  double noise_sd_mv = 20.0;
  double flip_probability = 0.0;
  std::uint64_t seed = 0;
  int burst_count = 1;
  std::optional<double> recoverable_up_to_mv;
  double sync_amplitude_v = 5.0;
  /// Written to the manifest; empty means the standard sweep.
  std::vector<double> thresholds_mv;
  /// Defaults to the first channel.
  std::string output_channel;
  std::uint64_t repeat_index = 0;

  /// Largest threshold guaranteed to see every spike: mean - 3 * spread.
  double clean_threshold_limit_mv() const { return spike_mean_mv - 3.0 * spike_spread_mv; }
};

class SynthError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const SynthConfig& cfg);

/// Draw order (per call): for each channel in order, for each state in
/// ordinal order: one flip draw when flip_probability > 0; if the state is
/// active, per burst an index, a magnitude and a sign draw. Then, when
/// noise_sd_mv > 0, one normal draw per sample, channel by channel.
Recording generate(const SynthConfig& cfg);

struct FixtureItem {
  TruthTable table;
  std::size_t count = 0;
};

/// One noiseless, flip-free recording per (table, occurrence); recording k
/// gets repeat_index k and seed derive_seed(cfg.seed, k). The target
/// replaces the output channel's table.
std::vector<Recording> generate_census_fixture(const std::vector<FixtureItem>& spec, const SynthConfig& cfg);

SynthConfig synth_config_from_json(const std::string& text);
/// `[{bits, count}, ...]`
std::vector<FixtureItem> fixture_spec_from_json(const std::string& text);

}  // namespace gateminer

#include "gateminer/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>

#include <nlohmann/json.hpp>

#include "gateminer/signal.hpp"

namespace gateminer {

double SynthRng::normal(double mean, double sd) {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t repeat_index) {
  return splitmix64(seed ^ splitmix64(repeat_index));
}

void validate(const SynthConfig& cfg) {
  auto fail = [](const std::string& msg) { throw SynthError("invalid synth config: " + msg); };
  if (cfg.n_inputs < 1 || cfg.n_inputs > kMaxInputs) fail("n_inputs must be in 1.." + std::to_string(kMaxInputs));
  if (!(cfg.state_duration_s > 0.0)) fail("state_duration_s must be positive");
  if (!(cfg.sample_rate_hz > 0.0)) fail("sample_rate_hz must be positive");
  if (std::round(cfg.state_duration_s * cfg.sample_rate_hz) < 1.0) fail("a state must span at least one sample");
  if (cfg.channels.empty()) fail("at least one channel target is required");
  std::set<std::string> names;
  for (const auto& ch : cfg.channels) {
    if (ch.name.empty() || !names.insert(ch.name).second) fail("channel names must be unique and non-empty");
    if (ch.target.n_inputs() != cfg.n_inputs) fail("channel \"" + ch.name + "\" target width differs from n_inputs");
  }
  if (!cfg.output_channel.empty() && !names.count(cfg.output_channel)) fail("output_channel is not a channel");
  if (!(cfg.spike_mean_mv > 0.0)) fail("spike mean must be positive");
  if (!(cfg.spike_spread_mv >= 0.0)) fail("spike spread must be non-negative");
  if (!(cfg.spike_mean_mv - cfg.spike_spread_mv > 0.0)) fail("spike mean must exceed its spread");
  if (!(cfg.noise_sd_mv >= 0.0)) fail("noise_sd_mv must be non-negative");
  if (!(cfg.flip_probability >= 0.0 && cfg.flip_probability <= 1.0)) fail("flip_probability must lie in [0, 1]");
  if (cfg.burst_count < 1) fail("burst_count must be >= 1");
  if (!(cfg.sync_amplitude_v > 0.0)) fail("sync_amplitude_v must be positive");
  if (cfg.recoverable_up_to_mv && !(cfg.clean_threshold_limit_mv() > *cfg.recoverable_up_to_mv)) {
    fail("spike mean - 3*spread must exceed recoverable_up_to_mv");
  }
  for (std::size_t i = 0; i < cfg.thresholds_mv.size(); ++i) {
    if (!(cfg.thresholds_mv[i] > 0.0) || (i > 0 && !(cfg.thresholds_mv[i] > cfg.thresholds_mv[i - 1]))) {
      fail("thresholds_mv must be positive and strictly ascending");
    }
  }
}

Recording generate(const SynthConfig& cfg) {
  validate(cfg);
  SynthRng rng(cfg.seed);

  Recording rec;
  rec.sample_rate_hz = cfg.sample_rate_hz;
  rec.meta.n_inputs = cfg.n_inputs;
  rec.meta.state_duration_s = cfg.state_duration_s;
  rec.meta.sample_rate_hz = cfg.sample_rate_hz;
  rec.meta.repeat_index = cfg.repeat_index;
  rec.meta.thresholds_mv = cfg.thresholds_mv.empty() ? ThresholdSweep::standard().thresholds_mv : cfg.thresholds_mv;
  rec.meta.output_channel = cfg.output_channel.empty() ? cfg.channels.front().name : cfg.output_channel;
  rec.meta.sync = SyncMode::Channel;
  rec.meta.generator = kGeneratorName;

  const std::size_t states = std::size_t{1} << cfg.n_inputs;
  const std::size_t per_state = rec.meta.samples_per_state();
  const std::size_t length = states * per_state;

  for (const auto& ch : cfg.channels) {
    std::vector<double> samples(length, 0.0);
    for (std::size_t s = 0; s < states; ++s) {
      bool active = ch.target[s];
      if (cfg.flip_probability > 0.0 && rng.bernoulli(cfg.flip_probability)) active = !active;
      if (!active) continue;
      // Bursts land on distinct samples.
      std::vector<std::size_t> free(per_state);
      for (std::size_t i = 0; i < per_state; ++i) free[i] = i;
      const std::size_t bursts = std::min<std::size_t>(static_cast<std::size_t>(cfg.burst_count), per_state);
      for (std::size_t b = 0; b < bursts; ++b) {
        const std::size_t pick = rng.index(free.size());
        const std::size_t offset = free[pick];
        free.erase(free.begin() + static_cast<std::ptrdiff_t>(pick));
        const double magnitude_mv =
            cfg.spike_mean_mv - cfg.spike_spread_mv + 2.0 * cfg.spike_spread_mv * rng.uniform();
        const double sign = rng.bernoulli(0.5) ? -1.0 : 1.0;
        samples[s * per_state + offset] = sign * magnitude_mv / 1000.0;
      }
    }
    rec.channels.push_back(Trace{ch.name, std::move(samples)});
  }
  if (cfg.noise_sd_mv > 0.0) {
    const double sd_v = cfg.noise_sd_mv / 1000.0;
    for (auto& t : rec.channels) {
      for (auto& v : t.samples) v += rng.normal(0.0, sd_v);
    }
  }

  std::vector<double> sync(length, 0.0);
  for (std::size_t s = 0; s < states; ++s) sync[s * per_state] = cfg.sync_amplitude_v;
  rec.sync = std::move(sync);
  validate(rec);
  return rec;
}

std::vector<Recording> generate_census_fixture(const std::vector<FixtureItem>& spec, const SynthConfig& cfg) {
  if (spec.empty()) throw SynthError("fixture spec is empty");
  SynthConfig base = cfg;
  base.noise_sd_mv = 0.0;
  base.flip_probability = 0.0;
  if (base.channels.empty()) base.channels.push_back(SynthChannel{"ch0", spec.front().table});
  const std::string target = base.output_channel.empty() ? base.channels.front().name : base.output_channel;

  std::vector<Recording> out;
  std::uint64_t k = 0;
  for (const auto& item : spec) {
    if (item.count < 1) throw SynthError("fixture counts must be >= 1");
    if (item.table.n_inputs() != base.n_inputs) throw SynthError("fixture table width differs from n_inputs");
    for (std::size_t c = 0; c < item.count; ++c, ++k) {
      SynthConfig one = base;
      for (auto& ch : one.channels) {
        if (ch.name == target) ch.target = item.table;
      }
      one.repeat_index = k;
      one.seed = derive_seed(cfg.seed, k);
      out.push_back(generate(one));
    }
  }
  return out;
}

namespace {

int width_from_bits(const std::string& bits) {
  if (bits.size() < 2 || !std::has_single_bit(bits.size())) {
    throw SynthError("bit string length must be a power of two >= 2, got " + std::to_string(bits.size()));
  }
  return std::countr_zero(bits.size());
}

}  // namespace

SynthConfig synth_config_from_json(const std::string& text) {
  SynthConfig cfg;
  try {
    auto j = nlohmann::json::parse(text);
    cfg.n_inputs = j.value("n_inputs", 2);
    cfg.state_duration_s = j.value("state_duration_s", cfg.state_duration_s);
    cfg.sample_rate_hz = j.value("sample_rate_hz", cfg.sample_rate_hz);
    if (j.contains("spike_amplitude_mv")) {
      const auto& a = j.at("spike_amplitude_mv");
      cfg.spike_mean_mv = a.value("mean", cfg.spike_mean_mv);
      cfg.spike_spread_mv = a.value("spread", cfg.spike_spread_mv);
    }
    cfg.noise_sd_mv = j.value("noise_sd_mv", cfg.noise_sd_mv);
    cfg.flip_probability = j.value("flip_probability", cfg.flip_probability);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.burst_count = j.value("burst_count", cfg.burst_count);
    if (j.contains("recoverable_up_to_mv")) cfg.recoverable_up_to_mv = j.at("recoverable_up_to_mv").get<double>();
    cfg.sync_amplitude_v = j.value("sync_amplitude_v", cfg.sync_amplitude_v);
    cfg.thresholds_mv = j.value("thresholds_mv", cfg.thresholds_mv);
    cfg.output_channel = j.value("output_channel", cfg.output_channel);
    cfg.repeat_index = j.value("repeat_index", cfg.repeat_index);
    if (j.contains("channels")) {
      std::size_t i = 0;
      for (const auto& cj : j.at("channels")) {
        std::string name = cj.value("name", "ch" + std::to_string(i));
        cfg.channels.push_back(SynthChannel{name, table_from_bits(cfg.n_inputs, cj.at("bits").get<std::string>())});
        ++i;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw SynthError(std::string("malformed synth config: ") + e.what());
  } catch (const LogicError& e) {
    throw SynthError(std::string("malformed synth config: ") + e.what());
  }
  return cfg;
}

std::vector<FixtureItem> fixture_spec_from_json(const std::string& text) {
  std::vector<FixtureItem> spec;
  try {
    auto arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw SynthError("fixture spec must be a JSON array");
    for (const auto& j : arr) {
      auto bits = j.at("bits").get<std::string>();
      auto count = j.at("count").get<std::int64_t>();
      if (count < 1) throw SynthError("fixture counts must be >= 1");
      spec.push_back(FixtureItem{table_from_bits(width_from_bits(bits), bits), static_cast<std::size_t>(count)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw SynthError(std::string("malformed fixture spec: ") + e.what());
  } catch (const LogicError& e) {
    throw SynthError(std::string("malformed fixture spec: ") + e.what());
  }
  if (spec.empty()) throw SynthError("fixture spec is empty");
  return spec;
}

}  // namespace gateminer

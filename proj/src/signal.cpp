#include "gateminer/signal.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace gateminer {

const ChannelSlice* StateWindow::find_channel(const std::string& name) const {
  for (const auto& c : channels) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ThresholdSweep ThresholdSweep::standard() {
  ThresholdSweep s;
  for (int mv = 100; mv <= 550; mv += 50) s.thresholds_mv.push_back(mv);
  return s;
}

void ThresholdSweep::validate() const {
  if (thresholds_mv.empty()) throw SignalError(SignalErrorKind::BadThreshold, "threshold sweep is empty");
  for (std::size_t i = 0; i < thresholds_mv.size(); ++i) {
    if (!(thresholds_mv[i] > 0.0)) throw SignalError(SignalErrorKind::BadThreshold, "thresholds must be positive");
    if (i > 0 && !(thresholds_mv[i] > thresholds_mv[i - 1])) {
      throw SignalError(SignalErrorKind::BadThreshold, "thresholds must be strictly ascending");
    }
  }
}

std::string to_string(PeakPolicy policy) { return policy == PeakPolicy::Extremum ? "extremum" : "any_excursion"; }

PeakPolicy peak_policy_from_string(const std::string& text) {
  if (text == "extremum") return PeakPolicy::Extremum;
  if (text == "any_excursion") return PeakPolicy::AnyExcursion;
  throw std::invalid_argument("unknown peak policy \"" + text + "\"");
}

std::string to_string(SignalErrorKind kind) {
  switch (kind) {
    case SignalErrorKind::EdgeCountMismatch: return "edge_count_mismatch";
    case SignalErrorKind::TraceTooShort: return "trace_too_short";
    case SignalErrorKind::UnknownChannel: return "unknown_channel";
    case SignalErrorKind::BadThreshold: return "bad_threshold";
  }
  return "unknown";
}

SignalError::SignalError(SignalErrorKind kind, const std::string& message)
    : std::runtime_error(to_string(kind) + ": " + message), kind_(kind) {}

std::vector<std::size_t> sync_rising_edges(const std::vector<double>& sync, double level) {
  std::vector<std::size_t> edges;
  for (std::size_t i = 0; i < sync.size(); ++i) {
    if (sync[i] > level && (i == 0 || sync[i - 1] <= level)) edges.push_back(i);
  }
  return edges;
}

namespace {

StateWindow make_window(const Recording& rec, InputState state, std::size_t begin, std::size_t end) {
  StateWindow w{state, begin, end, {}};
  w.channels.reserve(rec.channels.size());
  for (const auto& t : rec.channels) {
    w.channels.push_back(ChannelSlice{t.name, std::vector<double>(t.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                                                                  t.samples.begin() + static_cast<std::ptrdiff_t>(end))});
  }
  return w;
}

}  // namespace

std::vector<StateWindow> segment(const Recording& rec, const SegmentOptions& opts) {
  try {
    validate(rec);
  } catch (const RecordingError&) {
    validate(rec.meta);
    const std::size_t need = rec.meta.state_count() * rec.meta.samples_per_state();
    if (!rec.channels.empty() && rec.length() < need) {
      throw SignalError(SignalErrorKind::TraceTooShort, std::to_string(rec.length()) + " samples cannot hold " +
                                                            std::to_string(rec.meta.state_count()) + " windows of " +
                                                            std::to_string(rec.meta.samples_per_state()));
    }
    throw;
  }
  const auto schedule = state_schedule(rec.meta);
  const std::size_t n = rec.length();
  const std::size_t nominal = rec.meta.samples_per_state();
  std::vector<StateWindow> windows;
  windows.reserve(schedule.size());

  if (rec.meta.sync == SyncMode::None) {
    if (n < schedule.size() * nominal) {
      throw SignalError(SignalErrorKind::TraceTooShort, std::to_string(n) + " samples cannot hold " +
                                                            std::to_string(schedule.size()) + " windows of " +
                                                            std::to_string(nominal));
    }
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      windows.push_back(make_window(rec, schedule[k], k * nominal, (k + 1) * nominal));
    }
    return windows;
  }

  const auto& sync = *rec.sync;
  double level;
  if (opts.sync_threshold_v) {
    level = *opts.sync_threshold_v;
  } else {
    auto [lo, hi] = std::minmax_element(sync.begin(), sync.end());
    level = 0.5 * (*lo + *hi);
  }
  const auto edges = sync_rising_edges(sync, level);
  if (edges.size() != schedule.size()) {
    throw SignalError(SignalErrorKind::EdgeCountMismatch, "found " + std::to_string(edges.size()) +
                                                              " sync edges, expected " + std::to_string(schedule.size()));
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    std::size_t end = k + 1 < edges.size() ? edges[k + 1] : std::min(n, edges[k] + nominal);
    windows.push_back(make_window(rec, schedule[k], edges[k], end));
  }
  return windows;
}

std::vector<PeakEvent> detect_peaks(const StateWindow& window, const std::string& channel, double threshold_mv,
                                    const PeakOptions& opts) {
  if (!(threshold_mv > 0.0)) throw SignalError(SignalErrorKind::BadThreshold, "threshold must be positive");
  const ChannelSlice* slice = window.find_channel(channel);
  if (!slice) throw SignalError(SignalErrorKind::UnknownChannel, "no channel \"" + channel + "\"");

  const double threshold_v = threshold_mv / 1000.0;
  const auto& s = slice->samples;
  const std::size_t n = s.size();
  auto mag = [&](std::size_t i) { return std::abs(s[i] - opts.baseline_v); };

  std::vector<PeakEvent> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = mag(i);
    if (!(a > threshold_v)) continue;
    if (opts.policy == PeakPolicy::Extremum) {
      // Plateaus count once, at their first sample.
      if (i > 0 && a <= mag(i - 1)) continue;
      if (i + 1 < n && a < mag(i + 1)) continue;
    }
    peaks.push_back(PeakEvent{channel, window.begin + i, s[i] - opts.baseline_v});
  }
  return peaks;
}

const ChannelBits& ThresholdBits::channel(const std::string& name) const {
  for (const auto& c : channels) {
    if (c.channel == name) return c;
  }
  throw SignalError(SignalErrorKind::UnknownChannel, "no channel \"" + name + "\"");
}

std::vector<ThresholdBits> sweep_bits(const std::vector<StateWindow>& windows, const std::vector<std::string>& channels,
                                      const ThresholdSweep& sweep, const PeakOptions& peak_opts) {
  sweep.validate();
  std::vector<ThresholdBits> out;
  out.reserve(sweep.thresholds_mv.size());
  for (double th : sweep.thresholds_mv) {
    ThresholdBits tb{th, {}};
    for (const auto& name : channels) {
      ChannelBits cb{name, std::string(windows.size(), '0'), {}};
      for (const auto& w : windows) {
        auto peaks = detect_peaks(w, name, th, peak_opts);
        if (!peaks.empty()) cb.bits[w.state.ordinal] = '1';
        for (auto& p : peaks) cb.peaks.emplace_back(w.state, std::move(p));
      }
      tb.channels.push_back(std::move(cb));
    }
    out.push_back(std::move(tb));
  }
  return out;
}

std::vector<ThresholdBits> sweep_bits(const Recording& rec, const ThresholdSweep& sweep, const PeakOptions& peak_opts,
                                      const SegmentOptions& seg_opts) {
  sweep.validate();
  return sweep_bits(segment(rec, seg_opts), rec.channel_names(), sweep, peak_opts);
}

std::string sweep_to_json(const std::vector<ThresholdBits>& sweep) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& tb : sweep) {
    for (const auto& cb : tb.channels) {
      nlohmann::ordered_json j;
      j["threshold_mv"] = tb.threshold_mv;
      j["channel"] = cb.channel;
      j["bits"] = cb.bits;
      auto peaks = nlohmann::ordered_json::array();
      for (const auto& [state, p] : cb.peaks) {
        nlohmann::ordered_json pj;
        pj["state"] = state.bits();
        pj["index"] = p.sample_index;
        pj["amplitude_v"] = p.amplitude_v;
        peaks.push_back(std::move(pj));
      }
      j["peaks"] = std::move(peaks);
      arr.push_back(std::move(j));
    }
  }
  return arr.dump(2) + "\n";
}

}  // namespace gateminer

#include "gateminer/recording.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gateminer {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kRateTolerance = 1e-9;

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = first + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

}  // namespace

std::string to_string(SyncMode mode) { return mode == SyncMode::Channel ? "channel" : "none"; }

SyncMode sync_mode_from_string(const std::string& text) {
  if (text == "channel") return SyncMode::Channel;
  if (text == "none") return SyncMode::None;
  throw RecordingError(RecordingErrorKind::BadManifest, "sync must be \"channel\" or \"none\", got \"" + text + "\"");
}

std::size_t RunManifest::samples_per_state() const {
  double n = std::round(state_duration_s * sample_rate_hz);
  return n < 1.0 ? 0 : static_cast<std::size_t>(n);
}

std::size_t Recording::length() const {
  if (!channels.empty()) return channels.front().samples.size();
  return sync ? sync->size() : 0;
}

const Trace* Recording::find_channel(const std::string& name) const {
  auto it = std::find_if(channels.begin(), channels.end(), [&](const Trace& t) { return t.name == name; });
  return it == channels.end() ? nullptr : &*it;
}

const Trace& Recording::channel(const std::string& name) const {
  if (const Trace* t = find_channel(name)) return *t;
  throw std::out_of_range("unknown channel \"" + name + "\"");
}

std::vector<std::string> Recording::channel_names() const {
  std::vector<std::string> names;
  for (const auto& t : channels) names.push_back(t.name);
  return names;
}

std::string InputState::bits() const {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int v = 0; v < width; ++v) {
    if (input(v)) s[static_cast<std::size_t>(v)] = '1';
  }
  return s;
}

InputState InputState::from_bits(const std::string& bits) {
  if (bits.empty() || bits.size() > static_cast<std::size_t>(kMaxInputs)) {
    throw std::invalid_argument("input state width must be 1.." + std::to_string(kMaxInputs));
  }
  InputState st{static_cast<int>(bits.size()), 0};
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("input state must be a 0/1 string: " + bits);
    st.ordinal = (st.ordinal << 1) | static_cast<std::uint32_t>(c == '1');
  }
  return st;
}

std::string to_string(RecordingErrorKind kind) {
  switch (kind) {
    case RecordingErrorKind::MalformedHeader: return "malformed_header";
    case RecordingErrorKind::RaggedRow: return "ragged_row";
    case RecordingErrorKind::NonMonotoneTime: return "non_monotone_time";
    case RecordingErrorKind::MissingSync: return "missing_sync";
    case RecordingErrorKind::BadValue: return "bad_value";
    case RecordingErrorKind::MissingManifest: return "missing_manifest";
    case RecordingErrorKind::BadManifest: return "bad_manifest";
    case RecordingErrorKind::InvariantViolation: return "invariant_violation";
    case RecordingErrorKind::Io: return "io";
  }
  return "unknown";
}

RecordingError::RecordingError(RecordingErrorKind kind, const std::string& message, std::optional<std::size_t> row)
    : std::runtime_error(to_string(kind) + ": " + message), kind_(kind), row_(row) {}

void validate(const RunManifest& m) {
  auto fail = [](const std::string& msg) { throw RecordingError(RecordingErrorKind::BadManifest, msg); };
  if (m.n_inputs < 1 || m.n_inputs > kMaxInputs) {
    fail("n_inputs must be in 1.." + std::to_string(kMaxInputs));
  }
  if (!(m.state_duration_s > 0.0)) fail("state_duration_s must be positive");
  if (!(m.sample_rate_hz > 0.0)) fail("sample_rate_hz must be positive");
  if (m.samples_per_state() == 0) fail("state_duration_s * sample_rate_hz must cover at least one sample");
  for (std::size_t i = 0; i < m.thresholds_mv.size(); ++i) {
    if (!(m.thresholds_mv[i] > 0.0)) fail("thresholds_mv must be positive");
    if (i > 0 && !(m.thresholds_mv[i] > m.thresholds_mv[i - 1])) fail("thresholds_mv must be strictly ascending");
  }
  if (m.output_channel.empty()) fail("output_channel must be named");
}

void validate(const Recording& rec) {
  auto fail = [](const std::string& msg) { throw RecordingError(RecordingErrorKind::InvariantViolation, msg); };
  if (!(rec.sample_rate_hz > 0.0)) fail("sample_rate_hz must be positive");
  if (rec.meta.sample_rate_hz != rec.sample_rate_hz) fail("manifest sample_rate_hz differs from the recording's");
  if (rec.channels.empty()) fail("recording needs at least one channel");
  const std::size_t n = rec.channels.front().samples.size();
  if (n == 0) fail("traces must hold at least one sample");
  std::set<std::string> names;
  for (const auto& t : rec.channels) {
    if (t.name.empty() || t.name == "t" || t.name == "sync") fail("invalid channel name \"" + t.name + "\"");
    if (t.name.find_first_of(",\n\r\"") != std::string::npos) fail("channel name contains a CSV delimiter");
    if (!names.insert(t.name).second) fail("duplicate channel name \"" + t.name + "\"");
    if (t.samples.size() != n) fail("channel \"" + t.name + "\" length differs");
  }
  if (rec.meta.sync == SyncMode::Channel) {
    if (!rec.sync) fail("manifest declares a sync channel but none is present");
    if (rec.sync->size() != n) fail("sync trace length differs");
  } else if (rec.sync) {
    fail("manifest declares sync none but a sync trace is present");
  }
  try {
    validate(rec.meta);
  } catch (const RecordingError& e) {
    fail(e.what());
  }
  if (!names.count(rec.meta.output_channel)) fail("output_channel \"" + rec.meta.output_channel + "\" is not a channel");
  if (n < rec.meta.state_count() * rec.meta.samples_per_state()) {
    fail("recording of " + std::to_string(n) + " samples is shorter than " + std::to_string(rec.meta.state_count()) +
         " states x " + std::to_string(rec.meta.samples_per_state()) + " samples");
  }
}

std::filesystem::path manifest_path_for(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".manifest.json");
  return p;
}

std::string manifest_to_json(const RunManifest& m, double sample_rate_hz) {
  ordered_json j;
  j["n_inputs"] = m.n_inputs;
  j["state_duration_s"] = m.state_duration_s;
  j["sample_rate_hz"] = sample_rate_hz;
  j["repeat_index"] = m.repeat_index;
  j["thresholds_mv"] = m.thresholds_mv;
  j["output_channel"] = m.output_channel;
  j["sync"] = to_string(m.sync);
  if (!m.generator.empty()) j["generator"] = m.generator;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text, double* sample_rate_hz) {
  RunManifest m;
  try {
    auto j = nlohmann::json::parse(text);
    m.n_inputs = j.at("n_inputs").get<int>();
    m.state_duration_s = j.value("state_duration_s", 15.0);
    m.sample_rate_hz = j.value("sample_rate_hz", 1.0);
    m.repeat_index = j.value("repeat_index", std::uint64_t{0});
    m.thresholds_mv = j.value("thresholds_mv", std::vector<double>{});
    m.output_channel = j.at("output_channel").get<std::string>();
    m.sync = sync_mode_from_string(j.value("sync", std::string("channel")));
    m.generator = j.value("generator", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw RecordingError(RecordingErrorKind::BadManifest, e.what());
  }
  if (sample_rate_hz) *sample_rate_hz = m.sample_rate_hz;
  validate(m);
  return m;
}

ReadResult read_recording_with_warnings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RecordingError(RecordingErrorKind::Io, "cannot open " + path.string());

  std::string line;
  std::optional<RunManifest> manifest;
  if (in.peek() == '#') {
    std::getline(in, line);
    manifest = manifest_from_json(line.substr(1));
  } else {
    auto mpath = manifest_path_for(path);
    std::ifstream min(mpath);
    if (!min) throw RecordingError(RecordingErrorKind::MissingManifest, "no manifest sidecar " + mpath.string());
    std::stringstream ss;
    ss << min.rdbuf();
    manifest = manifest_from_json(ss.str());
  }

  if (!std::getline(in, line)) throw RecordingError(RecordingErrorKind::MalformedHeader, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line, ',');
  if (header.size() < 2 || header.front() != "t") {
    throw RecordingError(RecordingErrorKind::MalformedHeader, "header must start with `t` and name at least one channel");
  }
  const bool has_sync_col = header.back() == "sync";
  if (manifest->sync == SyncMode::Channel && !has_sync_col) {
    throw RecordingError(RecordingErrorKind::MissingSync, "manifest declares a sync channel but the header has no `sync` column");
  }
  if (manifest->sync == SyncMode::None && has_sync_col) {
    throw RecordingError(RecordingErrorKind::MalformedHeader, "`sync` column present but manifest declares sync none");
  }
  const std::size_t n_channels = header.size() - 1 - (has_sync_col ? 1 : 0);
  if (n_channels == 0) throw RecordingError(RecordingErrorKind::MalformedHeader, "no data channels");
  std::set<std::string> seen;
  for (std::size_t c = 1; c <= n_channels; ++c) {
    if (header[c].empty() || !seen.insert(header[c]).second) {
      throw RecordingError(RecordingErrorKind::MalformedHeader, "empty or duplicate channel name \"" + header[c] + "\"");
    }
  }

  Recording rec;
  rec.meta = *manifest;
  for (std::size_t c = 1; c <= n_channels; ++c) rec.channels.push_back(Trace{header[c], {}});
  std::vector<double> sync;
  std::vector<double> times;

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw RecordingError(RecordingErrorKind::RaggedRow,
                           "row " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(header.size()),
                           row);
    }
    std::vector<double> values(fields.size());
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (!parse_double(fields[f], values[f])) {
        throw RecordingError(RecordingErrorKind::BadValue,
                             "row " + std::to_string(row) + " column \"" + header[f] + "\": \"" + fields[f] + "\"", row);
      }
    }
    if (!times.empty() && !(values[0] > times.back())) {
      throw RecordingError(RecordingErrorKind::NonMonotoneTime, "time does not increase at row " + std::to_string(row), row);
    }
    times.push_back(values[0]);
    for (std::size_t c = 0; c < n_channels; ++c) rec.channels[c].samples.push_back(values[c + 1]);
    if (has_sync_col) sync.push_back(values.back());
  }
  if (has_sync_col) rec.sync = std::move(sync);

  ReadResult result;
  rec.sample_rate_hz = manifest->sample_rate_hz;
  if (times.size() >= 2) {
    double step = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    double inferred = 1.0 / step;
    if (std::abs(inferred - manifest->sample_rate_hz) > kRateTolerance * manifest->sample_rate_hz) {
      result.warnings.push_back("time column implies " + format_double(inferred) + " Hz but manifest states " +
                                format_double(manifest->sample_rate_hz) + " Hz; using the time column");
      rec.sample_rate_hz = inferred;
      rec.meta.sample_rate_hz = inferred;
    }
  }
  validate(rec);
  result.recording = std::move(rec);
  return result;
}

Recording read_recording(const std::filesystem::path& path) { return read_recording_with_warnings(path).recording; }

void write_recording(const Recording& rec, const std::filesystem::path& path) {
  validate(rec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RecordingError(RecordingErrorKind::Io, "cannot write " + path.string());
  out << 't';
  for (const auto& ch : rec.channels) out << ',' << ch.name;
  if (rec.sync) out << ",sync";
  out << '\n';
  const std::size_t n = rec.length();
  for (std::size_t i = 0; i < n; ++i) {
    out << format_double(static_cast<double>(i) / rec.sample_rate_hz);
    for (const auto& ch : rec.channels) out << ',' << format_double(ch.samples[i]);
    if (rec.sync) out << ',' << format_double((*rec.sync)[i]);
    out << '\n';
  }
  if (!out) throw RecordingError(RecordingErrorKind::Io, "write failed for " + path.string());

  auto mpath = manifest_path_for(path);
  std::ofstream mout(mpath, std::ios::binary);
  if (!mout) throw RecordingError(RecordingErrorKind::Io, "cannot write " + mpath.string());
  mout << manifest_to_json(rec.meta, rec.sample_rate_hz);
  if (!mout) throw RecordingError(RecordingErrorKind::Io, "write failed for " + mpath.string());
}

std::vector<InputState> state_schedule(int n_inputs) {
  if (n_inputs < 1 || n_inputs > kMaxInputs) {
    throw RecordingError(RecordingErrorKind::BadManifest, "n_inputs must be in 1.." + std::to_string(kMaxInputs));
  }
  std::vector<InputState> states;
  const std::uint32_t count = 1U << n_inputs;
  states.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) states.push_back(InputState{n_inputs, i});
  return states;
}

std::vector<InputState> state_schedule(const RunManifest& manifest) {
  validate(manifest);
  return state_schedule(manifest.n_inputs);
}

}  // namespace gateminer

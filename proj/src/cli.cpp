#include "gateminer/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gateminer/census.hpp"
#include "gateminer/charprops.hpp"
#include "gateminer/circuit.hpp"
#include "gateminer/logic.hpp"
#include "gateminer/pipeline.hpp"
#include "gateminer/recording.hpp"
#include "gateminer/signal.hpp"
#include "gateminer/synth.hpp"

namespace gateminer::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error (unknown subcommand, bad flags)\n"
    "  3  I/O error (missing or unwritable path, missing manifest)\n"
    "  4  malformed input (bad CSV/JSON, invalid bits or config)\n"
    "  5  analysis failure (segmentation, mixed census widths)\n"
    "Errors are printed as one line: error: code=<n> kind=<kind> msg=<text>\n"
    "Environment: GATEMINER_THREADS caps worker threads for extract and census.";

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& kind, const std::string& message) {
  throw Failure{code, kind, message};
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kIo, "io", "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) fail(kIo, "io", "cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(kIo, "io", "cannot create directory " + dir.string());
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Files as given plus matching files inside directories, sorted by path.
std::vector<fs::path> collect(const std::vector<std::string>& inputs, const std::string& suffix,
                              const std::string& exclude_suffix = {}) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) {
      for (const auto& e : fs::directory_iterator(p)) {
        const auto name = e.path().filename().string();
        if (!e.is_regular_file() || !has_suffix(name, suffix)) continue;
        if (!exclude_suffix.empty() && has_suffix(name, exclude_suffix)) continue;
        files.push_back(e.path());
      }
    } else if (fs::is_regular_file(p)) {
      files.push_back(p);
    } else {
      fail(kIo, "bad_path", "no such file or directory: " + in);
    }
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  if (files.empty()) fail(kIo, "bad_path", "no input files found");
  return files;
}

std::vector<double> parse_threshold_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      fail(kBadInput, "bad_threshold", "cannot parse threshold \"" + item + "\"");
    }
  }
  ThresholdSweep{out}.validate();
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// Runs f(i) for i in [0, n) on worker threads; rethrows the failure with
/// the lowest index.
template <class F>
void parallel_for(std::size_t n, F f) {
  const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string fixture;
  std::string out_dir;
  std::optional<int> n;
  std::vector<std::string> bits;
  std::optional<double> noise_mv;
  std::optional<double> flip;
  std::optional<std::uint64_t> repeat;
};

void cmd_gen(const GenArgs& a, std::ostream& out) {
  if (!a.seed) fail(kUsage, "missing_seed", "gen requires --seed (no implicit randomness)");
  SynthConfig cfg = a.config.empty() ? SynthConfig{} : synth_config_from_json(read_file(a.config));
  cfg.seed = *a.seed;
  if (a.n) cfg.n_inputs = *a.n;
  if (a.noise_mv) cfg.noise_sd_mv = *a.noise_mv;
  if (a.flip) cfg.flip_probability = *a.flip;
  if (a.repeat) cfg.repeat_index = *a.repeat;
  if (!a.bits.empty()) {
    cfg.channels.clear();
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
      cfg.channels.push_back(SynthChannel{"ch" + std::to_string(i), table_from_bits(cfg.n_inputs, a.bits[i])});
    }
  }

  if (!a.fixture.empty()) {
    if (a.out_dir.empty()) fail(kUsage, "missing_out_dir", "--fixture requires --out-dir");
    auto spec = fixture_spec_from_json(read_file(a.fixture));
    cfg.n_inputs = spec.front().table.n_inputs();
    if (!cfg.channels.empty() && cfg.channels.front().target.n_inputs() != cfg.n_inputs) cfg.channels.clear();
    auto recs = generate_census_fixture(spec, cfg);
    ensure_dir(a.out_dir);
    for (std::size_t k = 0; k < recs.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof(name), "rec_%05zu.csv", k);
      write_recording(recs[k], fs::path(a.out_dir) / name);
    }
    out << "wrote " << recs.size() << " recordings to " << a.out_dir << "\n";
    return;
  }
  if (a.out.empty()) fail(kUsage, "missing_out", "gen requires --out (or --fixture with --out-dir)");
  if (cfg.channels.empty()) fail(kBadInput, "no_targets", "no channel targets: pass --bits or a config with channels");
  write_recording(generate(cfg), a.out);
}

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string thresholds;
  std::string channel;
  std::string peak_policy = "extremum";
  double baseline_v = 0.0;
  std::optional<double> sync_threshold_v;
  std::string out;
  std::string out_dir;
  std::size_t petrick_cap = MinimizeOptions{}.petrick_cap;
};

void cmd_extract(const ExtractArgs& a, std::ostream& out) {
  const auto files = collect(a.inputs, ".csv");
  ExtractOptions opts;
  if (!a.thresholds.empty()) opts.sweep = ThresholdSweep{parse_threshold_list(a.thresholds)};
  try {
    opts.peaks.policy = peak_policy_from_string(a.peak_policy);
  } catch (const std::invalid_argument& e) {
    fail(kUsage, "bad_flag", e.what());
  }
  opts.peaks.baseline_v = a.baseline_v;
  opts.segments.sync_threshold_v = a.sync_threshold_v;
  opts.minimize.petrick_cap = a.petrick_cap;

  std::vector<std::vector<ExtractionRecord>> results(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    const auto rec = read_recording(files[i]);
    ExtractOptions local = opts;
    if (a.channel == "all") {
      local.channels = rec.channel_names();
    } else if (!a.channel.empty()) {
      local.channels = split_list(a.channel);
    }
    results[i] = extract_records(rec, local);
  });

  if (!a.out_dir.empty()) {
    ensure_dir(a.out_dir);
    for (std::size_t i = 0; i < files.size(); ++i) {
      write_file(fs::path(a.out_dir) / (files[i].stem().string() + ".records.json"), records_to_json(results[i]));
    }
    return;
  }
  std::vector<ExtractionRecord> all;
  for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
  emit(records_to_json(all), a.out, out);
}

struct MinimizeArgs {
  std::optional<int> n;
  std::string bits;
  std::string table;
  std::string format = "plain";
  std::size_t petrick_cap = MinimizeOptions{}.petrick_cap;
};

TruthTable table_from_args(std::optional<int> n, const std::string& bits, const std::string& table_path) {
  if (!table_path.empty()) {
    try {
      auto j = nlohmann::json::parse(read_file(table_path));
      return table_from_bits(j.at("n_inputs").get<int>(), j.at("bits").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      fail(kBadInput, "bad_table", e.what());
    }
  }
  if (!n || bits.empty()) fail(kUsage, "missing_table", "pass --n and --bits, or --table");
  return table_from_bits(*n, bits);
}

void cmd_minimize(const MinimizeArgs& a, std::ostream& out) {
  const auto tt = table_from_args(a.n, a.bits, a.table);
  MinimizeOptions opts;
  opts.petrick_cap = a.petrick_cap;
  const auto sop = minimize(tt, opts);
  if (a.format == "plain") {
    out << format_sop(sop, SopStyle::Plain) << "\n";
  } else if (a.format == "tex") {
    out << format_sop(sop, SopStyle::Tex) << "\n";
  } else if (a.format == "json") {
    out << sop_to_json(sop) << "\n";
  } else {
    fail(kUsage, "bad_flag", "--format must be plain, tex or json");
  }
}

struct CensusArgs {
  std::vector<std::string> inputs;
  std::size_t top = 10;
  std::string csv;
  std::string report;
};

void cmd_census(const CensusArgs& a, std::ostream& out) {
  const auto files = collect(a.inputs, ".json", ".manifest.json");
  std::vector<GateCensus> partial(files.size());
  parallel_for(files.size(), [&](std::size_t i) { partial[i] = accumulate(records_from_json(read_file(files[i]))); });
  GateCensus census;
  for (const auto& p : partial) census = merge(census, p);
  if (!census.n_inputs) fail(kBadInput, "empty_census", "no extraction records found");
  if (!a.csv.empty()) write_file(a.csv, histogram_csv(census));
  if (!a.report.empty()) write_file(a.report, report_json(census, a.top));
  out << report_text(top_k(census, a.top), *census.n_inputs);
}

struct GraphArgs {
  std::string input;
  std::optional<double> threshold;
  std::string channels;
  bool per_state = false;
  std::string out;
};

void cmd_graph(const GraphArgs& a, std::ostream& out) {
  const auto rec = read_recording(a.input);
  double th = a.threshold ? *a.threshold
                          : (rec.meta.thresholds_mv.empty() ? ThresholdSweep::standard().thresholds_mv.front()
                                                            : rec.meta.thresholds_mv.front());
  auto g = recording_state_graph(rec, th, split_list(a.channels),
                                 a.per_state ? StateNodeMode::PerState : StateNodeMode::MergedOutputs);
  emit(to_dot(g), a.out, out);
}

struct NetlistArgs {
  std::string sop;
  std::string expr;
  std::optional<int> n;
  std::string bits;
  std::string format = "dot";
  bool no_share = false;
  std::string out;
};

void cmd_netlist(const NetlistArgs& a, std::ostream& out) {
  SopExpression sop;
  if (!a.sop.empty()) {
    sop = sop_from_json(read_file(a.sop));
  } else if (!a.expr.empty()) {
    if (!a.n) fail(kUsage, "missing_n", "--expr requires --n");
    sop = parse_sop(*a.n, a.expr);
  } else {
    sop = minimize(table_from_args(a.n, a.bits, {}));
  }
  const auto net = netlist_from_sop(sop, !a.no_share);
  if (a.format == "dot") {
    emit(to_dot(net), a.out, out);
  } else if (a.format == "json") {
    emit(netlist_to_json(net), a.out, out);
  } else {
    fail(kUsage, "bad_flag", "--format must be dot or json");
  }
}

void cmd_bandgap(double lambda_nm, std::ostream& out) {
  const auto r = optical_band_gap(lambda_nm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%#.4g", r.e_g_ev);
  out << buf << " eV\n";
}

}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv("GATEMINER_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gateminer: mine Boolean gates from multichannel spike recordings"};
  app.name("gateminer");
  app.footer(kExitCodes);
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic recordings (CSV + manifest) with embedded functions");
  gen_cmd->add_option("--config", gen.config, "SynthConfig JSON file");
  gen_cmd->add_option("--seed", gen.seed, "Random seed (required)");
  gen_cmd->add_option("--out", gen.out, "Output recording CSV");
  gen_cmd->add_option("--fixture", gen.fixture, "Fixture spec JSON [{bits, count}, ...]");
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory for --fixture");
  gen_cmd->add_option("--n", gen.n, "Number of inputs");
  gen_cmd->add_option("--bits", gen.bits, "Target truth table per channel (repeatable, ordinal order)");
  gen_cmd->add_option("--noise-mv", gen.noise_mv, "Gaussian noise sd in mV");
  gen_cmd->add_option("--flip", gen.flip, "Per-state output flip probability");
  gen_cmd->add_option("--repeat", gen.repeat, "Repeat index written to the manifest");
  gen_cmd->footer(kExitCodes);

  ExtractArgs ext;
  auto* ext_cmd = app.add_subcommand("extract", "Extract truth tables and minimized SOPs per (threshold, channel)");
  ext_cmd->add_option("inputs", ext.inputs, "Recording CSV files or directories")->required();
  ext_cmd->add_option("--thresholds", ext.thresholds, "Comma-separated thresholds in mV (overrides manifest)");
  ext_cmd->add_option("--channel", ext.channel, "Channel name(s), comma-separated, or `all` (default: output channel)");
  ext_cmd->add_option("--peak-policy", ext.peak_policy, "extremum | any_excursion");
  ext_cmd->add_option("--baseline-v", ext.baseline_v, "Threshold band centre in volts");
  ext_cmd->add_option("--sync-threshold-v", ext.sync_threshold_v, "Sync rising-edge level in volts");
  ext_cmd->add_option("--out", ext.out, "Write all records to this JSON file (default stdout)");
  ext_cmd->add_option("--out-dir", ext.out_dir, "Write <stem>.records.json per recording");
  ext_cmd->add_option("--petrick-cap", ext.petrick_cap, "Petrick product cap before greedy fallback");
  ext_cmd->footer(kExitCodes);

  MinimizeArgs mn;
  auto* mn_cmd = app.add_subcommand("minimize", "Minimize a truth table to a canonical SOP");
  mn_cmd->add_option("--n", mn.n, "Number of inputs");
  mn_cmd->add_option("--bits", mn.bits, "Outputs in ordinal order, e.g. 1110");
  mn_cmd->add_option("--table", mn.table, "Table JSON {n_inputs, bits}");
  mn_cmd->add_option("--format", mn.format, "plain | tex | json");
  mn_cmd->add_option("--petrick-cap", mn.petrick_cap, "Petrick product cap before greedy fallback");
  mn_cmd->footer(kExitCodes);

  CensusArgs cs;
  auto* cs_cmd = app.add_subcommand("census", "Aggregate extraction records into a gate census");
  cs_cmd->add_option("inputs", cs.inputs, "Record JSON files or directories")->required();
  cs_cmd->add_option("--top", cs.top, "Number of functions in the top-k report")->check(CLI::PositiveNumber);
  cs_cmd->add_option("--csv", cs.csv, "Write histogram CSV here");
  cs_cmd->add_option("--report", cs.report, "Write JSON report here");
  cs_cmd->footer(kExitCodes);

  GraphArgs gr;
  auto* gr_cmd = app.add_subcommand("graph", "Build the state graph of a recording as DOT");
  gr_cmd->add_option("input", gr.input, "Recording CSV")->required();
  gr_cmd->add_option("--threshold", gr.threshold, "Threshold in mV (default: first manifest threshold)");
  gr_cmd->add_option("--channels", gr.channels, "Comma-separated channels (default: all)");
  gr_cmd->add_flag("--per-state", gr.per_state, "One node per (input state, output) instead of per output");
  gr_cmd->add_option("--out", gr.out, "Output DOT file (default stdout)");
  gr_cmd->footer(kExitCodes);

  NetlistArgs nl;
  auto* nl_cmd = app.add_subcommand("netlist", "Build a gate netlist from an SOP");
  nl_cmd->add_option("--sop", nl.sop, "SOP JSON file");
  nl_cmd->add_option("--expr", nl.expr, "SOP text, e.g. \"A' + B'\" (needs --n)");
  nl_cmd->add_option("--n", nl.n, "Number of inputs");
  nl_cmd->add_option("--bits", nl.bits, "Truth table to minimize first");
  nl_cmd->add_option("--format", nl.format, "dot | json");
  nl_cmd->add_flag("--no-share", nl.no_share, "One NOT gate per negated literal");
  nl_cmd->add_option("--out", nl.out, "Output file (default stdout)");
  nl_cmd->footer(kExitCodes);

  double lambda_nm = 0.0;
  auto* bg_cmd = app.add_subcommand("bandgap", "Optical band gap in eV from an absorption peak wavelength");
  bg_cmd->add_option("lambda_nm", lambda_nm, "Wavelength in nm")->required();
  bg_cmd->footer(kExitCodes);

  auto report = [&](int code, const std::string& kind, const std::string& msg) {
    err << "error: code=" << code << " kind=" << kind << " msg=" << one_line(msg) << "\n";
    return code;
  };

  if (!args.empty() && !args.front().starts_with('-')) {
    bool known = false;
    for (const auto* sub : app.get_subcommands([](CLI::App*) { return true; })) known |= sub->get_name() == args.front();
    if (!known) return report(kUsage, "unknown_subcommand", "unknown subcommand \"" + args.front() + "\"");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::ParseError& e) {
    return report(kUsage, "usage", e.what());
  }

  try {
    if (gen_cmd->parsed()) cmd_gen(gen, out);
    if (ext_cmd->parsed()) cmd_extract(ext, out);
    if (mn_cmd->parsed()) cmd_minimize(mn, out);
    if (cs_cmd->parsed()) cmd_census(cs, out);
    if (gr_cmd->parsed()) cmd_graph(gr, out);
    if (nl_cmd->parsed()) cmd_netlist(nl, out);
    if (bg_cmd->parsed()) cmd_bandgap(lambda_nm, out);
  } catch (const Failure& f) {
    return report(f.code, f.kind, f.message);
  } catch (const RecordingError& e) {
    const bool io = e.kind() == RecordingErrorKind::Io || e.kind() == RecordingErrorKind::MissingManifest;
    return report(io ? kIo : kBadInput, to_string(e.kind()), e.what());
  } catch (const SignalError& e) {
    return report(e.kind() == SignalErrorKind::BadThreshold ? kBadInput : kAnalysis, to_string(e.kind()), e.what());
  } catch (const LogicError& e) {
    return report(kBadInput, to_string(e.kind()), e.what());
  } catch (const SynthError& e) {
    return report(kBadInput, "bad_config", e.what());
  } catch (const CensusError& e) {
    return report(kAnalysis, "census", e.what());
  } catch (const CircuitError& e) {
    return report(kBadInput, "circuit", e.what());
  } catch (const std::invalid_argument& e) {
    return report(kBadInput, "bad_input", e.what());
  } catch (const std::exception& e) {
    return report(kInternal, "internal", e.what());
  }
  return kOk;
}

}  // namespace gateminer::cli

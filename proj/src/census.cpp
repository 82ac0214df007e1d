#include "gateminer/census.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gateminer {

ExtractionRecord make_record(std::uint64_t repeat_index, double threshold_mv, const std::string& channel,
                             const TruthTable& tt, const SopExpression& sop) {
  ExtractionRecord r;
  r.repeat_index = repeat_index;
  r.threshold_mv = threshold_mv;
  r.channel = channel;
  r.n_inputs = tt.n_inputs();
  r.bits = tt.bits();
  r.function_id = function_id(tt);
  r.sop = format_sop(sop);
  r.circuit_size_terms = sop.is_constant() ? 0 : sop.terms.size();
  r.heuristic = sop.heuristic;
  return r;
}

bool consistent(const ExtractionRecord& rec) {
  try {
    const auto tt = to_table(parse_sop(rec.n_inputs, rec.sop));
    return function_id(tt) == rec.function_id && (rec.bits.empty() || tt.bits() == rec.bits);
  } catch (const LogicError&) {
    return false;
  }
}

std::string records_to_json(const std::vector<ExtractionRecord>& records) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["repeat_index"] = r.repeat_index;
    j["threshold_mv"] = r.threshold_mv;
    j["channel"] = r.channel;
    j["n_inputs"] = r.n_inputs;
    j["bits"] = r.bits;
    j["id"] = render_id(r.function_id, r.n_inputs);
    j["id_hex"] = r.function_id.hex();
    j["sop"] = r.sop;
    j["circuit_size_terms"] = r.circuit_size_terms;
    j["heuristic"] = r.heuristic;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<ExtractionRecord> records_from_json(const std::string& text) {
  std::vector<ExtractionRecord> out;
  try {
    auto arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw CensusError("extraction records must be a JSON array");
    for (const auto& j : arr) {
      ExtractionRecord r;
      r.repeat_index = j.at("repeat_index").get<std::uint64_t>();
      r.threshold_mv = j.at("threshold_mv").get<double>();
      r.channel = j.at("channel").get<std::string>();
      r.n_inputs = j.at("n_inputs").get<int>();
      r.bits = j.value("bits", std::string{});
      r.function_id = FunctionId::from_hex(j.at("id_hex").get<std::string>());
      r.sop = j.at("sop").get<std::string>();
      r.circuit_size_terms = j.value("circuit_size_terms", std::size_t{0});
      r.heuristic = j.value("heuristic", false);
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CensusError(std::string("malformed extraction records: ") + e.what());
  } catch (const LogicError& e) {
    throw CensusError(std::string("malformed extraction records: ") + e.what());
  }
  return out;
}

void GateCensus::add(const ExtractionRecord& rec) {
  if (n_inputs && *n_inputs != rec.n_inputs) {
    throw CensusError("mixed input widths: census holds " + std::to_string(*n_inputs) + "-input functions, record has " +
                      std::to_string(rec.n_inputs));
  }
  n_inputs = rec.n_inputs;
  ++total_records;
  ++counts[rec.function_id];
  ++per_threshold[rec.threshold_mv][rec.function_id];
  display.emplace(rec.function_id, rec.sop);
}

GateCensus accumulate(const std::vector<ExtractionRecord>& records) {
  GateCensus c;
  for (const auto& r : records) c.add(r);
  return c;
}

GateCensus merge(const GateCensus& a, const GateCensus& b) {
  if (a.n_inputs && b.n_inputs && *a.n_inputs != *b.n_inputs) throw CensusError("cannot merge censuses of different widths");
  GateCensus out = a;
  if (!out.n_inputs) out.n_inputs = b.n_inputs;
  out.total_records += b.total_records;
  for (const auto& [id, n] : b.counts) out.counts[id] += n;
  for (const auto& [th, counts] : b.per_threshold) {
    for (const auto& [id, n] : counts) out.per_threshold[th][id] += n;
  }
  for (const auto& [id, s] : b.display) out.display.emplace(id, s);
  return out;
}

std::vector<CensusEntry> top_k(const GateCensus& census, const FunctionCounts& counts, std::size_t k) {
  std::vector<CensusEntry> entries;
  entries.reserve(counts.size());
  for (const auto& [id, n] : counts) {
    auto it = census.display.find(id);
    std::string sop = it != census.display.end() ? it->second : format_sop(minimize(table_from_id(*census.n_inputs, id)));
    entries.push_back(CensusEntry{std::move(sop), id, n});
  }
  std::sort(entries.begin(), entries.end(), [](const CensusEntry& a, const CensusEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.sop < b.sop;
  });
  if (entries.size() > k) entries.resize(k);
  return entries;
}

std::vector<CensusEntry> top_k(const GateCensus& census, std::size_t k) { return top_k(census, census.counts, k); }

std::string render_id(const FunctionId& id, int n_inputs) { return n_inputs >= 8 ? id.hex() : id.decimal(); }

std::string histogram_csv(const GateCensus& census) {
  std::string out = "function_id,count\n";
  for (const auto& [id, n] : census.counts) {
    out += render_id(id, census.n_inputs.value_or(0)) + "," + std::to_string(n) + "\n";
  }
  return out;
}

std::vector<FunctionId> repeated_functions(const GateCensus& census) {
  std::vector<FunctionId> out;
  for (const auto& [id, n] : census.counts) {
    if (n > 1) out.push_back(id);
  }
  return out;
}

namespace {

std::string threshold_key(double mv) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), mv);
  return std::string(buf, end);
}

nlohmann::ordered_json entries_json(const std::vector<CensusEntry>& entries) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["sop"] = e.sop;
    j["id_hex"] = e.id.hex();
    j["count"] = e.count;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace

std::string report_json(const GateCensus& census, std::size_t k) {
  nlohmann::ordered_json j;
  j["n_inputs"] = census.n_inputs.value_or(0);
  j["total"] = census.total_records;
  j["distinct"] = census.counts.size();
  j["codification"] = kCodification;
  j["top"] = entries_json(top_k(census, k));
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [th, counts] : census.per_threshold) {
    nlohmann::ordered_json pj;
    std::size_t total = 0;
    for (const auto& [id, n] : counts) total += n;
    pj["total"] = total;
    pj["top"] = entries_json(top_k(census, counts, k));
    per[threshold_key(th)] = std::move(pj);
  }
  j["per_threshold"] = std::move(per);
  return j.dump(2) + "\n";
}

std::string report_text(const std::vector<CensusEntry>& entries, int n_inputs) {
  std::ostringstream out;
  for (const auto& e : entries) {
    out << e.count << "\t$" << format_sop(parse_sop(n_inputs, e.sop), SopStyle::Tex) << "$\n";
  }
  return out.str();
}

}  // namespace gateminer

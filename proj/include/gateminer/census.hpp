#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gateminer/logic.hpp"

namespace gateminer {

/// One truth table extracted from one (repeat, threshold, channel).
struct ExtractionRecord {
  std::uint64_t repeat_index = 0;
  double threshold_mv = 0.0;
  std::string channel;
  int n_inputs = 0;
  std::string bits;
  FunctionId function_id;
  /// Canonical plain rendering of the minimized SOP.
  std::string sop;
  std::size_t circuit_size_terms = 0;
  bool heuristic = false;
};

ExtractionRecord make_record(std::uint64_t repeat_index, double threshold_mv, const std::string& channel,
                             const TruthTable& tt, const SopExpression& sop);

/// Re-parses the SOP and checks it against function_id and bits.
bool consistent(const ExtractionRecord& rec);

std::string records_to_json(const std::vector<ExtractionRecord>& records);
std::vector<ExtractionRecord> records_from_json(const std::string& text);

class CensusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using FunctionCounts = std::map<FunctionId, std::size_t>;

struct GateCensus {
  /// Unset until the first record arrives.
  std::optional<int> n_inputs;
  std::size_t total_records = 0;
  FunctionCounts counts;
  /// Keyed by threshold in mV.
  std::map<double, FunctionCounts> per_threshold;
  /// Display SOP per function id, taken from the records.
  std::map<FunctionId, std::string> display;

  void add(const ExtractionRecord& rec);
};

/// Throws CensusError on mixed input widths.
GateCensus accumulate(const std::vector<ExtractionRecord>& records);
/// Associative and commutative.
GateCensus merge(const GateCensus& a, const GateCensus& b);

struct CensusEntry {
  std::string sop;
  FunctionId id;
  std::size_t count = 0;
};

/// Descending count, ties by ascending plain SOP string.
std::vector<CensusEntry> top_k(const GateCensus& census, std::size_t k);
std::vector<CensusEntry> top_k(const GateCensus& census, const FunctionCounts& counts, std::size_t k);

/// Ids rendered in decimal below 8 inputs, hex from 8 inputs up.
std::string render_id(const FunctionId& id, int n_inputs);

/// `function_id,count`, ascending by id.
std::string histogram_csv(const GateCensus& census);

/// Functions observed more than once.
std::vector<FunctionId> repeated_functions(const GateCensus& census);

/// `{n_inputs, total, codification, top:[{sop, id_hex, count}], per_threshold:{...}}`
std::string report_json(const GateCensus& census, std::size_t k);

/// One line per entry: `<count>\t$<TeX SOP>$`.
std::string report_text(const std::vector<CensusEntry>& entries, int n_inputs);

}  // namespace gateminer

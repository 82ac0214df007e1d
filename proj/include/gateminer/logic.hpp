#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gateminer {

/// Single-output Boolean function as a full truth table. Row i is the
/// output for input ordinal i, where input A is the ordinal's MSB.
class TruthTable {
 public:
  TruthTable() = default;
  TruthTable(int n_inputs, std::vector<bool> outputs);

  int n_inputs() const { return n_inputs_; }
  std::size_t rows() const { return outputs_.size(); }
  bool operator[](std::size_t ordinal) const { return outputs_[ordinal]; }
  const std::vector<bool>& outputs() const { return outputs_; }

  /// Row-ordered '0'/'1' string.
  std::string bits() const;
  TruthTable complement() const;
  std::size_t ones() const;

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  int n_inputs_ = 0;
  std::vector<bool> outputs_;
};

/// Decimal codification of a truth table: sum of outputs[i] * 2^i.
class FunctionId {
 public:
  using Value = boost::multiprecision::cpp_int;

  FunctionId() = default;
  explicit FunctionId(Value value) : value_(std::move(value)) {}

  const Value& value() const { return value_; }
  /// Lowercase, no leading zeros ("0" for zero).
  std::string hex() const;
  std::string decimal() const;

  static FunctionId from_hex(const std::string& hex);
  static FunctionId from_decimal(const std::string& text);

  friend auto operator<=>(const FunctionId& a, const FunctionId& b) {
    return a.value_ < b.value_ ? std::strong_ordering::less
           : b.value_ < a.value_ ? std::strong_ordering::greater
                                 : std::strong_ordering::equal;
  }
  friend bool operator==(const FunctionId& a, const FunctionId& b) { return a.value_ == b.value_; }

 private:
  Value value_;
};

/// Human-readable name of the codification convention used throughout.
inline constexpr const char* kCodification =
    "id = sum(outputs[i] * 2^i), i = input ordinal, input A = most significant ordinal bit";

enum class LogicErrorKind { LengthMismatch, BadCharacter, WidthMismatch, BadInputCount, PetrickCapExceeded, ParseError };

std::string to_string(LogicErrorKind kind);

class LogicError : public std::runtime_error {
 public:
  LogicError(LogicErrorKind kind, const std::string& message);
  LogicErrorKind kind() const { return kind_; }

 private:
  LogicErrorKind kind_;
};

TruthTable table_from_bits(int n_inputs, const std::string& bits);
FunctionId function_id(const TruthTable& tt);
/// Inverse of function_id for a fixed input count.
TruthTable table_from_id(int n_inputs, const FunctionId& id);

std::string variable_name(int var);

struct Literal {
  int var = 0;
  bool negated = false;

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// Conjunction of literals, stored as masks over the input ordinal so that
/// coverage tests are a single comparison. Empty care mask = constant 1.
class ProductTerm {
 public:
  ProductTerm() = default;
  ProductTerm(int n_inputs, std::uint32_t care, std::uint32_t value);
  static ProductTerm from_literals(int n_inputs, const std::vector<Literal>& literals);

  int n_inputs() const { return n_inputs_; }
  std::uint32_t care() const { return care_; }
  std::uint32_t value() const { return value_; }

  bool covers(std::uint32_t ordinal) const { return (ordinal & care_) == value_; }
  int literal_count() const;
  /// Positive literals alphabetically, then negated literals alphabetically.
  std::vector<Literal> literals() const;

  friend bool operator==(const ProductTerm&, const ProductTerm&) = default;

 private:
  int n_inputs_ = 0;
  std::uint32_t care_ = 0;
  std::uint32_t value_ = 0;
};

/// OR of product terms. No terms = constant 0; a single empty term = constant 1.
struct SopExpression {
  int n_inputs = 0;
  std::vector<ProductTerm> terms;
  /// Set when the cover came from the greedy fallback rather than the exact search.
  bool heuristic = false;

  bool is_zero() const { return terms.empty(); }
  bool is_one() const { return terms.size() == 1 && terms.front().care() == 0; }
  bool is_constant() const { return is_zero() || is_one(); }
  int literal_count() const;

  friend bool operator==(const SopExpression&, const SopExpression&) = default;
};

struct MinimizeOptions {
  /// Upper bound on intermediate products during Petrick expansion before
  /// falling back to a greedy cover.
  std::size_t petrick_cap = 1'000'000;
  /// Throw LogicError(PetrickCapExceeded) instead of falling back.
  bool fail_on_cap = false;
};

/// Prime implicants by Quine-McCluskey merging, in a deterministic order.
std::vector<ProductTerm> prime_implicants(const TruthTable& tt);

/// Exact minimum SOP: fewest terms, then fewest literals, then the
/// lexicographically smallest plain rendering.
SopExpression minimize(const TruthTable& tt, const MinimizeOptions& opts = {});

bool evaluate(const SopExpression& sop, std::uint32_t ordinal);
/// `assignment` is a '0'/'1' string, character 0 = input A.
bool evaluate(const SopExpression& sop, const std::string& assignment);
TruthTable to_table(const SopExpression& sop);

enum class SopStyle { Plain, Tex };

/// Canonical rendering: terms by literal count then literal sequence,
/// `·` (plain) or ` \cdot ` (TeX) inside terms, ` + ` between terms.
std::string format_sop(const SopExpression& sop, SopStyle style = SopStyle::Plain);
std::string format_term(const ProductTerm& term, SopStyle style = SopStyle::Plain);
/// Sorts terms into the canonical display order.
SopExpression canonical(SopExpression sop);

/// Parses plain or TeX renderings (with or without `$` delimiters), e.g.
/// "A' + B'", "(A·B') + (B·A')", "$(A \cdot \overline{B}) + B$".
SopExpression parse_sop(int n_inputs, const std::string& text);

std::string sop_to_json(const SopExpression& sop);
SopExpression sop_from_json(const std::string& text);

}  // namespace gateminer

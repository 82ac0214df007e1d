#include <algorithm>

#include "gateminer/logic.hpp"

namespace gateminer {

std::string to_string(LogicErrorKind kind) {
  switch (kind) {
    case LogicErrorKind::LengthMismatch: return "length_mismatch";
    case LogicErrorKind::BadCharacter: return "bad_character";
    case LogicErrorKind::WidthMismatch: return "width_mismatch";
    case LogicErrorKind::BadInputCount: return "bad_input_count";
    case LogicErrorKind::PetrickCapExceeded: return "petrick_cap_exceeded";
    case LogicErrorKind::ParseError: return "parse_error";
  }
  return "unknown";
}

LogicError::LogicError(LogicErrorKind kind, const std::string& message)
    : std::runtime_error(to_string(kind) + ": " + message), kind_(kind) {}

namespace {

void check_inputs(int n_inputs) {
  if (n_inputs < 1 || n_inputs > 16) {
    throw LogicError(LogicErrorKind::BadInputCount, "n_inputs must be in 1..16, got " + std::to_string(n_inputs));
  }
}

}  // namespace

TruthTable::TruthTable(int n_inputs, std::vector<bool> outputs) : n_inputs_(n_inputs), outputs_(std::move(outputs)) {
  check_inputs(n_inputs);
  if (outputs_.size() != (std::size_t{1} << n_inputs)) {
    throw LogicError(LogicErrorKind::LengthMismatch, "a " + std::to_string(n_inputs) + "-input table needs " +
                                                         std::to_string(std::size_t{1} << n_inputs) + " rows, got " +
                                                         std::to_string(outputs_.size()));
  }
}

std::string TruthTable::bits() const {
  std::string s;
  s.reserve(outputs_.size());
  for (bool b : outputs_) s.push_back(b ? '1' : '0');
  return s;
}

TruthTable TruthTable::complement() const {
  auto flipped = outputs_;
  flipped.flip();
  return TruthTable(n_inputs_, std::move(flipped));
}

std::size_t TruthTable::ones() const { return static_cast<std::size_t>(std::count(outputs_.begin(), outputs_.end(), true)); }

std::string FunctionId::hex() const {
  if (value_ == 0) return "0";
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  Value v = value_;
  while (v != 0) {
    out.push_back(digits[static_cast<unsigned>(v & 0xF)]);
    v >>= 4;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string FunctionId::decimal() const { return value_.str(); }

FunctionId FunctionId::from_hex(const std::string& hex) {
  if (hex.empty()) throw LogicError(LogicErrorKind::ParseError, "empty hex id");
  Value v = 0;
  for (char c : hex) {
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      d = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      d = c - 'A' + 10;
    } else {
      throw LogicError(LogicErrorKind::ParseError, "bad hex id \"" + hex + "\"");
    }
    v = (v << 4) | d;
  }
  return FunctionId(std::move(v));
}

FunctionId FunctionId::from_decimal(const std::string& text) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw LogicError(LogicErrorKind::ParseError, "bad decimal id \"" + text + "\"");
  }
  return FunctionId(Value(text));
}

TruthTable table_from_bits(int n_inputs, const std::string& bits) {
  check_inputs(n_inputs);
  const std::size_t rows = std::size_t{1} << n_inputs;
  if (bits.size() != rows) {
    throw LogicError(LogicErrorKind::LengthMismatch, "expected " + std::to_string(rows) + " bits for " +
                                                         std::to_string(n_inputs) + " inputs, got " +
                                                         std::to_string(bits.size()));
  }
  std::vector<bool> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (bits[i] != '0' && bits[i] != '1') {
      throw LogicError(LogicErrorKind::BadCharacter, "bit string may only hold 0 and 1");
    }
    out[i] = bits[i] == '1';
  }
  return TruthTable(n_inputs, std::move(out));
}

FunctionId function_id(const TruthTable& tt) {
  FunctionId::Value v = 0;
  for (std::size_t i = tt.rows(); i-- > 0;) {
    v <<= 1;
    if (tt[i]) v |= 1;
  }
  return FunctionId(std::move(v));
}

TruthTable table_from_id(int n_inputs, const FunctionId& id) {
  check_inputs(n_inputs);
  const std::size_t rows = std::size_t{1} << n_inputs;
  if (boost::multiprecision::msb(id.value() | 1) >= rows) {
    throw LogicError(LogicErrorKind::LengthMismatch, "id " + id.hex() + " does not fit " + std::to_string(n_inputs) + " inputs");
  }
  std::vector<bool> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = boost::multiprecision::bit_test(id.value(), static_cast<unsigned>(i));
  return TruthTable(n_inputs, std::move(out));
}

}  // namespace gateminer

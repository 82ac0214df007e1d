#include "gateminer/logic.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

namespace gateminer {

std::string variable_name(int var) { return std::string(1, static_cast<char>('A' + var)); }

namespace {

std::uint32_t bit_of(int n_inputs, int var) { return 1U << (n_inputs - 1 - var); }

std::uint32_t full_mask(int n_inputs) { return n_inputs >= 32 ? ~0U : (1U << n_inputs) - 1U; }

}  // namespace

// ---------------------------------------------------------------------------
// ProductTerm / SopExpression

ProductTerm::ProductTerm(int n_inputs, std::uint32_t care, std::uint32_t value)
    : n_inputs_(n_inputs), care_(care), value_(value) {
  if (n_inputs < 1 || n_inputs > 16) throw LogicError(LogicErrorKind::BadInputCount, "n_inputs must be in 1..16");
  if ((care & ~full_mask(n_inputs)) != 0 || (value & ~care) != 0) {
    throw LogicError(LogicErrorKind::WidthMismatch, "product term masks exceed the input width");
  }
}

ProductTerm ProductTerm::from_literals(int n_inputs, const std::vector<Literal>& literals) {
  std::uint32_t care = 0;
  std::uint32_t value = 0;
  for (const auto& lit : literals) {
    if (lit.var < 0 || lit.var >= n_inputs) {
      throw LogicError(LogicErrorKind::WidthMismatch, "variable " + std::to_string(lit.var) + " out of range");
    }
    const std::uint32_t b = bit_of(n_inputs, lit.var);
    const std::uint32_t v = lit.negated ? 0U : b;
    if ((care & b) != 0) {
      if ((value & b) != v) {
        throw LogicError(LogicErrorKind::ParseError, "variable " + variable_name(lit.var) + " appears in both polarities");
      }
      continue;
    }
    care |= b;
    value |= v;
  }
  return ProductTerm(n_inputs, care, value);
}

int ProductTerm::literal_count() const { return std::popcount(care_); }

std::vector<Literal> ProductTerm::literals() const {
  std::vector<Literal> out;
  for (int pass = 0; pass < 2; ++pass) {
    const bool negated = pass == 1;
    for (int v = 0; v < n_inputs_; ++v) {
      const std::uint32_t b = bit_of(n_inputs_, v);
      if ((care_ & b) != 0 && ((value_ & b) == 0) == negated) out.push_back(Literal{v, negated});
    }
  }
  return out;
}

int SopExpression::literal_count() const {
  int total = 0;
  for (const auto& t : terms) total += t.literal_count();
  return total;
}

// ---------------------------------------------------------------------------
// Formatting

namespace {

bool term_order(const ProductTerm& a, const ProductTerm& b) {
  if (a.literal_count() != b.literal_count()) return a.literal_count() < b.literal_count();
  const auto la = a.literals();
  const auto lb = b.literals();
  return std::lexicographical_compare(la.begin(), la.end(), lb.begin(), lb.end());
}

}  // namespace

SopExpression canonical(SopExpression sop) {
  std::sort(sop.terms.begin(), sop.terms.end(), term_order);
  sop.terms.erase(std::unique(sop.terms.begin(), sop.terms.end()), sop.terms.end());
  return sop;
}

std::string format_term(const ProductTerm& term, SopStyle style) {
  if (term.care() == 0) return "1";
  std::string out;
  bool first = true;
  for (const auto& lit : term.literals()) {
    if (!first) out += style == SopStyle::Plain ? "·" : " \\cdot ";
    first = false;
    if (style == SopStyle::Plain) {
      out += variable_name(lit.var);
      if (lit.negated) out += '\'';
    } else {
      out += lit.negated ? "\\overline{" + variable_name(lit.var) + "}" : variable_name(lit.var);
    }
  }
  return out;
}

std::string format_sop(const SopExpression& sop, SopStyle style) {
  if (sop.is_zero()) return "0";
  if (sop.is_one()) return "1";
  const auto c = canonical(sop);
  const bool wrap = c.terms.size() > 1;
  std::string out;
  for (std::size_t i = 0; i < c.terms.size(); ++i) {
    if (i > 0) out += " + ";
    const bool paren = wrap && c.terms[i].literal_count() > 1;
    if (paren) out += '(';
    out += format_term(c.terms[i], style);
    if (paren) out += ')';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

bool evaluate(const SopExpression& sop, std::uint32_t ordinal) {
  return std::any_of(sop.terms.begin(), sop.terms.end(), [&](const ProductTerm& t) { return t.covers(ordinal); });
}

bool evaluate(const SopExpression& sop, const std::string& assignment) {
  if (assignment.size() != static_cast<std::size_t>(sop.n_inputs)) {
    throw LogicError(LogicErrorKind::WidthMismatch, "assignment has " + std::to_string(assignment.size()) +
                                                        " bits, expression has " + std::to_string(sop.n_inputs) +
                                                        " inputs");
  }
  std::uint32_t ordinal = 0;
  for (char c : assignment) {
    if (c != '0' && c != '1') throw LogicError(LogicErrorKind::BadCharacter, "assignment may only hold 0 and 1");
    ordinal = (ordinal << 1) | static_cast<std::uint32_t>(c == '1');
  }
  return evaluate(sop, ordinal);
}

TruthTable to_table(const SopExpression& sop) {
  std::vector<bool> out(std::size_t{1} << sop.n_inputs);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = evaluate(sop, static_cast<std::uint32_t>(i));
  return TruthTable(sop.n_inputs, std::move(out));
}

// ---------------------------------------------------------------------------
// Quine-McCluskey

std::vector<ProductTerm> prime_implicants(const TruthTable& tt) {
  const int n = tt.n_inputs();
  // Implicants grouped by care mask; merging only happens within a group.
  std::map<std::uint32_t, std::set<std::uint32_t>> level;
  for (std::uint32_t m = 0; m < tt.rows(); ++m) {
    if (tt[m]) level[full_mask(n)].insert(m);
  }
  std::vector<ProductTerm> primes;
  while (!level.empty()) {
    std::map<std::uint32_t, std::set<std::uint32_t>> next;
    for (const auto& [care, values] : level) {
      std::set<std::uint32_t> merged;
      for (std::uint32_t v : values) {
        for (std::uint32_t rest = care; rest != 0; rest &= rest - 1) {
          const std::uint32_t b = rest & (~rest + 1);
          if ((v & b) != 0) continue;
          if (values.count(v | b)) {
            merged.insert(v);
            merged.insert(v | b);
            next[care & ~b].insert(v);
          }
        }
      }
      for (std::uint32_t v : values) {
        if (!merged.count(v)) primes.emplace_back(n, care, v);
      }
    }
    level = std::move(next);
  }
  std::sort(primes.begin(), primes.end(), term_order);
  return primes;
}

// ---------------------------------------------------------------------------
// Cover selection

namespace {

/// Fixed-width bitset over prime-implicant indices.
struct Selection {
  std::vector<std::uint64_t> words;

  explicit Selection(std::size_t width = 0) : words((width + 63) / 64, 0) {}
  void set(std::size_t i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1U; }
  bool intersects(const Selection& o) const {
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (words[w] & o.words[w]) return true;
    }
    return false;
  }
  bool subset_of(const Selection& o) const {
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (words[w] & ~o.words[w]) return false;
    }
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words.size(); ++w) {
      for (auto bits = words[w]; bits != 0; bits &= bits - 1) out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
    }
    return out;
  }
  friend bool operator==(const Selection&, const Selection&) = default;
};

/// Deduplicating set of equal-width bitsets stored back to back.
class ProductSet {
 public:
  explicit ProductSet(std::size_t words) : words_(words), slots_(1024, kEmpty) {}

  std::size_t size() const { return count_; }
  const std::uint64_t* at(std::size_t i) const { return data_.data() + i * words_; }

  /// Returns false when an equal bitset is already present.
  bool insert(const std::uint64_t* p) {
    if ((count_ + 1) * 2 > slots_.size()) grow();
    std::size_t h = hash(p) & (slots_.size() - 1);
    while (slots_[h] != kEmpty) {
      if (std::equal(p, p + words_, at(slots_[h]))) return false;
      h = (h + 1) & (slots_.size() - 1);
    }
    slots_[h] = static_cast<std::uint32_t>(count_++);
    data_.insert(data_.end(), p, p + words_);
    return true;
  }

 private:
  static constexpr std::uint32_t kEmpty = ~0U;

  std::size_t hash(const std::uint64_t* p) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::size_t w = 0; w < words_; ++w) {
      h ^= p[w];
      h *= 0xbf58476d1ce4e5b9ULL;
      h ^= h >> 31;
    }
    return static_cast<std::size_t>(h);
  }

  void grow() {
    std::vector<std::uint32_t> bigger(slots_.size() * 2, kEmpty);
    for (std::uint32_t i = 0; i < count_; ++i) {
      std::size_t h = hash(at(i)) & (bigger.size() - 1);
      while (bigger[h] != kEmpty) h = (h + 1) & (bigger.size() - 1);
      bigger[h] = i;
    }
    slots_ = std::move(bigger);
  }

  std::size_t words_;
  std::size_t count_ = 0;
  std::vector<std::uint64_t> data_;
  std::vector<std::uint32_t> slots_;
};

SopExpression build(int n, const std::vector<ProductTerm>& primes, const std::vector<std::size_t>& chosen, bool heuristic) {
  SopExpression sop{n, {}, heuristic};
  for (auto i : chosen) sop.terms.push_back(primes[i]);
  return canonical(std::move(sop));
}

/// Greedy set cover over `clauses`, followed by removal of redundant picks.
std::vector<std::size_t> greedy_cover(const std::vector<Selection>& clauses, const std::vector<ProductTerm>& primes) {
  std::vector<bool> done(clauses.size(), false);
  std::vector<std::size_t> picked;
  std::size_t remaining = clauses.size();
  while (remaining > 0) {
    std::size_t best = primes.size();
    std::size_t best_gain = 0;
    for (std::size_t p = 0; p < primes.size(); ++p) {
      std::size_t gain = 0;
      for (std::size_t c = 0; c < clauses.size(); ++c) {
        if (!done[c] && clauses[c].test(p)) ++gain;
      }
      // primes are already in canonical order, so the first best wins ties
      if (gain > best_gain ||
          (gain == best_gain && gain > 0 && primes[p].literal_count() < primes[best].literal_count())) {
        best = p;
        best_gain = gain;
      }
    }
    picked.push_back(best);
    for (std::size_t c = 0; c < clauses.size(); ++c) {
      if (!done[c] && clauses[c].test(best)) {
        done[c] = true;
        --remaining;
      }
    }
  }
  // Drop picks whose clauses are all hit by another pick, costliest first.
  std::sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) {
    return primes[a].literal_count() > primes[b].literal_count();
  });
  for (std::size_t i = 0; i < picked.size();) {
    bool redundant = true;
    for (const auto& clause : clauses) {
      bool hit_by_other = false;
      for (std::size_t j = 0; j < picked.size(); ++j) {
        if (j != i && clause.test(picked[j])) {
          hit_by_other = true;
          break;
        }
      }
      if (!hit_by_other) {
        redundant = false;
        break;
      }
    }
    if (redundant) {
      picked.erase(picked.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

SopExpression minimize(const TruthTable& tt, const MinimizeOptions& opts) {
  const int n = tt.n_inputs();
  const std::size_t ones = tt.ones();
  if (ones == 0) return SopExpression{n, {}, false};
  if (ones == tt.rows()) return SopExpression{n, {ProductTerm(n, 0, 0)}, false};

  const auto primes = prime_implicants(tt);
  const std::size_t k = primes.size();

  // One clause per minterm: the primes covering it.
  std::vector<Selection> clauses;
  for (std::uint32_t m = 0; m < tt.rows(); ++m) {
    if (!tt[m]) continue;
    Selection s(k);
    for (std::size_t p = 0; p < k; ++p) {
      if (primes[p].covers(m)) s.set(p);
    }
    clauses.push_back(std::move(s));
  }

  // Essential primes belong to every cover.
  Selection essential(k);
  for (const auto& c : clauses) {
    if (c.count() == 1) essential.set(c.members().front());
  }
  std::vector<Selection> open;
  for (auto& c : clauses) {
    if (!c.intersects(essential)) open.push_back(std::move(c));
  }

  // Row dominance: a clause containing another clause is implied by it.
  std::sort(open.begin(), open.end(), [](const Selection& a, const Selection& b) { return a.count() < b.count(); });
  std::vector<Selection> reduced;
  for (auto& c : open) {
    bool implied = std::any_of(reduced.begin(), reduced.end(), [&](const Selection& r) { return r.subset_of(c); });
    if (!implied) reduced.push_back(std::move(c));
  }

  const auto essentials = essential.members();
  if (reduced.empty()) return build(n, primes, essentials, false);

  auto greedy = greedy_cover(reduced, primes);
  const std::size_t bound = greedy.size();

  // disjoint[i]: pairwise disjoint clauses among reduced[i..]. A product that
  // misses j of them needs at least j more primes.
  std::vector<std::vector<std::size_t>> disjoint(reduced.size() + 1);
  for (std::size_t i = reduced.size(); i-- > 0;) {
    std::vector<std::size_t> pick{i};
    Selection used = reduced[i];
    for (std::size_t j : disjoint[i + 1]) {
      if (!reduced[j].intersects(used)) {
        pick.push_back(j);
        for (std::size_t w = 0; w < used.words.size(); ++w) used.words[w] |= reduced[j].words[w];
      }
    }
    // Keep whichever set is larger; both are valid for index i.
    disjoint[i] = pick.size() >= disjoint[i + 1].size() ? std::move(pick) : disjoint[i + 1];
  }
  const std::size_t W = reduced.front().words.size();
  auto popcount = [&](const std::uint64_t* p) {
    std::size_t c = 0;
    for (std::size_t w = 0; w < W; ++w) c += static_cast<std::size_t>(std::popcount(p[w]));
    return c;
  };
  auto hits = [&](const std::uint64_t* p, const Selection& clause) {
    for (std::size_t w = 0; w < W; ++w) {
      if (p[w] & clause.words[w]) return true;
    }
    return false;
  };
  auto lower_bound = [&](const std::uint64_t* p, std::size_t from) {
    std::size_t need = popcount(p);
    for (std::size_t j : disjoint[from]) need += hits(p, reduced[j]) ? 0 : 1;
    return need;
  };

  // Petrick expansion, keeping only products that can still tie the bound.
  ProductSet products(W);
  std::vector<std::uint64_t> scratch(W, 0);
  products.insert(scratch.data());
  bool capped = false;
  for (std::size_t ci = 0; ci < reduced.size() && !capped; ++ci) {
    const auto& clause = reduced[ci];
    const auto choices = clause.members();
    ProductSet next(W);
    for (std::size_t i = 0; i < products.size(); ++i) {
      const std::uint64_t* p = products.at(i);
      if (hits(p, clause)) {
        if (lower_bound(p, ci + 1) <= bound) next.insert(p);
        continue;
      }
      if (popcount(p) + 1 > bound) continue;
      for (auto c : choices) {
        std::copy(p, p + W, scratch.begin());
        scratch[c / 64] |= std::uint64_t{1} << (c % 64);
        if (lower_bound(scratch.data(), ci + 1) <= bound) next.insert(scratch.data());
      }
      if (next.size() > opts.petrick_cap) {
        capped = true;
        break;
      }
    }
    products = std::move(next);
  }

  auto with_essentials = [&](std::vector<std::size_t> picks) {
    picks.insert(picks.end(), essentials.begin(), essentials.end());
    return picks;
  };

  if (capped) {
    if (opts.fail_on_cap) {
      throw LogicError(LogicErrorKind::PetrickCapExceeded,
                       "Petrick expansion exceeded " + std::to_string(opts.petrick_cap) + " products");
    }
    return build(n, primes, with_essentials(greedy), true);
  }

  auto members = [&](const std::uint64_t* p) {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < W; ++w) {
      for (auto bits = p[w]; bits != 0; bits &= bits - 1) out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
    }
    return out;
  };
  std::size_t best_terms = SIZE_MAX;
  for (std::size_t i = 0; i < products.size(); ++i) best_terms = std::min(best_terms, popcount(products.at(i)));
  int best_literals = INT32_MAX;
  std::vector<std::vector<std::size_t>> candidates;
  for (std::size_t i = 0; i < products.size(); ++i) {
    const std::uint64_t* p = products.at(i);
    if (popcount(p) != best_terms) continue;
    auto picks = members(p);
    int lits = 0;
    for (auto m : picks) lits += primes[m].literal_count();
    if (lits < best_literals) {
      best_literals = lits;
      candidates.clear();
    }
    if (lits == best_literals) candidates.push_back(std::move(picks));
  }
  SopExpression best;
  std::string best_text;
  for (auto& picks : candidates) {
    auto sop = build(n, primes, with_essentials(std::move(picks)), false);
    auto text = format_sop(sop);
    if (best_text.empty() || text < best_text) {
      best_text = std::move(text);
      best = std::move(sop);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Parsing and JSON

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) s.replace(pos, from.size(), to);
  return s;
}

int parse_var(int n_inputs, char c, const std::string& text) {
  if (c < 'A' || c >= 'A' + n_inputs) {
    throw LogicError(LogicErrorKind::ParseError, std::string("unknown variable '") + c + "' in \"" + text + "\"");
  }
  return c - 'A';
}

}  // namespace

SopExpression parse_sop(int n_inputs, const std::string& text) {
  if (n_inputs < 1 || n_inputs > 16) throw LogicError(LogicErrorKind::BadInputCount, "n_inputs must be in 1..16");
  std::string s;
  for (char c : text) {
    if (c != '$' && c != ' ' && c != '\t' && c != '\n' && c != '\r') s.push_back(c);
  }
  // Normalise to: '~' negation prefix, '*' conjunction.
  s = replace_all(s, "\\cdot", "*");
  s = replace_all(s, "·", "*");
  s = replace_all(s, "\\overline", "~");
  s = replace_all(s, "overline", "~");
  s = replace_all(s, "\\bar", "~");
  s = replace_all(s, "&", "*");
  s = replace_all(s, ".", "*");
  s = replace_all(s, "!", "~");
  s = replace_all(s, "|", "+");

  SopExpression sop{n_inputs, {}, false};
  if (s == "0") return sop;
  if (s == "1") {
    sop.terms.emplace_back(n_inputs, 0, 0);
    return sop;
  }
  if (s.empty()) throw LogicError(LogicErrorKind::ParseError, "empty expression");

  std::size_t i = 0;
  auto fail = [&](const std::string& why) { throw LogicError(LogicErrorKind::ParseError, why + " in \"" + text + "\""); };
  while (true) {
    bool paren = i < s.size() && s[i] == '(';
    if (paren) ++i;
    std::vector<Literal> lits;
    while (true) {
      bool neg = false;
      while (i < s.size() && s[i] == '~') {
        neg = !neg;
        ++i;
      }
      if (i >= s.size()) fail("unexpected end");
      int var;
      if (s[i] == '{') {
        if (i + 2 >= s.size() || s[i + 2] != '}') fail("expected {X}");
        var = parse_var(n_inputs, s[i + 1], text);
        i += 3;
      } else {
        var = parse_var(n_inputs, s[i], text);
        ++i;
      }
      while (i < s.size() && s[i] == '\'') {
        neg = !neg;
        ++i;
      }
      lits.push_back(Literal{var, neg});
      if (i < s.size() && s[i] == '*') {
        ++i;
        continue;
      }
      break;
    }
    if (paren) {
      if (i >= s.size() || s[i] != ')') fail("missing ')'");
      ++i;
    }
    sop.terms.push_back(ProductTerm::from_literals(n_inputs, lits));
    if (i == s.size()) break;
    if (s[i] != '+') fail(std::string("unexpected '") + s[i] + "'");
    ++i;
  }
  return canonical(std::move(sop));
}

std::string sop_to_json(const SopExpression& sop) {
  nlohmann::ordered_json j;
  j["n_inputs"] = sop.n_inputs;
  j["id_hex"] = function_id(to_table(sop)).hex();
  auto terms = nlohmann::ordered_json::array();
  for (const auto& t : canonical(sop).terms) {
    auto lits = nlohmann::ordered_json::array();
    for (const auto& l : t.literals()) {
      nlohmann::ordered_json lj;
      lj["var"] = variable_name(l.var);
      lj["neg"] = l.negated;
      lits.push_back(std::move(lj));
    }
    terms.push_back(std::move(lits));
  }
  j["terms"] = std::move(terms);
  j["heuristic"] = sop.heuristic;
  return j.dump();
}

SopExpression sop_from_json(const std::string& text) {
  SopExpression sop;
  std::string id_hex;
  try {
    auto j = nlohmann::json::parse(text);
    sop.n_inputs = j.at("n_inputs").get<int>();
    if (sop.n_inputs < 1 || sop.n_inputs > 16) throw LogicError(LogicErrorKind::BadInputCount, "n_inputs must be in 1..16");
    sop.heuristic = j.value("heuristic", false);
    id_hex = j.value("id_hex", std::string{});
    for (const auto& tj : j.at("terms")) {
      std::vector<Literal> lits;
      for (const auto& lj : tj) {
        auto name = lj.at("var").get<std::string>();
        if (name.size() != 1) throw LogicError(LogicErrorKind::ParseError, "bad variable name \"" + name + "\"");
        lits.push_back(Literal{parse_var(sop.n_inputs, name[0], text), lj.value("neg", false)});
      }
      sop.terms.push_back(ProductTerm::from_literals(sop.n_inputs, lits));
    }
  } catch (const nlohmann::json::exception& e) {
    throw LogicError(LogicErrorKind::ParseError, e.what());
  }
  sop = canonical(std::move(sop));
  if (!id_hex.empty() && FunctionId::from_hex(id_hex) != function_id(to_table(sop))) {
    throw LogicError(LogicErrorKind::ParseError, "id_hex " + id_hex + " does not match the terms");
  }
  return sop;
}

}  // namespace gateminer

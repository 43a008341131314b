#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "annplan/error.hpp"
#include "annplan/predicate.hpp"

namespace annplan {

// Text grammar for query files and the CLI:
//
//   expr   := term ( OR term )*
//   term   := factor ( AND factor )*
//   factor := '(' expr ')'
//           | attr '=' '"' label '"'
//           | attr IN interval
//           | attr ( '>' | '>=' | '<' | '<=' ) number
//
// Comparisons desugar to intervals against the attribute's declared bounds,
// so `(age > 20 AND age < 25) OR age < 10` normalizes to the union
// {[min,10), (20,25)}. OR is only legal between range clauses over the same
// attribute; OR involving label terms is rejected at parse time.
class PredicateParser {
 public:
  explicit PredicateParser(const AttributeSchema& schema) : schema_(schema) {}

  Predicate parse(std::string_view text) {
    input_ = text;
    pos_ = 0;
    skip_ws();
    if (eof()) return Predicate{};  // empty predicate matches everything
    Node root = parse_expr();
    skip_ws();
    if (!eof()) fail("unexpected trailing input");
    Predicate p;
    p.label_terms = std::move(root.labels);
    p.canonicalize_labels();
    if (!root.intervals.empty()) p.set_ranges(root.range_attr, std::move(root.intervals));
    return p;
  }

 private:
  // Conjunction of label terms with at most one interval union.
  struct Node {
    std::vector<LabelTerm> labels;
    std::string range_attr;
    std::vector<Interval> intervals;
  };

  Node parse_expr() {
    Node acc = parse_term();
    while (consume_keyword("OR")) {
      Node rhs = parse_term();
      if (!acc.labels.empty() || !rhs.labels.empty())
        fail("OR between label terms is not supported");
      if (acc.intervals.empty() || rhs.intervals.empty())
        fail("OR operand must be a range clause");
      if (acc.range_attr != rhs.range_attr)
        fail("OR of ranges over different attributes ('" + acc.range_attr + "' vs '" +
             rhs.range_attr + "') is not supported");
      acc.intervals = union_intervals(std::move(acc.intervals), rhs.intervals);
    }
    return acc;
  }

  Node parse_term() {
    Node acc = parse_factor();
    while (consume_keyword("AND")) {
      Node rhs = parse_factor();
      acc.labels.insert(acc.labels.end(), rhs.labels.begin(), rhs.labels.end());
      if (!rhs.intervals.empty()) {
        if (acc.intervals.empty()) {
          acc.range_attr = rhs.range_attr;
          acc.intervals = std::move(rhs.intervals);
        } else if (acc.range_attr != rhs.range_attr) {
          fail("range terms over multiple attributes ('" + acc.range_attr + "', '" +
               rhs.range_attr + "') are not supported");
        } else {
          acc.intervals = intersect_intervals(acc.intervals, rhs.intervals);
          if (acc.intervals.empty())
            fail("conjunction of ranges over '" + acc.range_attr + "' is empty");
        }
      }
    }
    return acc;
  }

  Node parse_factor() {
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      Node inner = parse_expr();
      expect(')');
      return inner;
    }
    std::string attr = parse_ident();
    std::size_t idx = schema_.find(attr);
    if (idx == AttributeSchema::npos) fail("unknown attribute '" + attr + "'");
    const Attribute& a = schema_.at(idx);
    skip_ws();

    if (consume_keyword("IN")) {
      require_numeric(a);
      Node n;
      n.range_attr = attr;
      n.intervals.push_back(parse_interval());
      return n;
    }
    if (peek() == '=') {
      ++pos_;
      if (a.kind != AttributeKind::Categorical)
        fail("'=' on numeric attribute '" + attr + "'; use IN or a comparison");
      Node n;
      n.labels.push_back({attr, parse_quoted()});
      return n;
    }
    char op = peek();
    if (op == '<' || op == '>') {
      ++pos_;
      bool or_equal = peek() == '=';
      if (or_equal) ++pos_;
      require_numeric(a);
      double bound = parse_number();
      Interval iv;
      if (op == '>') {
        iv.lo = bound;
        iv.lo_open = !or_equal;
        iv.hi = a.max;
        iv.hi_open = false;
      } else {
        iv.lo = a.min;
        iv.lo_open = false;
        iv.hi = bound;
        iv.hi_open = !or_equal;
      }
      if (iv.empty()) fail("comparison on '" + attr + "' excludes the declared bounds");
      Node n;
      n.range_attr = attr;
      n.intervals.push_back(iv);
      return n;
    }
    fail("expected '=', 'IN', or a comparison after attribute '" + attr + "'");
    return {};
  }

  Interval parse_interval() {
    skip_ws();
    char open = peek();
    if (open != '(' && open != '[') fail("expected '(' or '[' to open an interval");
    ++pos_;
    Interval iv;
    iv.lo = parse_number();
    iv.lo_open = open == '(';
    expect(',');
    iv.hi = parse_number();
    skip_ws();
    char close = peek();
    if (close != ')' && close != ']') fail("expected ')' or ']' to close an interval");
    ++pos_;
    iv.hi_open = close == ')';
    if (iv.lo > iv.hi) fail("interval low bound exceeds high bound");
    return iv;
  }

  std::string parse_ident() {
    skip_ws();
    std::size_t start = pos_;
    if (eof() || (!std::isalpha(static_cast<unsigned char>(peek())) && peek() != '_'))
      fail("expected attribute name");
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    return std::string(input_.substr(start, pos_ - start));
  }

  std::string parse_quoted() {
    skip_ws();
    if (peek() != '"') fail("expected a double-quoted label");
    ++pos_;
    std::size_t start = pos_;
    while (!eof() && peek() != '"') ++pos_;
    if (eof()) fail("unterminated label string");
    std::string s(input_.substr(start, pos_ - start));
    ++pos_;
    return s;
  }

  double parse_number() {
    skip_ws();
    std::size_t start = pos_;
    if (!eof() && (peek() == '-' || peek() == '+')) ++pos_;
    while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                      peek() == 'e' || peek() == 'E' ||
                      ((peek() == '-' || peek() == '+') && pos_ > start &&
                       (input_[pos_ - 1] == 'e' || input_[pos_ - 1] == 'E'))))
      ++pos_;
    double out = 0.0;
    auto [ptr, ec] =
        std::from_chars(input_.data() + start, input_.data() + pos_, out);
    if (ec != std::errc{} || ptr != input_.data() + pos_ || pos_ == start)
      fail("expected a number");
    return out;
  }

  void require_numeric(const Attribute& a) {
    if (a.kind != AttributeKind::Numeric)
      fail("range term on categorical attribute '" + a.name + "'");
  }

  bool consume_keyword(std::string_view kw) {
    skip_ws();
    if (pos_ + kw.size() > input_.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i)
      if (std::toupper(static_cast<unsigned char>(input_[pos_ + i])) != kw[i]) return false;
    std::size_t after = pos_ + kw.size();
    if (after < input_.size() &&
        (std::isalnum(static_cast<unsigned char>(input_[after])) || input_[after] == '_'))
      return false;
    pos_ = after;
    return true;
  }

  void expect(char c) {
    skip_ws();
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  char peek() const { return eof() ? '\0' : input_[pos_]; }
  bool eof() const { return pos_ >= input_.size(); }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(input_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SchemaError("predicate parse error at offset " + std::to_string(pos_) + ": " + msg);
  }

  const AttributeSchema& schema_;
  std::string_view input_;
  std::size_t pos_ = 0;
};

inline Predicate parse_predicate(const AttributeSchema& schema, std::string_view text) {
  return PredicateParser(schema).parse(text);
}

namespace detail {
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

// Canonical text form; parse_predicate(to_text(p)) reproduces p.
inline std::string predicate_to_text(const Predicate& p) {
  std::string out;
  for (std::size_t i = 0; i < p.label_terms.size(); ++i) {
    if (i) out += " AND ";
    out += p.label_terms[i].attribute + " = \"" + p.label_terms[i].label + "\"";
  }
  if (p.has_ranges()) {
    std::string ranges;
    for (std::size_t i = 0; i < p.ranges.size(); ++i) {
      const Interval& iv = p.ranges[i];
      if (i) ranges += " OR ";
      ranges += p.range_attribute + " IN ";
      ranges += iv.lo_open ? '(' : '[';
      ranges += detail::format_double(iv.lo) + "," + detail::format_double(iv.hi);
      ranges += iv.hi_open ? ')' : ']';
    }
    if (!out.empty()) {
      out += p.ranges.size() > 1 ? " AND (" + ranges + ")" : " AND " + ranges;
    } else {
      out = std::move(ranges);
    }
  }
  return out;
}

}  // namespace annplan

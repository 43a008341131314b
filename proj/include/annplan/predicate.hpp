#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "annplan/corpus.hpp"
#include "annplan/error.hpp"

namespace annplan {

// Closed/open interval over the reals. lo <= hi always holds after
// construction; a degenerate fully-open (c,c) interval is empty and gets
// dropped during normalization.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;

  bool contains(double x) const {
    if (lo_open ? !(x > lo) : !(x >= lo)) return false;
    if (hi_open ? !(x < hi) : !(x <= hi)) return false;
    return true;
  }

  bool empty() const {
    if (lo < hi) return false;
    if (lo > hi) return true;
    return lo_open || hi_open;  // point interval [c,c] is non-empty
  }

  double width() const { return hi > lo ? hi - lo : 0.0; }

  bool operator==(const Interval&) const = default;
};

namespace detail {

inline bool starts_before(const Interval& a, const Interval& b) {
  if (a.lo != b.lo) return a.lo < b.lo;
  return !a.lo_open && b.lo_open;  // closed start precedes open start at the same point
}

// a and b overlap or touch without a gap, assuming a starts no later than b.
inline bool joinable(const Interval& a, const Interval& b) {
  if (b.lo < a.hi) return true;
  if (b.lo > a.hi) return false;
  return !a.hi_open || !b.lo_open;  // [x,c) ∪ [c,y] joins; [x,c) ∪ (c,y] leaves c out
}

}  // namespace detail

// Sorts, drops empty intervals, and merges overlapping/adjacent ones, so a
// union of intervals has one canonical representation.
inline std::vector<Interval> normalize_intervals(std::vector<Interval> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](const Interval& i) { return i.empty(); }),
          v.end());
  std::sort(v.begin(), v.end(), detail::starts_before);
  std::vector<Interval> out;
  for (const Interval& cur : v) {
    if (!out.empty() && detail::joinable(out.back(), cur)) {
      Interval& prev = out.back();
      if (cur.hi > prev.hi || (cur.hi == prev.hi && prev.hi_open && !cur.hi_open)) {
        prev.hi = cur.hi;
        prev.hi_open = cur.hi_open;
      }
    } else {
      out.push_back(cur);
    }
  }
  return out;
}

inline std::vector<Interval> union_intervals(std::vector<Interval> a,
                                             const std::vector<Interval>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return normalize_intervals(std::move(a));
}

inline std::vector<Interval> intersect_intervals(const std::vector<Interval>& a,
                                                 const std::vector<Interval>& b) {
  std::vector<Interval> out;
  for (const Interval& x : a) {
    for (const Interval& y : b) {
      Interval r;
      if (x.lo > y.lo || (x.lo == y.lo && x.lo_open)) {
        r.lo = x.lo;
        r.lo_open = x.lo_open;
      } else {
        r.lo = y.lo;
        r.lo_open = y.lo_open;
      }
      if (x.hi < y.hi || (x.hi == y.hi && x.hi_open)) {
        r.hi = x.hi;
        r.hi_open = x.hi_open;
      } else {
        r.hi = y.hi;
        r.hi_open = y.hi_open;
      }
      if (r.lo < r.hi || (r.lo == r.hi && !r.lo_open && !r.hi_open)) out.push_back(r);
    }
  }
  return normalize_intervals(std::move(out));
}

struct LabelTerm {
  std::string attribute;
  std::string label;
  bool operator==(const LabelTerm&) const = default;
};

// Composable filter: a conjunction of label equalities, optionally ANDed
// with a union of intervals over exactly one numeric attribute. The empty
// predicate matches every row.
struct Predicate {
  std::vector<LabelTerm> label_terms;    // AND-joined, kept sorted and unique
  std::string range_attribute;           // empty when there are no range terms
  std::vector<Interval> ranges;          // OR-joined union, normalized

  bool empty() const { return label_terms.empty() && ranges.empty(); }
  std::size_t num_labels() const { return label_terms.size(); }
  bool has_ranges() const { return !ranges.empty(); }

  void add_label(std::string attribute, std::string label) {
    label_terms.push_back({std::move(attribute), std::move(label)});
    canonicalize_labels();
  }

  void set_ranges(std::string attribute, std::vector<Interval> intervals) {
    std::vector<Interval> norm = normalize_intervals(std::move(intervals));
    if (norm.empty()) throw InputError("predicate: range term list normalizes to empty");
    range_attribute = std::move(attribute);
    ranges = std::move(norm);
  }

  void canonicalize_labels() {
    std::sort(label_terms.begin(), label_terms.end(),
              [](const LabelTerm& a, const LabelTerm& b) {
                if (a.attribute != b.attribute) return a.attribute < b.attribute;
                return a.label < b.label;
              });
    label_terms.erase(std::unique(label_terms.begin(), label_terms.end()), label_terms.end());
  }

  bool operator==(const Predicate&) const = default;
};

// Predicate with attribute names resolved to raw column pointers and labels
// to interned codes, so per-row evaluation is a handful of integer/double
// compares with no variant dispatch. A label absent from the corpus
// dictionary matches no row. The predicate borrows the corpus's columns and
// must not outlive it.
class CompiledPredicate {
 public:
  CompiledPredicate() = default;

  CompiledPredicate(const VectorCorpus& corpus, const Predicate& p) {
    for (const LabelTerm& t : p.label_terms) {
      std::size_t attr = corpus.schema().require(t.attribute);
      if (corpus.schema().at(attr).kind != AttributeKind::Categorical)
        throw SchemaError("label term on non-categorical attribute '" + t.attribute + "'");
      const CategoricalColumn& col = corpus.categorical(attr);
      label_checks_.push_back({col.codes.data(), col.code_of(t.label)});
    }
    if (p.has_ranges()) {
      std::size_t attr = corpus.schema().require(p.range_attribute);
      if (corpus.schema().at(attr).kind != AttributeKind::Numeric)
        throw SchemaError("range term on non-numeric attribute '" + p.range_attribute + "'");
      range_values_ = corpus.numeric(attr).values.data();
      ranges_ = p.ranges;
    }
  }

  bool matches(std::size_t row) const {
    for (const auto& c : label_checks_)
      if (c.codes[row] != c.code) return false;  // kNoCode never equals a stored code
    if (range_values_) {
      double v = range_values_[row];
      for (const Interval& iv : ranges_) {
        if (v < iv.lo) return false;  // intervals are sorted and disjoint
        if (iv.contains(v)) return true;
      }
      return false;
    }
    return true;
  }

  bool matches(const VectorCorpus&, std::size_t row) const { return matches(row); }

 private:
  struct LabelCheck {
    const uint32_t* codes;
    uint32_t code;
  };
  std::vector<LabelCheck> label_checks_;
  const double* range_values_ = nullptr;
  std::vector<Interval> ranges_;
};

// True iff all label terms hold and, when range terms exist, the row's
// range-attribute value lies in the interval union.
inline bool eval_predicate(const VectorCorpus& corpus, std::size_t row, const Predicate& p) {
  return CompiledPredicate(corpus, p).matches(corpus, row);
}

}  // namespace annplan

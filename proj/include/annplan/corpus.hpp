#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "annplan/error.hpp"

namespace annplan {

enum class AttributeKind { Categorical, Numeric };

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::Categorical;
  // Declared bounds, meaningful for numeric attributes only.
  double min = 0.0;
  double max = 0.0;
};

class AttributeSchema {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  AttributeSchema() = default;
  explicit AttributeSchema(std::vector<Attribute> attrs) : attrs_(std::move(attrs)) {
    for (std::size_t i = 0; i < attrs_.size(); ++i) {
      const Attribute& a = attrs_[i];
      if (a.name.empty()) throw SchemaError("schema: empty attribute name");
      if (by_name_.count(a.name)) throw SchemaError("schema: duplicate attribute '" + a.name + "'");
      if (a.kind == AttributeKind::Numeric && !(a.min < a.max))
        throw SchemaError("schema: numeric attribute '" + a.name + "' requires min < max");
      by_name_.emplace(a.name, i);
    }
  }

  std::size_t size() const { return attrs_.size(); }
  const Attribute& at(std::size_t i) const { return attrs_[i]; }
  const std::vector<Attribute>& attributes() const { return attrs_; }

  std::size_t find(const std::string& name) const {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? npos : it->second;
  }

  // Throwing lookup used by predicate compilation.
  std::size_t require(const std::string& name) const {
    std::size_t i = find(name);
    if (i == npos) throw SchemaError("unknown attribute '" + name + "'");
    return i;
  }

 private:
  std::vector<Attribute> attrs_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

// One metadata value: interned label code for categorical columns, 64-bit
// real for numeric ones. Strings are interned per attribute.
using AttrValue = std::variant<std::string, double>;

struct CategoricalColumn {
  std::vector<uint32_t> codes;          // one per row
  std::vector<std::string> dictionary;  // code -> label
  std::unordered_map<std::string, uint32_t> lookup;

  static constexpr uint32_t kNoCode = std::numeric_limits<uint32_t>::max();

  uint32_t intern(const std::string& label) {
    auto it = lookup.find(label);
    if (it != lookup.end()) return it->second;
    uint32_t code = static_cast<uint32_t>(dictionary.size());
    dictionary.push_back(label);
    lookup.emplace(label, code);
    return code;
  }

  uint32_t code_of(const std::string& label) const {
    auto it = lookup.find(label);
    return it == lookup.end() ? kNoCode : it->second;
  }
};

struct NumericColumn {
  std::vector<double> values;  // one per row
};

// Dense float vectors plus per-row metadata under a declared schema.
// Immutable after construction; all accessors are safe for concurrent reads.
class VectorCorpus {
 public:
  VectorCorpus() = default;

  VectorCorpus(AttributeSchema schema, std::size_t n, std::size_t d)
      : schema_(std::move(schema)), n_(n), d_(d), vectors_(n * d, 0.0f) {
    if (n < 1 || d < 1) throw InputError("corpus requires N >= 1 and D >= 1");
    columns_.reserve(schema_.size());
    for (const Attribute& a : schema_.attributes()) {
      if (a.kind == AttributeKind::Categorical) {
        CategoricalColumn c;
        c.codes.assign(n, CategoricalColumn::kNoCode);
        columns_.emplace_back(std::move(c));
      } else {
        NumericColumn c;
        c.values.assign(n, 0.0);
        columns_.emplace_back(std::move(c));
      }
    }
  }

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  const AttributeSchema& schema() const { return schema_; }

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(vectors_.data() + i * d_, d_);
  }
  std::span<float> row_mut(std::size_t i) {
    return std::span<float>(vectors_.data() + i * d_, d_);
  }
  const std::vector<float>& raw_vectors() const { return vectors_; }

  void set_label(std::size_t row, std::size_t attr, const std::string& label) {
    auto& col = std::get<CategoricalColumn>(columns_.at(attr));
    col.codes[row] = col.intern(label);
  }
  void set_numeric(std::size_t row, std::size_t attr, double v) {
    std::get<NumericColumn>(columns_.at(attr)).values[row] = v;
  }

  void set_value(std::size_t row, std::size_t attr, const AttrValue& v) {
    const Attribute& a = schema_.at(attr);
    if (a.kind == AttributeKind::Categorical) {
      if (!std::holds_alternative<std::string>(v))
        throw SchemaError("attribute '" + a.name + "' expects a label");
      set_label(row, attr, std::get<std::string>(v));
    } else {
      if (!std::holds_alternative<double>(v))
        throw SchemaError("attribute '" + a.name + "' expects a numeric value");
      set_numeric(row, attr, std::get<double>(v));
    }
  }

  bool is_categorical(std::size_t attr) const {
    return schema_.at(attr).kind == AttributeKind::Categorical;
  }

  const CategoricalColumn& categorical(std::size_t attr) const {
    const Attribute& a = schema_.at(attr);
    if (a.kind != AttributeKind::Categorical)
      throw SchemaError("attribute '" + a.name + "' is not categorical");
    return std::get<CategoricalColumn>(columns_[attr]);
  }

  const NumericColumn& numeric(std::size_t attr) const {
    const Attribute& a = schema_.at(attr);
    if (a.kind != AttributeKind::Numeric)
      throw SchemaError("attribute '" + a.name + "' is not numeric");
    return std::get<NumericColumn>(columns_[attr]);
  }

  uint32_t label_code(std::size_t row, std::size_t attr) const {
    return std::get<CategoricalColumn>(columns_[attr]).codes[row];
  }
  double numeric_value(std::size_t row, std::size_t attr) const {
    return std::get<NumericColumn>(columns_[attr]).values[row];
  }

  const std::string& label_at(std::size_t row, std::size_t attr) const {
    const auto& col = categorical(attr);
    uint32_t code = col.codes[row];
    if (code == CategoricalColumn::kNoCode)
      throw DataError("row " + std::to_string(row) + " has no value for attribute " +
                      schema_.at(attr).name);
    return col.dictionary[code];
  }

  // Every row must have a full record: all categorical codes assigned and
  // all vector components finite.
  void validate() const;

 private:
  AttributeSchema schema_;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<float> vectors_;
  std::vector<std::variant<CategoricalColumn, NumericColumn>> columns_;
};

inline void VectorCorpus::validate() const {
  for (std::size_t a = 0; a < schema_.size(); ++a) {
    if (schema_.at(a).kind != AttributeKind::Categorical) continue;
    const auto& col = std::get<CategoricalColumn>(columns_[a]);
    for (std::size_t i = 0; i < n_; ++i)
      if (col.codes[i] == CategoricalColumn::kNoCode)
        throw DataError("row " + std::to_string(i) + " missing value for attribute '" +
                        schema_.at(a).name + "'");
  }
  for (float v : vectors_)
    if (!std::isfinite(v)) throw DataError("corpus contains a non-finite vector component");
}

}  // namespace annplan

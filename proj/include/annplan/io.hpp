#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "annplan/corpus.hpp"
#include "annplan/error.hpp"
#include "annplan/serialize.hpp"

namespace annplan {

// Vector files use the de-facto fvecs layout: per record a 32-bit
// little-endian dimension followed by that many 32-bit little-endian floats.
inline void save_fvecs(const VectorCorpus& corpus, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  ByteWriter w;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    w.u32(static_cast<uint32_t>(corpus.dim()));
    for (float v : corpus.row(i)) w.f32(v);
  }
  const std::string& bytes = w.bytes();
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("short write to '" + path + "'");
}

struct FvecsData {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<float> values;  // row-major
};

inline FvecsData load_fvecs(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  ByteReader r(bytes, path);
  FvecsData out;
  while (!r.exhausted()) {
    std::size_t record_start = r.offset();
    uint32_t dim = r.u32();
    if (dim == 0)
      throw IoError(path + ": zero dimension at byte offset " + std::to_string(record_start));
    if (out.n == 0) {
      out.d = dim;
    } else if (dim != out.d) {
      throw IoError(path + ": dimension " + std::to_string(dim) + " at byte offset " +
                    std::to_string(record_start) + " differs from first record (" +
                    std::to_string(out.d) + ")");
    }
    for (uint32_t j = 0; j < dim; ++j) out.values.push_back(r.f32());
    ++out.n;
  }
  if (out.n == 0) throw IoError(path + ": no records");
  return out;
}

inline nlohmann::json schema_to_json(const AttributeSchema& schema) {
  nlohmann::json attrs = nlohmann::json::array();
  for (const Attribute& a : schema.attributes()) {
    nlohmann::json e;
    e["name"] = a.name;
    e["kind"] = a.kind == AttributeKind::Categorical ? "categorical" : "numeric";
    if (a.kind == AttributeKind::Numeric) {
      e["min"] = a.min;
      e["max"] = a.max;
    }
    attrs.push_back(std::move(e));
  }
  return nlohmann::json{{"attributes", std::move(attrs)}};
}

inline AttributeSchema schema_from_json(const nlohmann::json& j, const std::string& origin) {
  if (!j.contains("attributes") || !j["attributes"].is_array())
    throw IoError(origin + ": schema file needs an 'attributes' array");
  std::vector<Attribute> attrs;
  for (const auto& e : j["attributes"]) {
    Attribute a;
    a.name = e.value("name", "");
    std::string kind = e.value("kind", "");
    if (kind == "categorical") {
      a.kind = AttributeKind::Categorical;
    } else if (kind == "numeric") {
      a.kind = AttributeKind::Numeric;
      if (!e.contains("min") || !e.contains("max"))
        throw IoError(origin + ": numeric attribute '" + a.name + "' needs min and max");
      a.min = e["min"].get<double>();
      a.max = e["max"].get<double>();
    } else {
      throw IoError(origin + ": attribute '" + a.name + "' has unknown kind '" + kind + "'");
    }
    attrs.push_back(std::move(a));
  }
  return AttributeSchema(std::move(attrs));
}

inline void save_schema(const AttributeSchema& schema, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << schema_to_json(schema).dump(2) << "\n";
}

inline AttributeSchema load_schema(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) throw IoError(path + ": malformed schema JSON");
  return schema_from_json(j, path);
}

// Metadata is line-delimited JSON, one object per row keyed by attribute
// name: {"color": "green", "age": 22.5}.
inline void save_metadata(const VectorCorpus& corpus, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    nlohmann::json row;
    for (std::size_t a = 0; a < corpus.schema().size(); ++a) {
      const Attribute& attr = corpus.schema().at(a);
      if (attr.kind == AttributeKind::Categorical) {
        row[attr.name] = corpus.label_at(i, a);
      } else {
        row[attr.name] = corpus.numeric_value(i, a);
      }
    }
    f << row.dump() << "\n";
  }
  if (!f) throw IoError("short write to '" + path + "'");
}

inline VectorCorpus load_corpus(const std::string& vector_file, const std::string& metadata_file,
                                const std::string& schema_file) {
  AttributeSchema schema = load_schema(schema_file);
  FvecsData vectors = load_fvecs(vector_file);

  VectorCorpus corpus(schema, vectors.n, vectors.d);
  for (std::size_t i = 0; i < vectors.n; ++i) {
    auto row = corpus.row_mut(i);
    std::copy(vectors.values.begin() + static_cast<std::ptrdiff_t>(i * vectors.d),
              vectors.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * vectors.d),
              row.begin());
  }

  std::ifstream f(metadata_file);
  if (!f) throw IoError("cannot open '" + metadata_file + "'");
  std::string line;
  std::size_t row = 0;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (row >= vectors.n)
      throw IoError(metadata_file + ":" + std::to_string(line_no) +
                    ": more metadata records than vectors (" + std::to_string(vectors.n) + ")");
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw IoError(metadata_file + ":" + std::to_string(line_no) + ": malformed record");
    for (std::size_t a = 0; a < schema.size(); ++a) {
      const Attribute& attr = schema.at(a);
      if (!j.contains(attr.name))
        throw IoError(metadata_file + ":" + std::to_string(line_no) + ": missing attribute '" +
                      attr.name + "'");
      const auto& v = j[attr.name];
      if (attr.kind == AttributeKind::Categorical) {
        if (!v.is_string())
          throw IoError(metadata_file + ":" + std::to_string(line_no) + ": attribute '" +
                        attr.name + "' must be a string");
        corpus.set_label(row, a, v.get<std::string>());
      } else {
        if (!v.is_number())
          throw IoError(metadata_file + ":" + std::to_string(line_no) + ": attribute '" +
                        attr.name + "' must be numeric");
        corpus.set_numeric(row, a, v.get<double>());
      }
    }
    ++row;
  }
  if (row != vectors.n)
    throw IoError(metadata_file + ": " + std::to_string(row) + " metadata records for " +
                  std::to_string(vectors.n) + " vectors");
  corpus.validate();
  return corpus;
}

inline void save_corpus(const VectorCorpus& corpus, const std::string& vector_file,
                        const std::string& metadata_file, const std::string& schema_file) {
  save_fvecs(corpus, vector_file);
  save_metadata(corpus, metadata_file);
  save_schema(corpus.schema(), schema_file);
}

// Identity hash over vectors and metadata; reports carry it so results can
// be tied back to the exact dataset build.
inline uint64_t corpus_fingerprint(const VectorCorpus& corpus) {
  ByteWriter w;
  w.u64(corpus.size());
  w.u64(corpus.dim());
  for (float v : corpus.raw_vectors()) w.f32(v);
  for (std::size_t a = 0; a < corpus.schema().size(); ++a) {
    if (corpus.schema().at(a).kind == AttributeKind::Categorical) {
      for (std::size_t i = 0; i < corpus.size(); ++i) w.str(corpus.label_at(i, a));
    } else {
      for (double v : corpus.numeric(a).values) w.f64(v);
    }
  }
  return fnv1a64(w.bytes());
}

}  // namespace annplan

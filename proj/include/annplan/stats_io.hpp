#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "annplan/serialize.hpp"
#include "annplan/stats.hpp"

namespace annplan {

namespace detail {

inline std::string schema_payload(const AttributeSchema& schema) {
  ByteWriter w;
  w.u32(static_cast<uint32_t>(schema.size()));
  for (const Attribute& a : schema.attributes()) {
    w.str(a.name);
    w.u8(a.kind == AttributeKind::Categorical ? 0 : 1);
    w.f64(a.min);
    w.f64(a.max);
  }
  return w.take();
}

inline AttributeSchema read_schema(ByteReader r) {
  uint32_t count = r.u32();
  std::vector<Attribute> attrs;
  attrs.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    Attribute a;
    a.name = r.str();
    a.kind = r.u8() == 0 ? AttributeKind::Categorical : AttributeKind::Numeric;
    a.min = r.f64();
    a.max = r.f64();
    attrs.push_back(std::move(a));
  }
  return AttributeSchema(std::move(attrs));
}

// Hash tables dump as (key, count) pairs in ascending key order so the
// serialized form is canonical.
inline std::string sorted_table_payload(const std::unordered_map<uint64_t, uint64_t>& table) {
  std::vector<std::pair<uint64_t, uint64_t>> rows(table.begin(), table.end());
  std::sort(rows.begin(), rows.end());
  ByteWriter w;
  w.u64(rows.size());
  for (const auto& [k, v] : rows) {
    w.u64(k);
    w.u64(v);
  }
  return w.take();
}

}  // namespace detail

inline std::string serialize_stats(const DatasetStats& s) {
  ContainerWriter c("stats");
  c.header()["seed"] = s.seed;
  c.header()["bins"] = s.bins;
  c.header()["sample_rate"] = s.sample_rate;

  c.add_section("SCHEMA", detail::schema_payload(s.schema));

  ByteWriter global;
  global.u64(s.n);
  global.u64(s.d);
  global.f64(s.distribution_measure);
  c.add_section("GLOBAL", global.take());

  ByteWriter labels;
  labels.u32(static_cast<uint32_t>(s.labels.size()));
  for (const auto& e : s.labels) {
    labels.u32(e.attr);
    labels.str(e.label);
    labels.u64(e.count);
  }
  c.add_section("LABELS", labels.take());

  c.add_section("PAIRCNT", detail::sorted_table_payload(s.pair_table()));
  c.add_section("LBLRANGE", detail::sorted_table_payload(s.label_range_table()));

  ByteWriter hist;
  hist.u32(static_cast<uint32_t>(s.histograms.size()));
  for (const auto& h : s.histograms) {
    hist.u8(h.empty() ? 0 : 1);
    if (!h.empty()) {
      hist.u32(static_cast<uint32_t>(h.size()));
      for (uint64_t count : h) hist.u64(count);
    }
  }
  c.add_section("HISTOGRM", hist.take());

  ByteWriter sample;
  sample.u64(s.sample_ids.size());
  for (uint64_t id : s.sample_ids) sample.u64(id);
  c.add_section("SAMPLE", sample.take());

  return c.serialize();
}

inline void save_stats(const DatasetStats& s, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  std::string bytes = serialize_stats(s);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("short write to '" + path + "'");
}

inline DatasetStats load_stats_container(const ContainerReader& c) {
  c.require_kind("stats");
  DatasetStats s;
  s.seed = c.header().value("seed", 0ull);
  s.bins = c.header().value("bins", DatasetStats::kDefaultBins);
  s.sample_rate = c.header().value("sample_rate", 0.0);
  s.schema = detail::read_schema(c.section("SCHEMA"));

  ByteReader global = c.section("GLOBAL");
  s.n = global.u64();
  s.d = global.u64();
  s.distribution_measure = global.f64();

  ByteReader labels = c.section("LABELS");
  uint32_t nlabels = labels.u32();
  for (uint32_t i = 0; i < nlabels; ++i) {
    uint32_t attr = labels.u32();
    std::string name = labels.str();
    uint64_t count = labels.u64();
    uint32_t gid = s.intern_label(attr, name);
    s.labels[gid].count = count;
  }

  ByteReader pairs = c.section("PAIRCNT");
  uint64_t npairs = pairs.u64();
  for (uint64_t i = 0; i < npairs; ++i) {
    uint64_t key = pairs.u64();
    uint64_t count = pairs.u64();
    s.set_pair_count(static_cast<uint32_t>(key >> 32), static_cast<uint32_t>(key & 0xffffffffu),
                     count);
  }

  ByteReader lr = c.section("LBLRANGE");
  uint64_t nlr = lr.u64();
  for (uint64_t i = 0; i < nlr; ++i) {
    uint64_t key = lr.u64();
    uint64_t count = lr.u64();
    s.set_label_range_count(static_cast<uint32_t>(key >> 16),
                            static_cast<uint32_t>((key >> 8) & 0xff),
                            static_cast<uint32_t>(key & 0xff), count);
  }

  ByteReader hist = c.section("HISTOGRM");
  uint32_t nattrs = hist.u32();
  s.histograms.assign(nattrs, {});
  for (uint32_t a = 0; a < nattrs; ++a) {
    if (hist.u8() == 0) continue;
    uint32_t bins = hist.u32();
    s.histograms[a].resize(bins);
    for (uint32_t b = 0; b < bins; ++b) s.histograms[a][b] = hist.u64();
  }

  ByteReader sample = c.section("SAMPLE");
  uint64_t nsample = sample.u64();
  s.sample_ids.resize(nsample);
  for (uint64_t i = 0; i < nsample; ++i) s.sample_ids[i] = sample.u64();

  return s;
}

inline DatasetStats load_stats(const std::string& path) {
  return load_stats_container(ContainerReader::from_file(path));
}

// Identity of a stats build; planner containers carry it so loading a
// planner against different stats can be detected.
inline uint64_t stats_fingerprint(const DatasetStats& s) { return fnv1a64(serialize_stats(s)); }

}  // namespace annplan

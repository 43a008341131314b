#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "annplan/error.hpp"

namespace annplan {

// All persistent artifacts (stats, models, indexes) share one container:
//
//   bytes 0..3   magic "ANPL"
//   u32 LE       header length
//   header       JSON text: {"version":1, "kind":..., ...}
//   sections     repeated [8-byte tag][u64 LE payload length][payload]
//
// Payloads are explicit little-endian scalars written byte by byte, so files
// are portable regardless of host endianness.
constexpr uint32_t kContainerVersion = 1;
constexpr char kContainerMagic[4] = {'A', 'N', 'P', 'L'};

class ByteWriter {
 public:
  void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i32(int32_t v) { u32(static_cast<uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    buf_.append(s);
  }
  void raw(const void* p, std::size_t len) { buf_.append(static_cast<const char*>(p), len); }

  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(const char* data, std::size_t size, std::string origin = "buffer")
      : data_(data), size_(size), origin_(std::move(origin)) {}
  explicit ByteReader(const std::string& s, std::string origin = "buffer")
      : ByteReader(s.data(), s.size(), std::move(origin)) {}

  uint8_t u8() { return static_cast<uint8_t>(take(1)[0]); }
  uint32_t u32() {
    const char* p = take(4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<uint8_t>(p[i]);
    return v;
  }
  uint64_t u64() {
    const char* p = take(8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<uint8_t>(p[i]);
    return v;
  }
  int32_t i32() { return static_cast<int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    uint32_t len = u32();
    const char* p = take(len);
    return std::string(p, len);
  }

  std::size_t offset() const { return pos_; }
  bool exhausted() const { return pos_ >= size_; }

 private:
  const char* take(std::size_t len) {
    if (pos_ + len > size_)
      throw IoError(origin_ + ": truncated at byte offset " + std::to_string(pos_));
    const char* p = data_ + pos_;
    pos_ += len;
    return p;
  }

  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string origin_;
};

class ContainerWriter {
 public:
  explicit ContainerWriter(std::string kind) { header_["kind"] = std::move(kind); }

  nlohmann::json& header() { return header_; }

  void add_section(const std::string& tag, std::string payload) {
    if (tag.size() > 8) throw ConfigError("section tag too long: " + tag);
    sections_.emplace_back(tag, std::move(payload));
  }

  std::string serialize() const {
    nlohmann::json h = header_;
    h["version"] = kContainerVersion;
    std::string htext = h.dump();
    ByteWriter out;
    out.raw(kContainerMagic, 4);
    out.u32(static_cast<uint32_t>(htext.size()));
    out.raw(htext.data(), htext.size());
    for (const auto& [tag, payload] : sections_) {
      std::string padded = tag;
      padded.resize(8, ' ');
      out.raw(padded.data(), 8);
      out.u64(payload.size());
      out.raw(payload.data(), payload.size());
    }
    return out.take();
  }

  void write_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    std::string bytes = serialize();
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("short write to '" + path + "'");
  }

 private:
  nlohmann::json header_;
  std::vector<std::pair<std::string, std::string>> sections_;
};

class ContainerReader {
 public:
  ContainerReader(std::string bytes, std::string origin) : origin_(std::move(origin)) {
    bytes_ = std::move(bytes);
    ByteReader r(bytes_, origin_);
    char magic[4];
    std::memcpy(magic, bytes_.data(), std::min<std::size_t>(4, bytes_.size()));
    if (bytes_.size() < 8 || std::memcmp(magic, kContainerMagic, 4) != 0)
      throw IoError(origin_ + ": not an annplan container (bad magic)");
    r.u32();  // skip magic as u32
    uint32_t hlen = r.u32();
    if (8 + static_cast<std::size_t>(hlen) > bytes_.size())
      throw IoError(origin_ + ": truncated header");
    header_ = nlohmann::json::parse(bytes_.substr(8, hlen), nullptr, false);
    if (header_.is_discarded()) throw IoError(origin_ + ": malformed JSON header");
    uint32_t version = header_.value("version", 0u);
    if (version != kContainerVersion)
      throw IoError(origin_ + ": container version " + std::to_string(version) +
                    " != supported version " + std::to_string(kContainerVersion));
    std::size_t pos = 8 + hlen;
    while (pos < bytes_.size()) {
      if (pos + 16 > bytes_.size())
        throw IoError(origin_ + ": truncated section header at byte offset " +
                      std::to_string(pos));
      std::string tag = bytes_.substr(pos, 8);
      while (!tag.empty() && tag.back() == ' ') tag.pop_back();
      ByteReader lr(bytes_.data() + pos + 8, 8, origin_);
      uint64_t len = lr.u64();
      pos += 16;
      if (pos + len > bytes_.size())
        throw IoError(origin_ + ": truncated section '" + tag + "' at byte offset " +
                      std::to_string(pos));
      sections_[tag] = {pos, static_cast<std::size_t>(len)};
      pos += len;
    }
  }

  static ContainerReader from_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return ContainerReader(std::move(bytes), path);
  }

  const nlohmann::json& header() const { return header_; }
  const std::string& kind() const {
    static const std::string empty;
    auto it = header_.find("kind");
    if (it == header_.end()) return empty;
    return it->get_ref<const std::string&>();
  }

  bool has_section(const std::string& tag) const { return sections_.count(tag) > 0; }

  ByteReader section(const std::string& tag) const {
    auto it = sections_.find(tag);
    if (it == sections_.end())
      throw IoError(origin_ + ": missing section '" + tag + "'");
    return ByteReader(bytes_.data() + it->second.first, it->second.second,
                      origin_ + ":" + tag);
  }

  void require_kind(const std::string& expected) const {
    if (kind() != expected)
      throw IoError(origin_ + ": expected kind '" + expected + "', found '" + kind() + "'");
  }

 private:
  std::string bytes_;
  std::string origin_;
  nlohmann::json header_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> sections_;
};

inline uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace annplan

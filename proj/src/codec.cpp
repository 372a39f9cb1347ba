// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include "datacase/codec.hpp"

#include <zlib.h>

#include <cstring>

namespace datacase {

void ByteWriter::u16(std::uint16_t v) {
  buf_.push_back(static_cast<std::uint8_t>(v));
  buf_.push_back(static_cast<std::uint8_t>(v >> 8));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::lp_string(const std::string& s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::lp_bytes(std::span<const std::uint8_t> b) {
  u32(static_cast<std::uint32_t>(b.size()));
  bytes(b);
}

bool ByteReader::need(size_t n) {
  if (failed_ || pos_ + n > data_.size()) {
    failed_ = true;
    return false;
  }
  return true;
}

std::uint8_t ByteReader::u8() {
  if (!need(1)) return 0;
  return data_[pos_++];
}

std::uint16_t ByteReader::u16() {
  if (!need(2)) return 0;
  std::uint16_t v = static_cast<std::uint16_t>(data_[pos_]) |
                    static_cast<std::uint16_t>(data_[pos_ + 1]) << 8;
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32() {
  if (!need(4)) return 0;
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  if (!need(8)) return 0;
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

std::string ByteReader::lp_string() {
  std::uint32_t n = u32();
  if (!need(n)) return {};
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
  pos_ += n;
  return s;
}

std::vector<std::uint8_t> ByteReader::lp_bytes() {
  std::uint32_t n = u32();
  if (!need(n)) return {};
  std::vector<std::uint8_t> b(data_.begin() + pos_, data_.begin() + pos_ + n);
  pos_ += n;
  return b;
}

void ByteReader::skip(size_t n) {
  if (need(n)) pos_ += n;
}

std::uint32_t crc32_of(std::span<const std::uint8_t> data) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

namespace {

std::uint64_t fnv1a64(std::span<const std::uint8_t> data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (std::uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

StateDigest digest_of(std::span<const std::uint8_t> data) {
  StateDigest d;
  std::uint64_t a = fnv1a64(data, 0xcbf29ce484222325ULL);
  std::uint64_t b = fnv1a64(data, 0x84222325cbf29ce4ULL) ^ (a * 0x9e3779b97f4a7c15ULL);
  std::memcpy(d.data(), &a, 8);
  std::memcpy(d.data() + 8, &b, 8);
  return d;
}

std::vector<std::uint8_t> encode_unit(const DataUnit& u, std::vector<ValueRange>* ranges) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(u.category));
  w.lp_string(u.id);
  w.u16(static_cast<std::uint16_t>(u.subjects.size()));
  for (const auto& s : u.subjects) {
    w.u8(static_cast<std::uint8_t>(s.kind));
    w.lp_string(s.id);
  }
  w.u16(static_cast<std::uint16_t>(u.origins.size()));
  for (const auto& o : u.origins) w.lp_string(o);
  w.u16(static_cast<std::uint16_t>(u.policies.size()));
  for (const auto& p : u.policies) {
    w.lp_string(p.purpose.name);
    w.u8(static_cast<std::uint8_t>(p.entity.kind));
    w.lp_string(p.entity.id);
    w.u64(p.t_b);
    w.u64(p.t_f);
  }
  w.u16(static_cast<std::uint16_t>(u.values.size()));
  if (ranges) ranges->clear();
  for (const auto& v : u.values) {
    w.u64(v.at);
    w.u32(static_cast<std::uint32_t>(v.bytes.size()));
    if (ranges) {
      ranges->push_back({static_cast<std::uint32_t>(w.size()),
                         static_cast<std::uint32_t>(v.bytes.size())});
    }
    w.bytes(v.bytes);
  }
  return w.take();
}

Result<DataUnit> decode_unit(std::span<const std::uint8_t> payload, std::vector<ValueRange>* ranges) {
  ByteReader r(payload);
  DataUnit u;
  u.category = static_cast<UnitCategory>(r.u8());
  u.id = r.lp_string();
  const std::uint16_t nsubj = r.u16();
  for (std::uint16_t i = 0; i < nsubj && !r.failed(); ++i) {
    EntityId e;
    e.kind = static_cast<EntityKind>(r.u8());
    e.id = r.lp_string();
    u.subjects.push_back(std::move(e));
  }
  const std::uint16_t norig = r.u16();
  for (std::uint16_t i = 0; i < norig && !r.failed(); ++i) u.origins.push_back(r.lp_string());
  const std::uint16_t npol = r.u16();
  for (std::uint16_t i = 0; i < npol && !r.failed(); ++i) {
    PolicyTuple p;
    p.purpose.name = r.lp_string();
    p.entity.kind = static_cast<EntityKind>(r.u8());
    p.entity.id = r.lp_string();
    p.t_b = r.u64();
    p.t_f = r.u64();
    u.policies.push_back(std::move(p));
  }
  const std::uint16_t nval = r.u16();
  if (ranges) ranges->clear();
  for (std::uint16_t i = 0; i < nval && !r.failed(); ++i) {
    ValueVersion v;
    v.at = r.u64();
    const std::uint32_t len = r.u32();
    if (ranges) ranges->push_back({static_cast<std::uint32_t>(r.pos()), len});
    if (r.pos() + len > payload.size()) {
      return Status(Code::kCorruption, "unit payload truncated");
    }
    v.bytes.assign(payload.begin() + r.pos(), payload.begin() + r.pos() + len);
    r.skip(len);
    u.values.push_back(std::move(v));
  }
  if (r.failed() || !r.exhausted()) {
    return Status(Code::kCorruption, "malformed unit payload");
  }
  return u;
}

std::vector<std::uint8_t> encode_action_record(const ActionRecord& r) {
  ByteWriter w;
  w.lp_string(r.unit_id);
  w.lp_string(r.purpose.name);
  w.u8(static_cast<std::uint8_t>(r.entity.kind));
  w.lp_string(r.entity.id);
  w.u8(static_cast<std::uint8_t>(r.action.type));
  w.u8(static_cast<std::uint8_t>(r.action.erase_mode));
  w.u64(r.time);
  w.u8(r.regulation_required ? 1 : 0);
  w.u8(r.redacted ? 1 : 0);
  w.u8(r.redact_reason);
  w.bytes(r.state_digest);
  return w.take();
}

Result<ActionRecord> decode_action_record(std::span<const std::uint8_t> payload) {
  ByteReader rd(payload);
  ActionRecord r;
  r.unit_id = rd.lp_string();
  r.purpose.name = rd.lp_string();
  r.entity.kind = static_cast<EntityKind>(rd.u8());
  r.entity.id = rd.lp_string();
  r.action.type = static_cast<ActionType>(rd.u8());
  r.action.erase_mode = static_cast<ErasureMode>(rd.u8());
  r.time = rd.u64();
  r.regulation_required = rd.u8() != 0;
  r.redacted = rd.u8() != 0;
  r.redact_reason = rd.u8();
  for (auto& b : r.state_digest) b = rd.u8();
  if (rd.failed() || !rd.exhausted()) {
    return Status(Code::kCorruption, "malformed action record");
  }
  return r;
}

StateDigest unit_state_digest(const DataUnit& u) {
  const auto payload = encode_unit(u);
  return digest_of(payload);
}

std::string hex_encode(std::span<const std::uint8_t> data) {
  static const char* kHex = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xf]);
  }
  return out;
}

}  // namespace datacase

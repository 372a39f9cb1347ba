// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "datacase/status.hpp"
#include "datacase/types.hpp"

namespace datacase {

// Little-endian, length-prefixed binary encoding shared by the segment
// and ledger file formats.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void lp_string(const std::string& s);
  void lp_bytes(std::span<const std::uint8_t> b);

  size_t size() const { return buf_.size(); }
  const std::vector<std::uint8_t>& data() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::string lp_string();
  std::vector<std::uint8_t> lp_bytes();
  void skip(size_t n);

  size_t pos() const { return pos_; }
  bool failed() const { return failed_; }
  bool exhausted() const { return pos_ == data_.size(); }

 private:
  bool need(size_t n);
  std::span<const std::uint8_t> data_;
  size_t pos_ = 0;
  bool failed_ = false;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> data);

// Non-cryptographic 128-bit digest (two FNV-1a passes with distinct
// bases). Used for ledger state digests; not invertible.
StateDigest digest_of(std::span<const std::uint8_t> data);

// Byte range within an encoded unit payload holding one value version.
struct ValueRange {
  std::uint32_t offset = 0;  // relative to payload start
  std::uint32_t length = 0;
};

// Unit payload encoding. The returned ranges locate each value version's
// bytes inside the payload so they can be rewritten in place.
std::vector<std::uint8_t> encode_unit(const DataUnit& u, std::vector<ValueRange>* ranges = nullptr);
Result<DataUnit> decode_unit(std::span<const std::uint8_t> payload,
                             std::vector<ValueRange>* ranges = nullptr);

std::vector<std::uint8_t> encode_action_record(const ActionRecord& r);
Result<ActionRecord> decode_action_record(std::span<const std::uint8_t> payload);

// Digest of a unit's current state (subjects, origins, values, policies).
StateDigest unit_state_digest(const DataUnit& u);

std::string hex_encode(std::span<const std::uint8_t> data);

}  // namespace datacase

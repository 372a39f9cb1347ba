// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "datacase/status.hpp"
#include "datacase/types.hpp"

namespace datacase {

enum class RedactionReason : std::uint8_t {
  kStrongDelete = 1,
  kPermanentDelete = 2,
};

struct RedactionMark {
  std::uint64_t position = 0;
  Timestamp redacted_at = 0;
  RedactionReason reason = RedactionReason::kStrongDelete;
};

// Append-only action history. Records are durable on append and
// immutable except for payload redaction, which replaces the state
// digest with a fixed sentinel in place, keeping all structural fields.
// Single logical writer; reads are safe from concurrent threads only
// when serialized by the owner (the store does this).
class Ledger {
 public:
  Ledger();
  ~Ledger();
  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  // Opens or creates the ledger file. Trailing records that fail their
  // CRC are dropped as a torn tail.
  Status open(const std::filesystem::path& path);
  void close();

  // Fails with kTimeRegression when r.time precedes the last record.
  Result<std::uint64_t> append(const ActionRecord& r);

  // Records for unit_id in append (= time) order; empty for unknown ids.
  std::vector<ActionRecord> history_of(const std::string& unit_id) const;

  // Replaces the payload digest of every record of unit_id with the
  // sentinel and appends one regulation-required record describing the
  // redaction. Returns the number of records whose payload changed.
  Result<std::uint64_t> redact_values(const std::string& unit_id, RedactionReason reason,
                                      Timestamp t);

  std::vector<std::uint64_t> audit_scan(
      const std::function<bool(const ActionRecord&)>& pred) const;

  const std::vector<ActionRecord>& records() const { return records_; }
  const ActionRecord* record_at(std::uint64_t position) const;
  std::uint64_t size() const { return records_.size(); }
  const std::vector<RedactionMark>& redaction_marks() const { return marks_; }

  // One JSON object per line: unit_id, purpose, entity, action, time,
  // regulation_required, redacted.
  void export_ndjson(std::ostream& out) const;

  std::uint64_t file_bytes() const;
  void sync();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::vector<ActionRecord> records_;
  std::vector<std::uint64_t> offsets_;  // record start offsets in the file
  std::vector<RedactionMark> marks_;
};

// Entity stamped on engine-generated bookkeeping records (redaction
// notices, escrow transitions).
inline const EntityId kStoreEntity{EntityKind::kController, "store"};

}  // namespace datacase

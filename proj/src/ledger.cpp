// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include "datacase/ledger.hpp"

#include <nlohmann/json.hpp>

#include "datacase/codec.hpp"
#include "file_io.hpp"

namespace datacase {

namespace {
constexpr std::uint8_t kLedgerMagic[4] = {'D', 'C', 'L', 'G'};
constexpr std::uint8_t kLedgerVersion = 1;
constexpr std::uint64_t kHeaderSize = 5;
}  // namespace

struct Ledger::Impl {
  RandomAccessFile file;
};

Ledger::Ledger() = default;
Ledger::~Ledger() = default;

void Ledger::close() {
  if (impl_) impl_->file.close();
  impl_.reset();
  records_.clear();
  offsets_.clear();
  marks_.clear();
}

Status Ledger::open(const std::filesystem::path& path) {
  close();
  impl_ = std::make_unique<Impl>();
  Status st = impl_->file.open(path, /*create=*/true);
  if (!st.is_ok()) return st;

  if (impl_->file.size() == 0) {
    ByteWriter w;
    w.bytes(kLedgerMagic);
    w.u8(kLedgerVersion);
    return impl_->file.append(w.data());
  }

  std::vector<std::uint8_t> head(kHeaderSize);
  st = impl_->file.read_at(0, head);
  if (!st.is_ok()) return st;
  if (std::memcmp(head.data(), kLedgerMagic, 4) != 0 || head[4] != kLedgerVersion) {
    return Status(Code::kCorruption, "not a ledger file: " + path.string());
  }

  std::uint64_t off = kHeaderSize;
  const std::uint64_t end = impl_->file.size();
  while (off + 8 <= end) {
    std::vector<std::uint8_t> hdr(8);
    st = impl_->file.read_at(off, hdr);
    if (!st.is_ok()) return st;
    ByteReader hr(hdr);
    const std::uint32_t len = hr.u32();
    const std::uint32_t crc = hr.u32();
    if (off + 8 + len > end) break;  // torn tail
    std::vector<std::uint8_t> payload(len);
    st = impl_->file.read_at(off + 8, payload);
    if (!st.is_ok()) return st;
    if (crc32_of(payload) != crc) break;  // torn or corrupt tail record
    auto rec = decode_action_record(payload);
    if (!rec.is_ok()) break;
    if (rec.value().redacted) {
      marks_.push_back({records_.size(), rec.value().time,
                        static_cast<RedactionReason>(rec.value().redact_reason)});
    }
    offsets_.push_back(off);
    records_.push_back(rec.take());
    off += 8 + len;
  }
  if (off < end) {
    return impl_->file.truncate(off);  // drop the torn tail so appends stay parseable
  }
  return Status::ok();
}

Result<std::uint64_t> Ledger::append(const ActionRecord& r) {
  if (!impl_) return Status(Code::kIoError, "ledger not open");
  if (!records_.empty() && r.time < records_.back().time) {
    return Status(Code::kTimeRegression, "record time precedes ledger tail");
  }
  const auto payload = encode_action_record(r);
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.u32(crc32_of(payload));
  w.bytes(payload);
  std::uint64_t off = 0;
  Status st = impl_->file.append(w.data(), &off);
  if (!st.is_ok()) return st;
  offsets_.push_back(off);
  records_.push_back(r);
  return static_cast<std::uint64_t>(records_.size() - 1);
}

std::vector<ActionRecord> Ledger::history_of(const std::string& unit_id) const {
  std::vector<ActionRecord> out;
  for (const auto& r : records_) {
    if (r.unit_id == unit_id) out.push_back(r);
  }
  return out;
}

Result<std::uint64_t> Ledger::redact_values(const std::string& unit_id, RedactionReason reason,
                                            Timestamp t) {
  if (!impl_) return Status(Code::kIoError, "ledger not open");
  bool known = false;
  std::uint64_t changed = 0;
  for (std::uint64_t i = 0; i < records_.size(); ++i) {
    ActionRecord& r = records_[i];
    if (r.unit_id != unit_id) continue;
    known = true;
    if (r.state_digest == kRedactedSentinel) continue;  // payload already gone
    r.state_digest = kRedactedSentinel;
    r.redacted = true;
    r.redact_reason = static_cast<std::uint8_t>(reason);
    const auto payload = encode_action_record(r);
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(payload.size()));
    w.u32(crc32_of(payload));
    w.bytes(payload);
    Status st = impl_->file.write_at(offsets_[i], w.data());
    if (!st.is_ok()) return st;
    marks_.push_back({i, t, reason});
    ++changed;
  }
  if (!known) return Status(Code::kUnknownUnit, "no records for unit " + unit_id);

  ActionRecord note;
  note.unit_id = unit_id;
  note.purpose = Purpose{kCompliancePurpose};
  note.entity = kStoreEntity;
  note.action = {ActionType::kUpdateMetadata, {}};
  note.state_digest = kRedactedSentinel;
  note.time = std::max(t, records_.empty() ? t : records_.back().time);
  note.regulation_required = true;
  note.redact_reason = static_cast<std::uint8_t>(reason);
  auto appended = append(note);
  if (!appended.is_ok()) return appended.status();
  return changed;
}

std::vector<std::uint64_t> Ledger::audit_scan(
    const std::function<bool(const ActionRecord&)>& pred) const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < records_.size(); ++i) {
    if (pred(records_[i])) out.push_back(i);
  }
  return out;
}

const ActionRecord* Ledger::record_at(std::uint64_t position) const {
  if (position >= records_.size()) return nullptr;
  return &records_[position];
}

void Ledger::export_ndjson(std::ostream& out) const {
  for (const auto& r : records_) {
    nlohmann::json j;
    j["unit_id"] = r.unit_id;
    j["purpose"] = r.purpose.name;
    j["entity"] = r.entity.to_string();
    j["action"] = r.action.to_string();
    j["time"] = r.time;
    j["regulation_required"] = r.regulation_required;
    j["redacted"] = r.redacted;
    out << j.dump() << "\n";
  }
}

std::uint64_t Ledger::file_bytes() const { return impl_ ? impl_->file.size() : 0; }

void Ledger::sync() {
  if (impl_) impl_->file.sync();
}

}  // namespace datacase

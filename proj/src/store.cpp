// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include "datacase/store.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstring>
#include <deque>

#include "datacase/codec.hpp"
#include "datacase/rng.hpp"
#include "file_io.hpp"

namespace datacase {

namespace {

constexpr std::uint8_t kSegmentMagic[8] = {'D', 'C', 'S', 'E', 'G', 'M', 'T', 0};
constexpr std::uint8_t kSegmentVersion = 1;
constexpr std::uint64_t kSegmentHeader = 9;
constexpr std::uint64_t kRecordHeader = 10;  // u32 len, u8 flags, u8 status, u32 crc

constexpr std::uint8_t kFlagTombstone = 1 << 0;
constexpr std::uint8_t kFlagEscrowed = 1 << 1;
constexpr std::uint8_t kFlagWiped = 1 << 2;
constexpr std::uint8_t kFlagEncrypted = 1 << 3;

std::filesystem::path segment_path(const std::filesystem::path& dir, std::uint32_t id) {
  return dir / "segments" / ("seg-" + std::to_string(id) + ".dat");
}

bool erased_status(ErasureStatus s) { return s >= ErasureStatus::kDeleted; }

}  // namespace

struct Store::Files {
  std::map<std::uint32_t, RandomAccessFile> segments;
  std::uint32_t active = 0;
  RandomAccessFile denied;
  DirLock lock;
};

Store::~Store() {
  if (files_) {
    save_manifest();
  }
}

Result<std::unique_ptr<Store>> Store::open(const std::filesystem::path& dir,
                                           const StoreOptions& options) {
  std::unique_ptr<Store> s(new Store());
  s->dir_ = dir;
  s->options_ = options;
  s->files_ = std::make_unique<Files>();

  std::error_code ec;
  std::filesystem::create_directories(dir / "segments", ec);
  if (ec) return Status(Code::kIoError, "cannot create store directory " + dir.string());

  Status st = s->files_->lock.acquire(dir);
  if (!st.is_ok()) return st;

  st = s->load_manifest();
  if (!st.is_ok()) return st;
  st = s->load_escrow();
  if (!st.is_ok()) return st;
  st = s->ledger_.open(dir / "actions.log");
  if (!st.is_ok()) return st;
  st = s->files_->denied.open(dir / "denied.log", /*create=*/true);
  if (!st.is_ok()) return st;
  st = s->scan_segments();
  if (!st.is_ok()) return st;
  st = s->save_manifest();
  if (!st.is_ok()) return st;
  return s;
}

Status Store::load_manifest() {
  const auto path = dir_ / "manifest.json";
  if (!std::filesystem::exists(path)) {
    return Status::ok();  // fresh store; save_manifest persists the options
  }
  std::string text;
  {
    RandomAccessFile f;
    Status st = f.open(path, /*create=*/false);
    if (!st.is_ok()) return st;
    text.resize(f.size());
    st = f.read_at(0, std::span<std::uint8_t>(reinterpret_cast<std::uint8_t*>(text.data()),
                                              text.size()));
    if (!st.is_ok()) return st;
  }
  nlohmann::json j = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return Status(Code::kCorruption, "manifest.json is not valid JSON");
  }
  if (j.value("version", 0) != 1) return Status(Code::kCorruption, "unsupported manifest version");
  // Persisted storage options win over caller options: the data on disk
  // was written under them.
  options_.encrypt_at_rest = j.value("encrypt_at_rest", false);
  options_.encryption_seed = j.value("encryption_seed", std::uint64_t{0});
  options_.segment_max_bytes = j.value("segment_max_bytes", options_.segment_max_bytes);
  next_unit_seq_ = j.value("next_unit_seq", std::uint64_t{0});
  for (const auto& je : j.value("edges", nlohmann::json::array())) {
    ProvenanceEdge e;
    e.derived_id = je.value("derived", "");
    for (const auto& in : je.value("inputs", nlohmann::json::array())) {
      e.input_ids.push_back(in.get<std::string>());
    }
    e.f_descriptor = je.value("f", "");
    e.invertible = je.value("invertible", false);
    e.subjects_identifiable = je.value("identifiable", true);
    Status st = graph_.add_edge(std::move(e));
    if (!st.is_ok()) return Status(Code::kCorruption, "manifest edge rejected: " + st.to_string());
  }
  return Status::ok();
}

Status Store::save_manifest() {
  nlohmann::json j;
  j["version"] = 1;
  j["encrypt_at_rest"] = options_.encrypt_at_rest;
  j["encryption_seed"] = options_.encryption_seed;
  j["segment_max_bytes"] = options_.segment_max_bytes;
  j["next_unit_seq"] = next_unit_seq_;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : graph_.edges()) {
    nlohmann::json je;
    je["derived"] = e.derived_id;
    je["inputs"] = e.input_ids;
    je["f"] = e.f_descriptor;
    je["invertible"] = e.invertible;
    je["identifiable"] = e.subjects_identifiable;
    edges.push_back(je);
  }
  j["edges"] = edges;
  return write_file_atomic(dir_ / "manifest.json", j.dump(2) + "\n");
}

Status Store::load_escrow() {
  const auto path = dir_ / "escrow.bin";
  if (!std::filesystem::exists(path)) return Status::ok();
  RandomAccessFile f;
  Status st = f.open(path, /*create=*/false);
  if (!st.is_ok()) return st;
  std::vector<std::uint8_t> buf(f.size());
  st = f.read_at(0, buf);
  if (!st.is_ok()) return st;
  if (buf.size() < 5 || std::memcmp(buf.data(), "DCES", 4) != 0 || buf[4] != 1) {
    return Status(Code::kCorruption, "escrow.bin malformed");
  }
  ByteReader r(std::span<const std::uint8_t>(buf).subspan(5));
  while (!r.exhausted() && !r.failed()) {
    EscrowEntry e;
    e.unit_id = r.lp_string();
    e.transform_key = r.u64();
    e.created_at = r.u64();
    if (r.failed()) return Status(Code::kCorruption, "escrow.bin truncated");
    escrow_[e.unit_id] = e;
  }
  return Status::ok();
}

Status Store::save_escrow() {
  ByteWriter w;
  w.bytes(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("DCES"), 4));
  w.u8(1);
  for (const auto& [id, e] : escrow_) {
    w.lp_string(id);
    w.u64(e.transform_key);
    w.u64(e.created_at);
  }
  return write_file_atomic(dir_ / "escrow.bin",
                           std::string(reinterpret_cast<const char*>(w.data().data()), w.size()));
}

Status Store::open_segment(std::uint32_t id, bool create) {
  auto& f = files_->segments[id];
  Status st = f.open(segment_path(dir_, id), create);
  if (!st.is_ok()) return st;
  if (f.size() == 0) {
    ByteWriter w;
    w.bytes(kSegmentMagic);
    w.u8(kSegmentVersion);
    return f.append(w.data());
  }
  std::vector<std::uint8_t> head(kSegmentHeader);
  st = f.read_at(0, head);
  if (!st.is_ok()) return st;
  if (std::memcmp(head.data(), kSegmentMagic, 8) != 0 || head[8] != kSegmentVersion) {
    return Status(Code::kCorruption, "not a segment file: " + f.path());
  }
  return Status::ok();
}

Status Store::scan_segments() {
  std::vector<std::uint32_t> ids;
  for (const auto& ent : std::filesystem::directory_iterator(dir_ / "segments")) {
    const std::string name = ent.path().filename().string();
    if (name.rfind("seg-", 0) == 0 && name.size() > 8 &&
        name.substr(name.size() - 4) == ".dat") {
      ids.push_back(static_cast<std::uint32_t>(std::stoul(name.substr(4, name.size() - 8))));
    }
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty()) {
    files_->active = 0;
    return open_segment(0, /*create=*/true);
  }
  files_->active = ids.back();

  for (std::uint32_t id : ids) {
    Status st = open_segment(id, /*create=*/false);
    if (!st.is_ok()) return st;
    auto& f = files_->segments[id];
    std::uint64_t off = kSegmentHeader;
    const std::uint64_t end = f.size();
    while (off + kRecordHeader <= end) {
      std::vector<std::uint8_t> hdr(kRecordHeader);
      st = f.read_at(off, hdr);
      if (!st.is_ok()) return st;
      ByteReader hr(hdr);
      const std::uint32_t len = hr.u32();
      const std::uint8_t flags = hr.u8();
      const std::uint8_t status = hr.u8();
      const std::uint32_t crc = hr.u32();
      if (off + kRecordHeader + len > end) {
        st = f.truncate(off);  // torn tail; keep the segment appendable
        if (!st.is_ok()) return st;
        break;
      }
      std::vector<std::uint8_t> payload(len);
      st = f.read_at(off + kRecordHeader, payload);
      if (!st.is_ok()) return st;
      const std::uint64_t record_off = off;
      off += kRecordHeader + len;
      if (crc32_of(payload) != crc) {
        continue;  // bad CRC: treated as tombstoned, reclaimed by compaction
      }
      std::vector<ValueRange> ranges;
      auto decoded = decode_unit(payload, &ranges);
      if (!decoded.is_ok()) continue;
      DataUnit u = decoded.take();
      Slot slot;
      slot.segment = id;
      slot.offset = record_off;
      slot.payload_len = len;
      slot.flags = flags;
      slot.ranges = std::move(ranges);
      auto& entry = units_[u.id];
      for (auto& v : u.values) v.bytes.clear();
      entry.meta = std::move(u);
      entry.status = static_cast<ErasureStatus>(status);
      entry.slots.push_back(std::move(slot));
    }
    if (off < f.size()) {
      Status st = f.truncate(off);  // partial record header at the tail
      if (!st.is_ok()) return st;
    }
  }
  return Status::ok();
}

Status Store::roll_segment_if_needed(std::uint64_t upcoming) {
  auto& f = files_->segments[files_->active];
  if (f.size() > kSegmentHeader && f.size() + upcoming > options_.segment_max_bytes) {
    return open_segment(++files_->active, /*create=*/true);
  }
  return Status::ok();
}

Status Store::append_record(const std::string&, const std::vector<std::uint8_t>& payload,
                            std::uint8_t flags, ErasureStatus status,
                            const std::vector<ValueRange>& ranges, Slot* out) {
  Status st = roll_segment_if_needed(kRecordHeader + payload.size());
  if (!st.is_ok()) return st;
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(payload.size()));
  w.u8(flags);
  w.u8(static_cast<std::uint8_t>(status));
  w.u32(crc32_of(payload));
  w.bytes(payload);
  auto& f = files_->segments[files_->active];
  std::uint64_t off = 0;
  st = f.append(w.data(), &off);
  if (!st.is_ok()) return st;
  out->segment = files_->active;
  out->offset = off;
  out->payload_len = static_cast<std::uint32_t>(payload.size());
  out->flags = flags;
  out->ranges = ranges;
  return Status::ok();
}

Status Store::patch_flags(Slot& slot, std::uint8_t flags) {
  auto& f = files_->segments[slot.segment];
  const std::uint8_t b[1] = {flags};
  Status st = f.write_at(slot.offset + 4, b);
  if (st.is_ok()) slot.flags = flags;
  return st;
}

Status Store::patch_status(const Slot& slot, ErasureStatus status) {
  auto& f = files_->segments[slot.segment];
  const std::uint8_t b[1] = {static_cast<std::uint8_t>(status)};
  return f.write_at(slot.offset + 5, b);
}

Status Store::rewrite_payload(Slot& slot, const std::vector<std::uint8_t>& payload) {
  if (payload.size() != slot.payload_len) {
    return Status(Code::kCorruption, "in-place rewrite must preserve payload length");
  }
  auto& f = files_->segments[slot.segment];
  ByteWriter w;
  w.u32(crc32_of(payload));
  w.bytes(payload);
  return f.write_at(slot.offset + 6, w.data());
}

Result<std::vector<std::uint8_t>> Store::read_payload(const Slot& slot) const {
  auto it = files_->segments.find(slot.segment);
  if (it == files_->segments.end()) return Status(Code::kIoError, "segment missing");
  std::vector<std::uint8_t> payload(slot.payload_len);
  Status st = it->second.read_at(slot.offset + kRecordHeader, payload);
  if (!st.is_ok()) return st;
  return payload;
}

std::uint64_t Store::encryption_tweak(const std::string& unit_id, size_t version_index) const {
  std::uint64_t h = mix64(options_.encryption_seed ^ 0xE4C0DE5EED5EEDULL);
  for (char c : unit_id) h = mix64(h ^ static_cast<std::uint8_t>(c));
  return mix64(h ^ (0xA11CE + static_cast<std::uint64_t>(version_index) * 0x10001));
}

std::uint64_t Store::escrow_tweak(std::uint64_t key, size_t version_index) const {
  return mix64(key ^ (0xE5C7 + static_cast<std::uint64_t>(version_index) * 0x2000116ULL));
}

Status Store::ledger_time_check(Timestamp t) const {
  std::lock_guard<std::mutex> lk(ledger_mutex_);
  if (!ledger_.records().empty() && t < ledger_.records().back().time) {
    return Status(Code::kTimeRegression, "action time precedes ledger tail");
  }
  return Status::ok();
}

Status Store::authorize(const DataUnit& meta, ActionKind kind, const EntityId& e, const Purpose& p,
                        Timestamp t, bool regulation_required) {
  // Purpose-action map is a stricter layer and applies regardless of the
  // metadata exemption.
  if (!options_.purpose_action_map.empty()) {
    auto it = options_.purpose_action_map.find(p.name);
    if (it != options_.purpose_action_map.end() && !it->second.contains(kind.type)) {
      return Status(Code::kPolicyDenied,
                    "purpose " + p.name + " does not authorize " + kind.to_string());
    }
  }
  if (meta.category == UnitCategory::kMetadata && !options_.metadata_units_policy_checked) {
    return Status::ok();
  }
  ActionRecord probe;
  probe.unit_id = meta.id;
  probe.purpose = p;
  probe.entity = e;
  probe.action = kind;
  probe.time = t;
  probe.regulation_required = regulation_required;
  if (!is_policy_consistent(probe, state_at(meta, t))) {
    return Status(Code::kPolicyDenied, "no active policy for (" + p.name + ", " + e.to_string() +
                                           ") on unit " + meta.id);
  }
  return Status::ok();
}

void Store::log_denied(const std::string& unit_id, ActionKind kind, const EntityId& e,
                       const Purpose& p, Timestamp t, const char* reason) {
  nlohmann::json j;
  j["time"] = t;
  j["unit_id"] = unit_id;
  j["entity"] = e.to_string();
  j["purpose"] = p.name;
  j["action"] = kind.to_string();
  j["reason"] = reason;
  const std::string line = j.dump() + "\n";
  // Denials can come from concurrent readers; serialize the append.
  std::lock_guard<std::mutex> lk(ledger_mutex_);
  files_->denied.append(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(line.data()), line.size()));
}

Status Store::append_history(const std::string& unit_id, ActionType type, ErasureMode mode,
                             const EntityId& e, const Purpose& p, Timestamp t,
                             bool regulation_required, const StateDigest& digest) {
  ActionRecord r;
  r.unit_id = unit_id;
  r.purpose = p;
  r.entity = e;
  r.action = {type, mode};
  r.state_digest = digest;
  r.time = t;
  r.regulation_required = regulation_required;
  std::lock_guard<std::mutex> lk(ledger_mutex_);
  auto res = ledger_.append(r);
  return res.is_ok() ? Status::ok() : res.status();
}

Result<std::string> Store::put(DataUnit unit, const EntityId& e, const Purpose& p, Timestamp t,
                               bool regulation_required) {
  std::unique_lock lk(mutex_);
  if (unit.category == UnitCategory::kDerived) {
    return Status(Code::kInvalidArgument, "derived units are created via derive()");
  }
  std::sort(unit.subjects.begin(), unit.subjects.end());
  unit.subjects.erase(std::unique(unit.subjects.begin(), unit.subjects.end()),
                      unit.subjects.end());
  std::sort(unit.origins.begin(), unit.origins.end());
  unit.origins.erase(std::unique(unit.origins.begin(), unit.origins.end()), unit.origins.end());
  Status st = unit.validate();
  if (!st.is_ok()) return st;
  if (units_.contains(unit.id)) {
    return Status(Code::kDuplicateId, "unit already exists: " + unit.id);
  }
  st = ledger_time_check(t);
  if (!st.is_ok()) return st;
  st = authorize(unit, {ActionType::kCreate, {}}, e, p, t, regulation_required);
  if (!st.is_ok()) {
    if (st.code() == Code::kPolicyDenied) {
      log_denied(unit.id, {ActionType::kCreate, {}}, e, p, t, "PolicyDenied");
    }
    return st;
  }

  std::vector<std::uint8_t> plain_latest;
  if (!unit.values.empty()) plain_latest = unit.values.back().bytes;

  std::uint8_t flags = 0;
  if (options_.encrypt_at_rest) {
    flags |= kFlagEncrypted;
    for (size_t i = 0; i < unit.values.size(); ++i) {
      xor_keystream(unit.values[i].bytes, encryption_tweak(unit.id, i));
    }
  }
  std::vector<ValueRange> ranges;
  const auto payload = encode_unit(unit, &ranges);

  UnitEntry entry;
  Slot slot;
  st = append_record(unit.id, payload, flags, ErasureStatus::kLive, ranges, &slot);
  if (!st.is_ok()) return st;
  entry.slots.push_back(std::move(slot));
  for (auto& v : unit.values) v.bytes.clear();
  entry.meta = std::move(unit);
  entry.status = ErasureStatus::kLive;
  const std::string id = entry.meta.id;
  units_[id] = std::move(entry);
  if (options_.enable_value_cache && !plain_latest.empty()) {
    cache_[id] = CachedValue{plain_latest, digest_of(payload)};
  }

  st = append_history(id, ActionType::kCreate, {}, e, p, t, regulation_required,
                      digest_of(payload));
  if (!st.is_ok()) return st;
  return id;
}

Result<std::vector<std::uint8_t>> Store::get(const std::string& unit_id, const EntityId& e,
                                             const Purpose& p, Timestamp t) {
  std::shared_lock lk(mutex_);
  auto it = units_.find(unit_id);
  if (it == units_.end()) return Status(Code::kUnknownUnit, "unknown unit: " + unit_id);
  UnitEntry& entry = it->second;
  if (entry.status != ErasureStatus::kLive) {
    return Status(Code::kInaccessible, std::string("unit is ") + erasure_status_name(entry.status));
  }
  Status st = ledger_time_check(t);
  if (!st.is_ok()) return st;
  st = authorize(entry.meta, {ActionType::kRead, {}}, e, p, t, /*regulation_required=*/false);
  if (!st.is_ok()) {
    if (st.code() == Code::kPolicyDenied) {
      log_denied(unit_id, {ActionType::kRead, {}}, e, p, t, "PolicyDenied");
    }
    return st;
  }
  if (entry.meta.values.empty()) {
    return Status(Code::kUnknownUnit, "unit has no value versions: " + unit_id);
  }

  std::vector<std::uint8_t> value;
  StateDigest digest{};
  {
    std::lock_guard<std::mutex> clk(ledger_mutex_);
    auto cached = cache_.find(unit_id);
    if (cached != cache_.end()) {
      value = cached->second.bytes;
      digest = cached->second.digest;
    }
  }
  if (value.empty()) {
    const Slot& slot = entry.slots.back();
    auto payload = read_payload(slot);
    if (!payload.is_ok()) return payload.status();
    if (slot.ranges.empty()) return Status(Code::kUnknownUnit, "no stored value");
    const ValueRange r = slot.ranges.back();
    value.assign(payload.value().begin() + r.offset,
                 payload.value().begin() + r.offset + r.length);
    if (slot.flags & kFlagEncrypted) {
      xor_keystream(value, encryption_tweak(unit_id, slot.ranges.size() - 1));
    }
    digest = digest_of(payload.value());
    if (options_.enable_value_cache) {
      std::lock_guard<std::mutex> clk(ledger_mutex_);
      cache_[unit_id] = CachedValue{value, digest};
    }
  }
  st = append_history(unit_id, ActionType::kRead, {}, e, p, t, false, digest);
  if (!st.is_ok()) return st;
  return value;
}

Result<DataUnit> Store::load_full_unit(const UnitEntry& entry) const {
  auto payload = read_payload(entry.slots.back());
  if (!payload.is_ok()) return payload.status();
  auto decoded = decode_unit(payload.value());
  if (!decoded.is_ok()) return decoded.status();
  return decoded.take();  // value bytes as stored (possibly encrypted)
}

Status Store::rewrite_unit(UnitEntry& entry, const DataUnit& full) {
  std::uint8_t flags = entry.slots.back().flags & kFlagEncrypted;
  std::vector<ValueRange> ranges;
  const auto payload = encode_unit(full, &ranges);
  Slot slot;
  Status st = append_record(full.id, payload, flags, entry.status, ranges, &slot);
  if (!st.is_ok()) return st;
  Slot& old = entry.slots.back();
  st = patch_flags(old, static_cast<std::uint8_t>(old.flags | kFlagTombstone));
  if (!st.is_ok()) return st;
  entry.slots.push_back(std::move(slot));
  entry.meta = full;
  for (auto& v : entry.meta.values) v.bytes.clear();
  return Status::ok();
}

Result<std::uint64_t> Store::update_value(const std::string& unit_id,
                                          std::vector<std::uint8_t> value, const EntityId& e,
                                          const Purpose& p, Timestamp t) {
  std::unique_lock lk(mutex_);
  auto it = units_.find(unit_id);
  if (it == units_.end()) return Status(Code::kUnknownUnit, "unknown unit: " + unit_id);
  UnitEntry& entry = it->second;
  if (entry.status != ErasureStatus::kLive) {
    return Status(Code::kInaccessible, std::string("unit is ") + erasure_status_name(entry.status));
  }
  Status st = ledger_time_check(t);
  if (!st.is_ok()) return st;
  if (!entry.meta.values.empty() && t <= entry.meta.values.back().at) {
    return Status(Code::kTimeRegression, "version time must exceed the latest version");
  }
  st = authorize(entry.meta, {ActionType::kUpdateValue, {}}, e, p, t, false);
  if (!st.is_ok()) {
    if (st.code() == Code::kPolicyDenied) {
      log_denied(unit_id, {ActionType::kUpdateValue, {}}, e, p, t, "PolicyDenied");
    }
    return st;
  }
  auto full = load_full_unit(entry);
  if (!full.is_ok()) return full.status();
  const std::vector<std::uint8_t> plain = value;
  if (entry.slots.back().flags & kFlagEncrypted) {
    xor_keystream(value, encryption_tweak(unit_id, full.value().values.size()));
  }
  full.value().values.push_back(ValueVersion{std::move(value), t});
  st = rewrite_unit(entry, full.value());
  if (!st.is_ok()) return st;
  const auto new_payload = read_payload(entry.slots.back());
  const StateDigest digest =
      new_payload.is_ok() ? digest_of(new_payload.value()) : StateDigest{};
  if (options_.enable_value_cache) cache_[unit_id] = CachedValue{plain, digest};

  st = append_history(unit_id, ActionType::kUpdateValue, {}, e, p, t, false, digest);
  if (!st.is_ok()) return st;
  return static_cast<std::uint64_t>(entry.meta.values.size());
}

Result<std::uint64_t> Store::add_policy(const std::string& unit_id, const PolicyTuple& policy,
                                        const EntityId& e, const Purpose& p, Timestamp t) {
  std::unique_lock lk(mutex_);
  auto it = units_.find(unit_id);
  if (it == units_.end()) return Status(Code::kUnknownUnit, "unknown unit: " + unit_id);
  UnitEntry& entry = it->second;
  if (entry.status != ErasureStatus::kLive) {
    return Status(Code::kInaccessible, std::string("unit is ") + erasure_status_name(entry.status));
  }
  if (!policy.valid()) return Status(Code::kInvalidArgument, "invalid policy tuple");
  Status st = ledger_time_check(t);
  if (!st.is_ok()) return st;
  st = authorize(entry.meta, {ActionType::kUpdateMetadata, {}}, e, p, t, false);
  if (!st.is_ok()) {
    if (st.code() == Code::kPolicyDenied) {
      log_denied(unit_id, {ActionType::kUpdateMetadata, {}}, e, p, t, "PolicyDenied");
    }
    return st;
  }
  auto full = load_full_unit(entry);
  if (!full.is_ok()) return full.status();
  full.value().policies.push_back(policy);
  st = rewrite_unit(entry, full.value());
  if (!st.is_ok()) return st;
  const auto new_payload = read_payload(entry.slots.back());
  st = append_history(unit_id, ActionType::kUpdateMetadata, {}, e, p, t, false,
                      new_payload.is_ok() ? digest_of(new_payload.value()) : StateDigest{});
  if (!st.is_ok()) return st;
  return static_cast<std::uint64_t>(entry.meta.policies.size());
}

Result<std::uint64_t> Store::update_policy_window(const std::string& unit_id,
                                                  const Purpose& purpose, const EntityId& entity,
                                                  Timestamp new_tb, Timestamp new_tf,
                                                  const EntityId& e, const Purpose& p,
                                                  Timestamp t) {
  std::unique_lock lk(mutex_);
  auto it = units_.find(unit_id);
  if (it == units_.end()) return Status(Code::kUnknownUnit, "unknown unit: " + unit_id);
  UnitEntry& entry = it->second;
  if (entry.status != ErasureStatus::kLive) {
    return Status(Code::kInaccessible, std::string("unit is ") + erasure_status_name(entry.status));
  }
  if (new_tb > new_tf) return Status(Code::kInvalidArgument, "empty policy window");
  Status st = ledger_time_check(t);
  if (!st.is_ok()) return st;
  st = authorize(entry.meta, {ActionType::kUpdateMetadata, {}}, e, p, t, false);
  if (!st.is_ok()) {
    if (st.code() == Code::kPolicyDenied) {
      log_denied(unit_id, {ActionType::kUpdateMetadata, {}}, e, p, t, "PolicyDenied");
    }
    return st;
  }
  auto full = load_full_unit(entry);
  if (!full.is_ok()) return full.status();
  std::uint64_t changed = 0;
  for (auto& pol : full.value().policies) {
    if (pol.purpose == purpose && pol.entity == entity) {
      pol.t_b = new_tb;
      pol.t_f = new_tf;
      ++changed;
    }
  }
  if (changed == 0) {
    return Status(Code::kInvalidArgument,
                  "no policy with (" + purpose.name + ", " + entity.to_string() + ") on " + unit_id);
  }
  st = rewrite_unit(entry, full.value());
  if (!st.is_ok()) return st;
  const auto new_payload = read_payload(entry.slots.back());
  st = append_history(unit_id, ActionType::kUpdateMetadata, {}, e, p, t, false,
                      new_payload.is_ok() ? digest_of(new_payload.value()) : StateDigest{});
  if (!st.is_ok()) return st;
  return changed;
}

Result<DerivedUnit> Store::derive(const std::vector<std::string>& input_ids,
                                  const std::string& derived_id, const std::string& f_descriptor,
                                  bool invertible, bool subjects_identifiable,
                                  std::vector<std::uint8_t> value, const EntityId& e,
                                  const Purpose& p, Timestamp t, bool regulation_required) {
  std::unique_lock lk(mutex_);
  if (input_ids.empty()) return Status(Code::kEmptyInputs, "derive requires inputs");
  Status st = ledger_time_check(t);
  if (!st.is_ok()) return st;

  std::vector<DataUnit> inputs;
  for (const auto& id : input_ids) {
    auto it = units_.find(id);
    if (it == units_.end()) return Status(Code::kUnknownUnit, "unknown input: " + id);
    if (it->second.status != ErasureStatus::kLive) {
      return Status(Code::kErasedInput, "input not live: " + id);
    }
    st = authorize(it->second.meta, {ActionType::kRead, {}}, e, p, t, regulation_required);
    if (!st.is_ok()) {
      if (st.code() == Code::kPolicyDenied) {
        log_denied(id, {ActionType::kRead, {}}, e, p, t, "PolicyDenied");
      }
      return st;
    }
    inputs.push_back(it->second.meta);
  }

  std::string id = derived_id;
  if (id.empty()) id = "d" + std::to_string(next_unit_seq_++);
  if (units_.contains(id)) return Status(Code::kDuplicateId, "unit already exists: " + id);

  const std::vector<std::uint8_t> plain = value;
  auto derived = derive_unit(inputs, id, f_descriptor, invertible, std::move(value), t,
                             subjects_identifiable);
  if (!derived.is_ok()) return derived.status();

  st = graph_.add_edge(derived.value().edge);
  if (!st.is_ok()) return st;

  DataUnit stored = derived.value().unit;
  std::uint8_t flags = 0;
  if (options_.encrypt_at_rest) {
    flags |= kFlagEncrypted;
    for (size_t i = 0; i < stored.values.size(); ++i) {
      xor_keystream(stored.values[i].bytes, encryption_tweak(id, i));
    }
  }
  std::vector<ValueRange> ranges;
  const auto payload = encode_unit(stored, &ranges);
  UnitEntry entry;
  Slot slot;
  st = append_record(id, payload, flags, ErasureStatus::kLive, ranges, &slot);
  if (!st.is_ok()) return st;
  entry.slots.push_back(std::move(slot));
  entry.meta = derived.value().unit;
  for (auto& v : entry.meta.values) v.bytes.clear();
  entry.status = ErasureStatus::kLive;
  units_[id] = std::move(entry);
  if (options_.enable_value_cache && !plain.empty()) {
    cache_[id] = CachedValue{plain, digest_of(payload)};
  }

  for (const auto& in : inputs) {
    st = append_history(in.id, ActionType::kRead, {}, e, p, t, regulation_required,
                        unit_state_digest(in));
    if (!st.is_ok()) return st;
  }
  st = append_history(id, ActionType::kCreate, {}, e, p, t, regulation_required,
                      digest_of(payload));
  if (!st.is_ok()) return st;
  st = save_manifest();
  if (!st.is_ok()) return st;
  return derived;
}

Result<ErasureStatus> Store::make_inaccessible(const std::string& unit_id, Timestamp t) {
  std::unique_lock lk(mutex_);
  auto it = units_.find(unit_id);
  if (it == units_.end()) return Status(Code::kUnknownUnit, "unknown unit: " + unit_id);
  UnitEntry& entry = it->second;
  if (entry.status != ErasureStatus::kLive) {
    return Status(Code::kInvalidTransition,
                  std::string("make_inaccessible requires a live unit, unit is ") +
                      erasure_status_name(entry.status));
  }
  Status st = ledger_time_check(t);
  if (!st.is_ok()) return st;

  std::uint64_t key_state = mix64(options_.encryption_seed ^ 0x0E5C401ULL);
  for (char c : unit_id) key_state = mix64(key_state ^ static_cast<std::uint8_t>(c));
  const std::uint64_t key = key_state;

  for (Slot& slot : entry.slots) {
    if (slot.flags & kFlagWiped) continue;
    auto payload = read_payload(slot);
    if (!payload.is_ok()) return payload.status();
    for (size_t i = 0; i < slot.ranges.size(); ++i) {
      const ValueRange& r = slot.ranges[i];
      std::span<std::uint8_t> range(payload.value().data() + r.offset, r.length);
      xor_keystream(range, escrow_tweak(key, i));
    }
    st = rewrite_payload(slot, payload.value());
    if (!st.is_ok()) return st;
    st = patch_flags(slot, static_cast<std::uint8_t>(slot.flags | kFlagEscrowed));
    if (!st.is_ok()) return st;
  }
  escrow_[unit_id] = EscrowEntry{unit_id, key, t};
  st = save_escrow();
  if (!st.is_ok()) return st;
  cache_.erase(unit_id);
  entry.status = ErasureStatus::kReversiblyInaccessible;
  st = patch_status(entry.slots.back(), entry.status);
  if (!st.is_ok()) return st;
  st = append_history(unit_id, ActionType::kErase, ErasureMode::kReversiblyInaccessible,
                      kStoreEntity, Purpose{kCompliancePurpose}, t, true,
                      unit_state_digest(entry.meta));
  if (!st.is_ok()) return st;
  return entry.status;
}

Result<ErasureStatus> Store::restore_access(const std::string& unit_id, Timestamp t) {
  std::unique_lock lk(mutex_);
  auto it = units_.find(unit_id);
  if (it == units_.end()) return Status(Code::kUnknownUnit, "unknown unit: " + unit_id);
  UnitEntry& entry = it->second;
  if (entry.status != ErasureStatus::kReversiblyInaccessible) {
    return Status(Code::kInvalidTransition,
                  std::string("restore_access requires reversibly_inaccessible, unit is ") +
                      erasure_status_name(entry.status));
  }
  Status st = ledger_time_check(t);
  if (!st.is_ok()) return st;
  auto esc = escrow_.find(unit_id);
  if (esc == escrow_.end()) {
    return Status(Code::kCorruption, "escrow entry missing for " + unit_id);
  }
  const std::uint64_t key = esc->second.transform_key;
  for (Slot& slot : entry.slots) {
    if (slot.flags & kFlagWiped) continue;
    auto payload = read_payload(slot);
    if (!payload.is_ok()) return payload.status();
    for (size_t i = 0; i < slot.ranges.size(); ++i) {
      const ValueRange& r = slot.ranges[i];
      std::span<std::uint8_t> range(payload.value().data() + r.offset, r.length);
      xor_keystream(range, escrow_tweak(key, i));
    }
    st = rewrite_payload(slot, payload.value());
    if (!st.is_ok()) return st;
    st = patch_flags(slot, static_cast<std::uint8_t>(slot.flags & ~kFlagEscrowed));
    if (!st.is_ok()) return st;
  }
  escrow_.erase(esc);
  st = save_escrow();
  if (!st.is_ok()) return st;
  entry.status = ErasureStatus::kLive;
  st = patch_status(entry.slots.back(), entry.status);
  if (!st.is_ok()) return st;
  st = append_history(unit_id, ActionType::kUpdateMetadata, {}, kStoreEntity,
                      Purpose{"compliance-restore"}, t, true, unit_state_digest(entry.meta));
  if (!st.is_ok()) return st;
  return entry.status;
}

Status Store::wipe_unit(UnitEntry& entry, bool sanitize_passes, std::uint64_t* bytes,
                        std::uint64_t* locations) {
  for (Slot& slot : entry.slots) {
    if (slot.flags & kFlagWiped) continue;
    std::uint64_t range_bytes = 0;
    for (const auto& r : slot.ranges) range_bytes += r.length;
    if (sanitize_passes && range_bytes > 0) {
      auto& f = files_->segments[slot.segment];
      for (int pass = 0; pass < 3; ++pass) {
        for (size_t i = 0; i < slot.ranges.size(); ++i) {
          const ValueRange& r = slot.ranges[i];
          std::vector<std::uint8_t> buf(r.length);
          if (pass == 0) {
            std::fill(buf.begin(), buf.end(), 0x00);
          } else if (pass == 1) {
            std::fill(buf.begin(), buf.end(), 0xFF);
          } else {
            Rng rng(mix64(slot.offset ^ (r.offset * 0x9E3779B1ULL) ^ 0x5A17173EULL));
            rng.fill(buf);
          }
          Status st = f.write_at(slot.offset + kRecordHeader + r.offset, buf);
          if (!st.is_ok()) return st;
        }
        f.sync();
      }
    }
    auto payload = read_payload(slot);
    if (!payload.is_ok()) return payload.status();
    for (const auto& r : slot.ranges) {
      std::memset(payload.value().data() + r.offset, 0, r.length);
    }
    Status st = rewrite_payload(slot, payload.value());
    if (!st.is_ok()) return st;
    st = patch_flags(slot, static_cast<std::uint8_t>(
                               (slot.flags | kFlagTombstone | kFlagWiped) & ~kFlagEscrowed));
    if (!st.is_ok()) return st;
    if (bytes) *bytes += range_bytes;
    if (locations && range_bytes > 0) ++*locations;
  }
  return Status::ok();
}

std::vector<std::string> Store::strong_closure(const std::string& root) const {
  const auto rit = units_.find(root);
  if (rit == units_.end()) return {};
  const auto& root_subjects = rit->second.meta.subjects;
  auto intersects_root = [&](const DataUnit& u) {
    for (const auto& s : u.subjects) {
      if (std::binary_search(root_subjects.begin(), root_subjects.end(), s)) return true;
    }
    return false;
  };

  // Least fixpoint over edges: follow identifiable edges from erased-set
  // members to derived units whose subjects intersect the root's.
  std::vector<std::string> closure;
  std::set<std::string> in_set = {root};
  std::deque<std::string> frontier = {root};
  while (!frontier.empty()) {
    std::string cur = std::move(frontier.front());
    frontier.pop_front();
    for (const ProvenanceEdge* e : graph_.edges_from_input(cur)) {
      if (!e->subjects_identifiable) continue;
      if (in_set.contains(e->derived_id)) continue;
      auto dit = units_.find(e->derived_id);
      if (dit == units_.end()) continue;
      if (!intersects_root(dit->second.meta)) continue;
      in_set.insert(e->derived_id);
      closure.push_back(e->derived_id);
      frontier.push_back(e->derived_id);
    }
  }
  std::sort(closure.begin(), closure.end());
  return closure;
}

Status Store::erase_single(UnitEntry& entry, const std::string& id, ErasureMode mode,
                           const EntityId& e, Timestamp t, ErasureReport* report) {
  Status st = wipe_unit(entry, mode == ErasureMode::kPermanentDelete, &report->value_bytes_wiped,
                        &report->locations_wiped);
  if (!st.is_ok()) return st;
  if (escrow_.erase(id) > 0) {
    st = save_escrow();
    if (!st.is_ok()) return st;
  }
  cache_.erase(id);
  if (mode >= ErasureMode::kStrongDelete) {
    std::lock_guard<std::mutex> lkl(ledger_mutex_);
    auto redacted = ledger_.redact_values(id,
                                          mode == ErasureMode::kPermanentDelete
                                              ? RedactionReason::kPermanentDelete
                                              : RedactionReason::kStrongDelete,
                                          t);
    if (redacted.is_ok()) {
      report->ledger_records_redacted += redacted.value();
    } else if (redacted.status().code() != Code::kUnknownUnit) {
      return redacted.status();
    }
  }
  entry.status = status_for_mode(mode);
  st = patch_status(entry.slots.back(), entry.status);
  if (!st.is_ok()) return st;
  st = append_history(id, ActionType::kErase, mode, e, Purpose{kCompliancePurpose}, t, true,
                      unit_state_digest(entry.meta));
  if (!st.is_ok()) return st;
  report->erased_units.push_back(id);
  return Status::ok();
}

Result<ErasureReport> Store::erase(const std::string& unit_id, ErasureMode mode, const EntityId& e,
                                   Timestamp t, bool regulation_required) {
  std::unique_lock lk(mutex_);
  auto it = units_.find(unit_id);
  if (it == units_.end()) return Status(Code::kUnknownUnit, "unknown unit: " + unit_id);
  UnitEntry& entry = it->second;
  if (mode == ErasureMode::kReversiblyInaccessible) {
    return Status(Code::kInvalidArgument, "use make_inaccessible for reversible inaccessibility");
  }
  const ErasureStatus target = status_for_mode(mode);
  if (target <= entry.status) {
    return Status(Code::kInvalidTransition,
                  std::string(erasure_mode_name(mode)) + " not allowed from status " +
                      erasure_status_name(entry.status));
  }
  Status st = ledger_time_check(t);
  if (!st.is_ok()) return st;
  st = authorize(entry.meta, {ActionType::kErase, mode}, e, Purpose{kCompliancePurpose}, t,
                 regulation_required);
  if (!st.is_ok()) {
    if (st.code() == Code::kPolicyDenied) {
      log_denied(unit_id, {ActionType::kErase, mode}, e, Purpose{kCompliancePurpose}, t,
                 "PolicyDenied");
    }
    return st;
  }

  ErasureReport report;
  report.mode = mode;
  st = erase_single(entry, unit_id, mode, e, t, &report);
  if (!st.is_ok()) return st;

  if (mode >= ErasureMode::kStrongDelete) {
    for (const auto& child_id : strong_closure(unit_id)) {
      UnitEntry& child = units_.at(child_id);
      if (child.status >= target) continue;  // already at or past this strictness
      st = erase_single(child, child_id, mode, e, t, &report);
      if (!st.is_ok()) return st;
    }
  }
  std::sort(report.erased_units.begin(), report.erased_units.end());
  return report;
}

Result<std::uint64_t> Store::compact(CompactionLevel level) {
  std::unique_lock lk(mutex_);

  // The current slot of every unit survives compaction; every other slot
  // is droppable. Erased units' current records shrink to value-free
  // stubs so their policies and status stay auditable. Incremental
  // compaction skips segments whose reclaimable share is below 25%,
  // so periodic maintenance stays cheap on mostly-live segments; full
  // compaction rewrites everything.
  std::map<std::uint32_t, std::uint64_t> reclaimable;
  std::uint64_t before = 0;
  for (const auto& [seg_id, f] : files_->segments) {
    before += f.size();
    std::uint64_t kept_bytes = kSegmentHeader;
    for (const auto& [id, entry] : units_) {
      for (const Slot& s : entry.slots) {
        if (s.segment != seg_id) continue;
        const bool is_current = (&s == &entry.slots.back());
        if (is_current && erased_status(entry.status)) {
          std::uint64_t range_total = 0;
          for (const auto& r : s.ranges) range_total += r.length;
          reclaimable[seg_id] += range_total;  // the stub keeps the metadata
          kept_bytes += kRecordHeader + s.payload_len;
        } else if (is_current) {
          kept_bytes += kRecordHeader + s.payload_len;
        }
        // Superseded slots count via the kept_bytes gap below.
      }
    }
    if (kept_bytes < f.size()) {
      reclaimable[seg_id] += f.size() - kept_bytes;  // superseded slots, dead regions
    }
  }

  std::set<std::uint32_t> dirty;
  for (const auto& [seg_id, bytes] : reclaimable) {
    if (bytes == 0) continue;
    if (level == CompactionLevel::kFull ||
        bytes * 4 >= files_->segments[seg_id].size()) {
      dirty.insert(seg_id);
    }
  }

  if (level == CompactionLevel::kIncremental && dirty.empty()) return std::uint64_t{0};

  struct NewSlot {
    std::string id;
    std::vector<std::uint8_t> record_bytes;
    std::vector<ValueRange> ranges;
    std::uint8_t flags;
    std::uint32_t payload_len;
  };
  auto build_record = [&](const std::string& id, const UnitEntry& entry,
                          NewSlot* out) -> Status {
    const Slot& cur = entry.slots.back();
    out->id = id;
    if (erased_status(entry.status)) {
      auto full = load_full_unit(entry);
      if (!full.is_ok()) return full.status();
      for (auto& v : full.value().values) v.bytes.clear();
      const auto payload = encode_unit(full.value(), &out->ranges);
      ByteWriter w;
      w.u32(static_cast<std::uint32_t>(payload.size()));
      w.u8(cur.flags);
      w.u8(static_cast<std::uint8_t>(entry.status));
      w.u32(crc32_of(payload));
      w.bytes(payload);
      out->record_bytes = w.take();
      out->flags = cur.flags;
      out->payload_len = static_cast<std::uint32_t>(payload.size());
    } else {
      // Bit-identical carry-over for live and escrowed records.
      out->record_bytes.resize(kRecordHeader + cur.payload_len);
      Status st = files_->segments[cur.segment].read_at(cur.offset, out->record_bytes);
      if (!st.is_ok()) return st;
      out->ranges = cur.ranges;
      out->flags = cur.flags;
      out->payload_len = cur.payload_len;
    }
    return Status::ok();
  };

  auto finalize_segment = [&](std::uint32_t seg_id, const std::vector<NewSlot>& slots) -> Status {
    const auto final_path = segment_path(dir_, seg_id);
    const auto tmp_path = final_path.string() + ".cmp";
    {
      RandomAccessFile nf;
      std::error_code ignored;
      std::filesystem::remove(tmp_path, ignored);
      Status st = nf.open(tmp_path, /*create=*/true);
      if (!st.is_ok()) return st;
      ByteWriter w;
      w.bytes(kSegmentMagic);
      w.u8(kSegmentVersion);
      st = nf.append(w.data());
      if (!st.is_ok()) return st;
      for (const auto& s : slots) {
        std::uint64_t off = 0;
        st = nf.append(s.record_bytes, &off);
        if (!st.is_ok()) return st;
        UnitEntry& entry = units_.at(s.id);
        Slot updated;
        updated.segment = seg_id;
        updated.offset = off;
        updated.payload_len = s.payload_len;
        updated.flags = s.flags;
        updated.ranges = s.ranges;
        entry.slots.push_back(std::move(updated));  // becomes the current slot
      }
      nf.sync();
    }
    files_->segments[seg_id].close();
    std::error_code ec;
    std::filesystem::rename(tmp_path, final_path, ec);
    if (ec) return Status(Code::kIoError, "rename failed for " + final_path.string());
    return open_segment(seg_id, /*create=*/false);
  };

  if (level == CompactionLevel::kIncremental) {
    for (std::uint32_t seg_id : dirty) {
      std::vector<NewSlot> slots;
      for (auto& [id, entry] : units_) {
        const Slot& cur = entry.slots.back();
        if (cur.segment != seg_id) continue;
        NewSlot ns;
        Status st = build_record(id, entry, &ns);
        if (!st.is_ok()) return st;
        slots.push_back(std::move(ns));
      }
      // Drop every old slot that lived in this segment; slots in other
      // segments stay tracked. Units whose current slot was here get the
      // rewritten one appended by finalize_segment.
      for (auto& [id, entry] : units_) {
        std::erase_if(entry.slots, [&](const Slot& s) { return s.segment == seg_id; });
      }
      Status st = finalize_segment(seg_id, slots);
      if (!st.is_ok()) return st;
    }
  } else {
    std::vector<NewSlot> all;
    for (auto& [id, entry] : units_) {
      NewSlot ns;
      Status st = build_record(id, entry, &ns);
      if (!st.is_ok()) return st;
      all.push_back(std::move(ns));
    }
    // Re-pack sorted by unit id into minimal consecutive segments,
    // written to temporary files first so the old state survives a
    // crash before the swap.
    std::vector<RandomAccessFile> staged;
    auto open_staged = [&]() -> Status {
      const auto tmp = segment_path(dir_, static_cast<std::uint32_t>(staged.size())).string() +
                       ".cmp";
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      RandomAccessFile nf;
      Status st = nf.open(tmp, /*create=*/true);
      if (!st.is_ok()) return st;
      ByteWriter w;
      w.bytes(kSegmentMagic);
      w.u8(kSegmentVersion);
      st = nf.append(w.data());
      staged.push_back(std::move(nf));
      return st;
    };
    Status st = open_staged();
    if (!st.is_ok()) return st;
    std::vector<std::pair<std::string, Slot>> new_slots;
    for (auto& ns : all) {
      if (staged.back().size() > kSegmentHeader &&
          staged.back().size() + ns.record_bytes.size() > options_.segment_max_bytes) {
        st = open_staged();
        if (!st.is_ok()) return st;
      }
      std::uint64_t off = 0;
      st = staged.back().append(ns.record_bytes, &off);
      if (!st.is_ok()) return st;
      Slot updated;
      updated.segment = static_cast<std::uint32_t>(staged.size() - 1);
      updated.offset = off;
      updated.payload_len = ns.payload_len;
      updated.flags = ns.flags;
      updated.ranges = ns.ranges;
      new_slots.push_back({ns.id, std::move(updated)});
    }
    const std::uint32_t new_count = static_cast<std::uint32_t>(staged.size());
    for (auto& f : staged) f.sync();
    staged.clear();  // close before the swap

    const std::vector<std::uint32_t> old_ids = [&] {
      std::vector<std::uint32_t> v;
      for (const auto& [id, f] : files_->segments) v.push_back(id);
      return v;
    }();
    for (std::uint32_t id : old_ids) files_->segments[id].close();
    files_->segments.clear();
    for (std::uint32_t id : old_ids) {
      std::error_code ignored;
      std::filesystem::remove(segment_path(dir_, id), ignored);
    }
    for (std::uint32_t id = 0; id < new_count; ++id) {
      std::error_code ec;
      std::filesystem::rename(segment_path(dir_, id).string() + ".cmp", segment_path(dir_, id),
                              ec);
      if (ec) return Status(Code::kIoError, "segment swap failed");
      st = open_segment(id, /*create=*/false);
      if (!st.is_ok()) return st;
    }
    files_->active = new_count - 1;
    for (auto& [id, slot] : new_slots) {
      UnitEntry& entry = units_.at(id);
      entry.slots.clear();
      entry.slots.push_back(std::move(slot));
    }
  }

  std::uint64_t after = 0;
  for (const auto& [seg_id, f] : files_->segments) after += f.size();
  return before > after ? before - after : std::uint64_t{0};
}

CopySet Store::copies_of(const std::string& unit_id) const {
  std::shared_lock lk(mutex_);
  CopySet out;
  out.unit_id = unit_id;
  auto it = units_.find(unit_id);
  if (it == units_.end()) return out;
  const UnitEntry& entry = it->second;
  for (const Slot& s : entry.slots) {
    if (s.flags & kFlagWiped) continue;
    std::uint64_t range_total = 0;
    for (const auto& r : s.ranges) range_total += r.length;
    if (range_total == 0) continue;
    out.locations.push_back(CopyLocation{CopyKind::kSegmentSlot, s.segment, s.offset,
                                         kRecordHeader + s.payload_len,
                                         (s.flags & kFlagEscrowed) != 0});
  }
  if (!out.locations.empty() && !erased_status(entry.status)) {
    const Slot& cur = entry.slots.back();
    out.locations.push_back(CopyLocation{CopyKind::kIndexEntry, cur.segment, cur.offset,
                                         kRecordHeader + cur.payload_len,
                                         (cur.flags & kFlagEscrowed) != 0});
  }
  {
    std::lock_guard<std::mutex> clk(ledger_mutex_);
    auto cached = cache_.find(unit_id);
    if (cached != cache_.end()) {
      out.locations.push_back(
          CopyLocation{CopyKind::kCacheEntry, 0, 0, cached->second.bytes.size(), false});
    }
  }
  return out;
}

Result<ErasureStatus> Store::status_of(const std::string& unit_id) const {
  std::shared_lock lk(mutex_);
  auto it = units_.find(unit_id);
  if (it == units_.end()) return Status(Code::kUnknownUnit, "unknown unit: " + unit_id);
  return it->second.status;
}

Result<DataUnit> Store::unit_snapshot(const std::string& unit_id) const {
  std::shared_lock lk(mutex_);
  auto it = units_.find(unit_id);
  if (it == units_.end()) return Status(Code::kUnknownUnit, "unknown unit: " + unit_id);
  return it->second.meta;
}

std::vector<std::string> Store::unit_ids() const {
  std::shared_lock lk(mutex_);
  std::vector<std::string> out;
  out.reserve(units_.size());
  for (const auto& [id, e] : units_) out.push_back(id);
  return out;
}

std::optional<EscrowEntry> Store::escrow_of(const std::string& unit_id) const {
  std::shared_lock lk(mutex_);
  auto it = escrow_.find(unit_id);
  if (it == escrow_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t Store::store_dir_bytes() const {
  std::uint64_t total = 0;
  for (const auto& ent : std::filesystem::recursive_directory_iterator(dir_)) {
    if (ent.is_regular_file()) total += ent.file_size();
  }
  return total;
}

std::uint64_t Store::live_personal_bytes() const {
  std::shared_lock lk(mutex_);
  std::uint64_t total = 0;
  for (const auto& [id, entry] : units_) {
    if (entry.meta.category == UnitCategory::kMetadata) continue;
    if (entry.status != ErasureStatus::kLive &&
        entry.status != ErasureStatus::kReversiblyInaccessible) {
      continue;
    }
    for (const auto& r : entry.slots.back().ranges) total += r.length;
  }
  return total;
}

void Store::sync() {
  std::unique_lock lk(mutex_);
  for (auto& [id, f] : files_->segments) f.sync();
  files_->denied.sync();
  ledger_.sync();
}

}  // namespace datacase

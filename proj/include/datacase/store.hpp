// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "datacase/codec.hpp"
#include "datacase/core.hpp"
#include "datacase/ledger.hpp"
#include "datacase/status.hpp"
#include "datacase/types.hpp"

namespace datacase {

struct StoreOptions {
  std::uint64_t segment_max_bytes = 1 << 20;

  // At-rest value transform (keyed stream, not production crypto). The
  // choice is fixed at init and persisted in the manifest.
  bool encrypt_at_rest = false;
  std::uint64_t encryption_seed = 0;

  bool enable_value_cache = true;

  // Optional stricter check: when a purpose is present here, actions
  // under it must be one of the listed kinds. Applies on top of the
  // policy-consistency check. Empty map disables the layer.
  std::map<std::string, std::set<ActionType>> purpose_action_map;

  // Metadata-category units skip policy-consistency enforcement unless
  // this is set; purpose_action_map entries still apply to them.
  bool metadata_units_policy_checked = false;
};

enum class CopyKind : std::uint8_t {
  kSegmentSlot = 0,
  kIndexEntry = 1,
  kCacheEntry = 2,
  kLedgerPayload = 3,
};

struct CopyLocation {
  CopyKind kind = CopyKind::kSegmentSlot;
  std::uint32_t segment = 0;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  bool escrowed = false;
};

// Every engine-internal location currently holding recoverable value
// bytes of a unit. Ledger payloads carry non-invertible digests only and
// therefore never appear here; erase reports list them when redacted.
struct CopySet {
  std::string unit_id;
  std::vector<CopyLocation> locations;
};

struct EscrowEntry {
  std::string unit_id;
  std::uint64_t transform_key = 0;
  Timestamp created_at = 0;
};

struct ErasureReport {
  ErasureMode mode = ErasureMode::kDelete;
  std::vector<std::string> erased_units;  // sorted; includes the root
  std::uint64_t value_bytes_wiped = 0;
  std::uint64_t locations_wiped = 0;
  std::uint64_t ledger_records_redacted = 0;
};

enum class CompactionLevel { kIncremental, kFull };

// Embedded segment-file store with policy-enforced access and the four
// erasure interpretations. Directory layout: segments/seg-<n>.dat,
// actions.log, denied.log, escrow.bin, manifest.json. One writer, many
// readers per instance; mutation is serialized internally and erase
// holds the writer lock for the whole affected closure. The directory is
// flock-guarded, so concurrent processes fail fast.
class Store {
 public:
  static Result<std::unique_ptr<Store>> open(const std::filesystem::path& dir,
                                             const StoreOptions& options = {});
  ~Store();
  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  // Creation must be authorized by a policy on the unit itself or be
  // regulation-required. The unit may not be category derived; use
  // derive() for that.
  Result<std::string> put(DataUnit unit, const EntityId& e, const Purpose& p, Timestamp t,
                          bool regulation_required = false);

  // Latest value. Appends a read record on success; policy denials go to
  // the denied stream, units past live are Inaccessible.
  Result<std::vector<std::uint8_t>> get(const std::string& unit_id, const EntityId& e,
                                        const Purpose& p, Timestamp t);

  // Appends a value version; returns the new version count.
  Result<std::uint64_t> update_value(const std::string& unit_id, std::vector<std::uint8_t> value,
                                     const EntityId& e, const Purpose& p, Timestamp t);

  // Policy-set mutation (recorded as update-metadata actions).
  Result<std::uint64_t> add_policy(const std::string& unit_id, const PolicyTuple& policy,
                                   const EntityId& e, const Purpose& p, Timestamp t);
  Result<std::uint64_t> update_policy_window(const std::string& unit_id, const Purpose& purpose,
                                             const EntityId& entity, Timestamp new_tb,
                                             Timestamp new_tf, const EntityId& e, const Purpose& p,
                                             Timestamp t);

  // Builds and stores a derived unit from live inputs. The acting
  // (purpose, entity) must be authorized on every input unless
  // regulation_required. Records one read per input plus the create.
  Result<DerivedUnit> derive(const std::vector<std::string>& input_ids,
                             const std::string& derived_id, const std::string& f_descriptor,
                             bool invertible, bool subjects_identifiable,
                             std::vector<std::uint8_t> value, const EntityId& e, const Purpose& p,
                             Timestamp t, bool regulation_required = false);

  // Reversible inaccessibility: value bytes in every durable copy are
  // replaced by an invertible keyed transform, the key moves to escrow,
  // cached copies are dropped. restore_access recovers the exact
  // original bytes and destroys the escrow entry.
  Result<ErasureStatus> make_inaccessible(const std::string& unit_id, Timestamp t);
  Result<ErasureStatus> restore_access(const std::string& unit_id, Timestamp t);

  Result<ErasureReport> erase(const std::string& unit_id, ErasureMode mode, const EntityId& e,
                              Timestamp t, bool regulation_required = true);

  // Reclaims tombstoned slots (incremental: only segments holding
  // reclaimable bytes; full: every segment rewritten, files minimized).
  // Live data is preserved bit-exactly. Returns bytes reclaimed.
  Result<std::uint64_t> compact(CompactionLevel level);

  CopySet copies_of(const std::string& unit_id) const;
  Result<ErasureStatus> status_of(const std::string& unit_id) const;

  // Structural snapshot for audits: subjects, origins, policies and
  // version timestamps; value bytes are not included.
  Result<DataUnit> unit_snapshot(const std::string& unit_id) const;

  std::vector<std::string> unit_ids() const;  // sorted, includes erased units
  const ProvenanceGraph& provenance() const { return graph_; }
  const Ledger& ledger() const { return ledger_; }
  // Direct ledger access for audits and history injection in tests.
  Ledger& mutable_ledger() { return ledger_; }
  std::optional<EscrowEntry> escrow_of(const std::string& unit_id) const;

  std::uint64_t store_dir_bytes() const;
  // Logical personal data: value bytes of live and escrowed base/derived
  // units (current versions, all generations of a version counted once).
  std::uint64_t live_personal_bytes() const;

  const std::filesystem::path& dir() const { return dir_; }
  const StoreOptions& options() const { return options_; }
  void sync();

 private:
  struct Slot {
    std::uint32_t segment = 0;
    std::uint64_t offset = 0;  // record header offset in the segment file
    std::uint32_t payload_len = 0;
    std::uint8_t flags = 0;
    std::vector<ValueRange> ranges;
  };
  struct UnitEntry {
    DataUnit meta;  // value bytes cleared; timestamps and lengths tracked via slots
    ErasureStatus status = ErasureStatus::kLive;
    std::vector<Slot> slots;
  };

  Store() = default;

  Status init_layout();
  Status load_manifest();
  Status save_manifest();
  Status scan_segments();
  Status load_escrow();
  Status save_escrow();
  Status open_segment(std::uint32_t id, bool create);
  Status roll_segment_if_needed(std::uint64_t upcoming);
  Status append_record(const std::string& unit_id, const std::vector<std::uint8_t>& payload,
                       std::uint8_t flags, ErasureStatus status,
                       const std::vector<ValueRange>& ranges, Slot* out);
  Status patch_flags(Slot& slot, std::uint8_t flags);
  Status patch_status(const Slot& slot, ErasureStatus status);
  Status rewrite_payload(Slot& slot, const std::vector<std::uint8_t>& payload);
  Result<std::vector<std::uint8_t>> read_payload(const Slot& slot) const;
  Status authorize(const DataUnit& meta, ActionKind kind, const EntityId& e, const Purpose& p,
                   Timestamp t, bool regulation_required);
  void log_denied(const std::string& unit_id, ActionKind kind, const EntityId& e, const Purpose& p,
                  Timestamp t, const char* reason);
  Status append_history(const std::string& unit_id, ActionType type, ErasureMode mode,
                        const EntityId& e, const Purpose& p, Timestamp t, bool regulation_required,
                        const StateDigest& digest);
  Status ledger_time_check(Timestamp t) const;
  Result<DataUnit> load_full_unit(const UnitEntry& entry) const;
  Status rewrite_unit(UnitEntry& entry, const DataUnit& full);
  Status wipe_unit(UnitEntry& entry, bool sanitize_passes, std::uint64_t* bytes,
                   std::uint64_t* locations);
  std::uint64_t encryption_tweak(const std::string& unit_id, size_t version_index) const;
  std::uint64_t escrow_tweak(std::uint64_t key, size_t version_index) const;
  std::vector<std::string> strong_closure(const std::string& root) const;
  Status erase_single(UnitEntry& entry, const std::string& id, ErasureMode mode, const EntityId& e,
                      Timestamp t, ErasureReport* report);

  std::filesystem::path dir_;
  StoreOptions options_;
  std::uint64_t next_unit_seq_ = 0;

  struct Files;                   // segment fds, denied stream, lock
  std::unique_ptr<Files> files_;  // defined in store.cpp
  struct CachedValue {
    std::vector<std::uint8_t> bytes;  // plaintext latest version
    StateDigest digest;               // digest of the stored payload
  };
  std::map<std::string, UnitEntry> units_;
  std::map<std::string, EscrowEntry> escrow_;
  std::map<std::string, CachedValue> cache_;
  ProvenanceGraph graph_;
  Ledger ledger_;

  mutable std::shared_mutex mutex_;
  mutable std::mutex ledger_mutex_;
};

}  // namespace datacase

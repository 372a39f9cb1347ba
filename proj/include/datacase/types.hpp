// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "datacase/status.hpp"

namespace datacase {

// Seconds since the Unix epoch. 0 is a valid time.
using Timestamp = std::uint64_t;

enum class EntityKind : std::uint8_t {
  kDataSubject = 0,
  kController = 1,
  kProcessor = 2,
  kAuditor = 3,
};

const char* entity_kind_name(EntityKind k);
std::optional<EntityKind> entity_kind_from_name(const std::string& name);

// A participant in data processing. Ids are opaque and expected to be
// unique per kind; the library does not keep a registry.
struct EntityId {
  EntityKind kind = EntityKind::kController;
  std::string id;

  auto operator<=>(const EntityId&) const = default;
  std::string to_string() const { return std::string(entity_kind_name(kind)) + ":" + id; }
};

// "compliance-erase" is reserved: policies with this purpose carry the
// erasure deadline used by the retention checks.
inline constexpr const char* kCompliancePurpose = "compliance-erase";

struct Purpose {
  std::string name;

  auto operator<=>(const Purpose&) const = default;
  bool is_compliance_erase() const { return name == kCompliancePurpose; }
};

// Grant: `entity` may act on the unit for `purpose` within [t_b, t_f],
// both ends inclusive.
struct PolicyTuple {
  Purpose purpose;
  EntityId entity;
  Timestamp t_b = 0;
  Timestamp t_f = 0;

  auto operator<=>(const PolicyTuple&) const = default;
  bool valid() const { return !purpose.name.empty() && !entity.id.empty() && t_b <= t_f; }
};

enum class UnitCategory : std::uint8_t {
  kBase = 0,
  kDerived = 1,
  kMetadata = 2,
};

const char* unit_category_name(UnitCategory c);

struct ValueVersion {
  std::vector<std::uint8_t> bytes;
  Timestamp at = 0;

  bool operator==(const ValueVersion&) const = default;
};

// The finest-granularity datum: subjects, origins, versioned values and
// the attached policies. Base units identify exactly one data-subject;
// multi-subject data is modeled as derived.
struct DataUnit {
  std::string id;
  UnitCategory category = UnitCategory::kBase;
  std::vector<EntityId> subjects;      // kept sorted, unique
  std::vector<std::string> origins;    // opaque, kept sorted, unique
  std::vector<ValueVersion> values;    // timestamps strictly increasing
  std::vector<PolicyTuple> policies;

  bool operator==(const DataUnit&) const = default;
  Status validate() const;
};

// Snapshot of a unit at one instant: subjects, origins, the latest value
// at or before t (absent if none), and the policies active at t.
struct DataUnitState {
  std::vector<EntityId> subjects;
  std::vector<std::string> origins;
  std::optional<ValueVersion> value;
  std::vector<PolicyTuple> active_policies;
};

enum class ActionType : std::uint8_t {
  kCreate = 0,
  kRead = 1,
  kUpdateValue = 2,
  kUpdateMetadata = 3,
  kErase = 4,
  kShare = 5,
  kContract = 6,
};

// Erasure interpretations, ordered by strictness.
enum class ErasureMode : std::uint8_t {
  kReversiblyInaccessible = 0,
  kDelete = 1,
  kStrongDelete = 2,
  kPermanentDelete = 3,
};

const char* erasure_mode_name(ErasureMode m);
std::optional<ErasureMode> erasure_mode_from_name(const std::string& name);

struct ActionKind {
  ActionType type = ActionType::kRead;
  ErasureMode erase_mode = ErasureMode::kDelete;  // meaningful iff type == kErase

  bool operator==(const ActionKind&) const = default;
  std::string to_string() const;
};

std::optional<ActionKind> action_kind_from_string(const std::string& s);

using StateDigest = std::array<std::uint8_t, 16>;

inline constexpr StateDigest kRedactedSentinel = {};  // 16 bytes of 0x00

// One action-history tuple: entity `entity` performed `action` on unit
// `unit_id` for `purpose` at `time`. The digest summarizes the resulting
// unit state; it is not invertible and never contains value bytes.
struct ActionRecord {
  std::string unit_id;
  Purpose purpose;
  EntityId entity;
  ActionKind action;
  StateDigest state_digest = {};
  Timestamp time = 0;
  bool regulation_required = false;
  bool redacted = false;
  std::uint8_t redact_reason = 0;  // 0 none, 1 strong-delete, 2 permanent-delete

  bool operator==(const ActionRecord&) const = default;
};

// Derivation dependency: derived = f(inputs). `invertible` marks f as
// sufficient to reconstruct an input from the derived unit.
struct ProvenanceEdge {
  std::string derived_id;
  std::vector<std::string> input_ids;
  std::string f_descriptor;
  bool invertible = false;
  bool subjects_identifiable = true;

  bool operator==(const ProvenanceEdge&) const = default;
};

// Monotone along the erasure timeline; restore_access is the only
// backward transition and only from kReversiblyInaccessible.
enum class ErasureStatus : std::uint8_t {
  kLive = 0,
  kReversiblyInaccessible = 1,
  kDeleted = 2,
  kStrongDeleted = 3,
  kPermanentlyDeleted = 4,
};

const char* erasure_status_name(ErasureStatus s);

inline ErasureStatus status_for_mode(ErasureMode m) {
  switch (m) {
    case ErasureMode::kReversiblyInaccessible: return ErasureStatus::kReversiblyInaccessible;
    case ErasureMode::kDelete: return ErasureStatus::kDeleted;
    case ErasureMode::kStrongDelete: return ErasureStatus::kStrongDeleted;
    case ErasureMode::kPermanentDelete: return ErasureStatus::kPermanentlyDeleted;
  }
  return ErasureStatus::kDeleted;
}

}  // namespace datacase

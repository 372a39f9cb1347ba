// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "datacase/status.hpp"
#include "datacase/store.hpp"
#include "datacase/types.hpp"

namespace datacase {

enum class ViolationKind : std::uint8_t {
  kG6InconsistentAction = 0,
  kG17MissingPolicy = 1,
  kG17LateErase = 2,
  kG17MissingErase = 3,
  kErasureInconsistentRead = 4,
  kErasureInconsistentInference = 5,
};

const char* violation_kind_name(ViolationKind k);

struct Violation {
  ViolationKind kind = ViolationKind::kG6InconsistentAction;
  std::string unit_id;
  std::vector<std::string> evidence;  // "pos:<n>", "edge:<derived_id>", "deadline:<t>"
  std::int64_t first_position = -1;   // first ledger position in evidence, -1 if none
  Timestamp detected_at = 0;

  bool operator==(const Violation&) const = default;
};

// All checks are read-only over (store, ledger, provenance). They take
// the reader side of the store's exclusion, so they must not run while
// an erase is in flight on another thread.

// One violation per action record that is not policy-consistent against
// the unit's state at the record's time. Records of unknown units are
// checked against an empty policy set.
std::vector<Violation> check_g6(const Store& store, Timestamp now);

// Retention: every unit needs a compliance-erase policy; once the
// latest such deadline has passed, the unit's final record must be an
// erase at or before the deadline.
std::vector<Violation> check_g17(const Store& store, Timestamp now);

// Erasure-inconsistent reads: read records at a time with no active
// policies on the unit.
std::vector<Violation> detect_ir(const Store& store, Timestamp now);

// Erasure-inconsistent inference: a unit past live with a live,
// invertible derived dependent.
std::vector<Violation> detect_ii(const Store& store, Timestamp now);

// True iff an escrow entry permits exact recovery. Errors with kUnitLive
// for live units.
Result<bool> classify_inv(const Store& store, const std::string& unit_id);

struct ErasureCharacterization {
  ErasureMode mode = ErasureMode::kDelete;
  bool ir = false;
  bool ii = false;
  bool inv = false;

  bool operator==(const ErasureCharacterization&) const = default;
};

// Runs the canned micro-scenario (base unit with an invertible,
// identifiable derived child) under the given mode in a scratch store
// created beneath scratch_dir, then evaluates the three properties.
Result<ErasureCharacterization> characterize(ErasureMode mode,
                                             const std::filesystem::path& scratch_dir);

// Expected characterization table for the four modes.
std::vector<ErasureCharacterization> expected_characterizations();

// Every check, sorted by (kind, unit_id, first evidence position).
std::vector<Violation> run_all_checks(const Store& store, Timestamp now);

void sort_violations(std::vector<Violation>& violations);

// One JSON object per line, in sorted order.
void write_report_ndjson(std::ostream& out, const std::vector<Violation>& violations);

// Distinct violation kinds present (the audit exit code, capped by the CLI).
std::size_t violation_kind_count(const std::vector<Violation>& violations);

}  // namespace datacase

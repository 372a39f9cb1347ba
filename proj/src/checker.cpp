// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include "datacase/checker.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

#include "datacase/core.hpp"
#include "datacase/rng.hpp"

namespace datacase {

const char* violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::kG6InconsistentAction: return "G6-inconsistent-action";
    case ViolationKind::kG17MissingPolicy: return "G17-missing-policy";
    case ViolationKind::kG17LateErase: return "G17-late-erase";
    case ViolationKind::kG17MissingErase: return "G17-missing-erase";
    case ViolationKind::kErasureInconsistentRead: return "erasure-inconsistent-read";
    case ViolationKind::kErasureInconsistentInference: return "erasure-inconsistent-inference";
  }
  return "unknown";
}

namespace {

Violation make_violation(ViolationKind kind, std::string unit_id, Timestamp now) {
  Violation v;
  v.kind = kind;
  v.unit_id = std::move(unit_id);
  v.detected_at = now;
  return v;
}

void add_position(Violation& v, std::uint64_t pos) {
  v.evidence.push_back("pos:" + std::to_string(pos));
  if (v.first_position < 0) v.first_position = static_cast<std::int64_t>(pos);
}

}  // namespace

std::vector<Violation> check_g6(const Store& store, Timestamp now) {
  std::vector<Violation> out;
  const auto& records = store.ledger().records();
  for (std::uint64_t pos = 0; pos < records.size(); ++pos) {
    const ActionRecord& r = records[pos];
    DataUnitState state;
    auto snap = store.unit_snapshot(r.unit_id);
    if (snap.is_ok()) {
      state = state_at(snap.value(), r.time);
    }
    if (!is_policy_consistent(r, state)) {
      Violation v = make_violation(ViolationKind::kG6InconsistentAction, r.unit_id, now);
      add_position(v, pos);
      out.push_back(std::move(v));
    }
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> check_g17(const Store& store, Timestamp now) {
  std::vector<Violation> out;
  const auto& records = store.ledger().records();
  for (const auto& id : store.unit_ids()) {
    auto snap = store.unit_snapshot(id);
    if (!snap.is_ok()) continue;
    // Effective deadline: the latest compliance-erase t_f (satisfying
    // any one such policy satisfies the invariant).
    bool has_policy = false;
    Timestamp deadline = 0;
    for (const auto& p : snap.value().policies) {
      if (p.purpose.is_compliance_erase()) {
        has_policy = true;
        deadline = std::max(deadline, p.t_f);
      }
    }
    if (!has_policy) {
      Violation v = make_violation(ViolationKind::kG17MissingPolicy, id, now);
      v.evidence.push_back("unit:" + id);
      out.push_back(std::move(v));
      continue;
    }
    if (deadline >= now) continue;  // deadline not yet due

    std::int64_t final_pos = -1;
    std::int64_t erase_pos = -1;
    for (std::uint64_t pos = 0; pos < records.size(); ++pos) {
      if (records[pos].unit_id != id) continue;
      final_pos = static_cast<std::int64_t>(pos);
      if (records[pos].action.type == ActionType::kErase) {
        erase_pos = static_cast<std::int64_t>(pos);
      }
    }
    const bool compliant = final_pos >= 0 && erase_pos == final_pos &&
                           records[final_pos].time <= deadline;
    if (compliant) continue;
    if (erase_pos >= 0) {
      Violation v = make_violation(ViolationKind::kG17LateErase, id, now);
      add_position(v, static_cast<std::uint64_t>(erase_pos));
      v.evidence.push_back("deadline:" + std::to_string(deadline));
      out.push_back(std::move(v));
    } else {
      Violation v = make_violation(ViolationKind::kG17MissingErase, id, now);
      v.evidence.push_back("unit:" + id);
      v.evidence.push_back("deadline:" + std::to_string(deadline));
      out.push_back(std::move(v));
    }
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> detect_ir(const Store& store, Timestamp now) {
  std::vector<Violation> out;
  const auto& records = store.ledger().records();
  for (std::uint64_t pos = 0; pos < records.size(); ++pos) {
    const ActionRecord& r = records[pos];
    if (r.action.type != ActionType::kRead) continue;
    std::vector<PolicyTuple> active;
    auto snap = store.unit_snapshot(r.unit_id);
    if (snap.is_ok()) {
      active = active_policies(snap.value().policies, r.time);
    }
    if (active.empty()) {
      Violation v = make_violation(ViolationKind::kErasureInconsistentRead, r.unit_id, now);
      add_position(v, pos);
      out.push_back(std::move(v));
    }
  }
  sort_violations(out);
  return out;
}

std::vector<Violation> detect_ii(const Store& store, Timestamp now) {
  std::vector<Violation> out;
  for (const auto& id : store.unit_ids()) {
    auto status = store.status_of(id);
    if (!status.is_ok() || status.value() == ErasureStatus::kLive) continue;
    Violation v = make_violation(ViolationKind::kErasureInconsistentInference, id, now);
    for (const ProvenanceEdge* e : store.provenance().edges_from_input(id)) {
      if (!e->invertible) continue;
      auto child_status = store.status_of(e->derived_id);
      if (child_status.is_ok() && child_status.value() == ErasureStatus::kLive) {
        v.evidence.push_back("edge:" + e->derived_id);
      }
    }
    if (!v.evidence.empty()) out.push_back(std::move(v));
  }
  sort_violations(out);
  return out;
}

Result<bool> classify_inv(const Store& store, const std::string& unit_id) {
  auto status = store.status_of(unit_id);
  if (!status.is_ok()) return status.status();
  if (status.value() == ErasureStatus::kLive) {
    return Status(Code::kUnitLive, "unit is live: " + unit_id);
  }
  return store.escrow_of(unit_id).has_value();
}

Result<ErasureCharacterization> characterize(ErasureMode mode,
                                             const std::filesystem::path& scratch_dir) {
  std::error_code ec;
  std::filesystem::create_directories(scratch_dir, ec);
  const auto store_dir =
      scratch_dir / (std::string("characterize-") + erasure_mode_name(mode));
  std::filesystem::remove_all(store_dir, ec);

  auto opened = Store::open(store_dir);
  if (!opened.is_ok()) return opened.status();
  Store& store = *opened.value();

  const EntityId subject{EntityKind::kDataSubject, "s1"};
  const EntityId controller{EntityKind::kController, "ctrl"};
  const Purpose purpose{"service"};

  DataUnit base;
  base.id = "base";
  base.subjects = {subject};
  base.origins = {"origin-0"};
  std::vector<std::uint8_t> value(32);
  Rng rng(0xC0DEC0DEULL ^ static_cast<std::uint64_t>(mode));
  rng.fill(value);
  base.values = {ValueVersion{value, 1}};
  base.policies = {
      PolicyTuple{purpose, controller, 0, 1000},
      PolicyTuple{Purpose{kCompliancePurpose}, controller, 0, 1000},
  };
  auto put = store.put(base, controller, purpose, 1);
  if (!put.is_ok()) return put.status();

  std::vector<std::uint8_t> derived_value(32);
  rng.fill(derived_value);
  auto derived = store.derive({"base"}, "child", "f", /*invertible=*/true,
                              /*subjects_identifiable=*/true, derived_value, controller, purpose,
                              2);
  if (!derived.is_ok()) return derived.status();

  if (mode == ErasureMode::kReversiblyInaccessible) {
    auto r = store.make_inaccessible("base", 3);
    if (!r.is_ok()) return r.status();
  } else {
    auto r = store.erase("base", mode, controller, 3);
    if (!r.is_ok()) return r.status();
  }

  // A read attempt after erasure must be refused; a refused read appends
  // no history, so no erasure-inconsistent read can appear.
  auto read = store.get("base", controller, purpose, 4);
  if (read.is_ok()) {
    return Status(Code::kCorruption, "erased unit still readable");
  }

  ErasureCharacterization c;
  c.mode = mode;
  c.ir = !detect_ir(store, 5).empty();
  auto ii = detect_ii(store, 5);
  c.ii = std::any_of(ii.begin(), ii.end(),
                     [](const Violation& v) { return v.unit_id == "base"; });
  auto inv = classify_inv(store, "base");
  if (!inv.is_ok()) return inv.status();
  c.inv = inv.value();

  opened.value().reset();
  std::filesystem::remove_all(store_dir, ec);
  return c;
}

std::vector<ErasureCharacterization> expected_characterizations() {
  return {
      {ErasureMode::kReversiblyInaccessible, false, true, true},
      {ErasureMode::kDelete, false, true, false},
      {ErasureMode::kStrongDelete, false, false, false},
      {ErasureMode::kPermanentDelete, false, false, false},
  };
}

void sort_violations(std::vector<Violation>& violations) {
  std::sort(violations.begin(), violations.end(), [](const Violation& a, const Violation& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.unit_id != b.unit_id) return a.unit_id < b.unit_id;
    return a.first_position < b.first_position;
  });
}

std::vector<Violation> run_all_checks(const Store& store, Timestamp now) {
  std::vector<Violation> all;
  for (auto&& batch : {check_g6(store, now), check_g17(store, now), detect_ir(store, now),
                       detect_ii(store, now)}) {
    all.insert(all.end(), batch.begin(), batch.end());
  }
  sort_violations(all);
  return all;
}

void write_report_ndjson(std::ostream& out, const std::vector<Violation>& violations) {
  for (const auto& v : violations) {
    nlohmann::json j;
    j["kind"] = violation_kind_name(v.kind);
    j["unit_id"] = v.unit_id;
    j["evidence"] = v.evidence;
    j["detected_at"] = v.detected_at;
    out << j.dump() << "\n";
  }
}

std::size_t violation_kind_count(const std::vector<Violation>& violations) {
  std::set<ViolationKind> kinds;
  for (const auto& v : violations) kinds.insert(v.kind);
  return kinds.size();
}

}  // namespace datacase

// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include <doctest.h>

#include <set>
#include <tuple>

#include "datacase/checker.hpp"
#include "datacase/core.hpp"
#include "datacase/rng.hpp"
#include "datacase/store.hpp"
#include "checker_oracle.hpp"
#include "test_util.hpp"

using namespace datacase;
using testutil::TempDir;
using testoracle::VKey;
using testoracle::keys_of;
using testoracle::oracle_all;

namespace {

const EntityId kCtrl{EntityKind::kController, "ctrl"};
const EntityId kSubj{EntityKind::kDataSubject, "s"};
const Purpose kService{"service"};

std::vector<std::uint8_t> value_bytes(std::uint64_t seed) {
  std::vector<std::uint8_t> v(24);
  Rng rng(mix64(seed));
  rng.fill(v);
  return v;
}

DataUnit unit_with_policies(const std::string& id, std::vector<PolicyTuple> policies) {
  DataUnit u;
  u.id = id;
  u.subjects = {{EntityKind::kDataSubject, "s-" + id}};
  u.values = {{value_bytes(std::hash<std::string>{}(id)), 5}};
  u.policies = std::move(policies);
  return u;
}

// Re-verification of one violation from its evidence alone.
bool reverify(const Store& store, const Violation& v) {
  const auto& records = store.ledger().records();
  auto parse_pos = [&](const std::string& e) -> std::int64_t {
    if (e.rfind("pos:", 0) != 0) return -1;
    return std::stoll(e.substr(4));
  };
  switch (v.kind) {
    case ViolationKind::kG6InconsistentAction: {
      const std::int64_t pos = parse_pos(v.evidence.at(0));
      if (pos < 0 || pos >= static_cast<std::int64_t>(records.size())) return false;
      const ActionRecord& r = records[pos];
      DataUnitState state;
      auto snap = store.unit_snapshot(r.unit_id);
      if (snap.is_ok()) state = state_at(snap.value(), r.time);
      return !is_policy_consistent(r, state);
    }
    case ViolationKind::kG17MissingPolicy: {
      auto snap = store.unit_snapshot(v.unit_id);
      if (!snap.is_ok()) return false;
      for (const auto& p : snap.value().policies) {
        if (p.purpose.is_compliance_erase()) return false;
      }
      return true;
    }
    case ViolationKind::kG17LateErase: {
      const std::int64_t pos = parse_pos(v.evidence.at(0));
      if (pos < 0 || pos >= static_cast<std::int64_t>(records.size())) return false;
      return records[pos].action.type == ActionType::kErase;
    }
    case ViolationKind::kG17MissingErase: {
      for (const auto& r : store.ledger().history_of(v.unit_id)) {
        if (r.action.type == ActionType::kErase) return false;
      }
      return true;
    }
    case ViolationKind::kErasureInconsistentRead: {
      const std::int64_t pos = parse_pos(v.evidence.at(0));
      if (pos < 0 || pos >= static_cast<std::int64_t>(records.size())) return false;
      const ActionRecord& r = records[pos];
      if (r.action.type != ActionType::kRead) return false;
      auto snap = store.unit_snapshot(r.unit_id);
      if (!snap.is_ok()) return true;  // no unit, no policies
      return active_policies(snap.value().policies, r.time).empty();
    }
    case ViolationKind::kErasureInconsistentInference: {
      for (const auto& e : v.evidence) {
        if (e.rfind("edge:", 0) != 0) return false;
        const std::string child = e.substr(5);
        const ProvenanceEdge* edge = store.provenance().edge_for_derived(child);
        if (!edge || !edge->invertible) return false;
        auto cs = store.status_of(child);
        if (!cs.is_ok() || cs.value() != ErasureStatus::kLive) return false;
      }
      auto s = store.status_of(v.unit_id);
      return s.is_ok() && s.value() != ErasureStatus::kLive;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("clean store produces no violations") {
  TempDir td;
  auto opened = Store::open(td.sub("s"));
  REQUIRE(opened.is_ok());
  Store& store = *opened.value();
  // The lawful-processing walk-through: create, read within the window.
  DataUnit u = unit_with_policies("cc", {{Purpose{"billing"}, kCtrl, 0, 1000},
                                         {Purpose{kCompliancePurpose}, kCtrl, 0, 1000}});
  REQUIRE(store.put(u, kCtrl, Purpose{"billing"}, 10).is_ok());
  REQUIRE(store.get("cc", kCtrl, Purpose{"billing"}, 20).is_ok());
  CHECK(check_g6(store, 100).empty());
  CHECK(check_g17(store, 100).empty());  // deadline not yet due
  CHECK(detect_ir(store, 100).empty());
  CHECK(detect_ii(store, 100).empty());
  CHECK(run_all_checks(store, 100).empty());
}

TEST_CASE("empty ledger is vacuously consistent") {
  TempDir td;
  auto opened = Store::open(td.sub("s"));
  REQUIRE(opened.is_ok());
  CHECK(check_g6(*opened.value(), 50).empty());
  CHECK(detect_ir(*opened.value(), 50).empty());
}

TEST_CASE("g6 flags an injected action with expired policies") {
  TempDir td;
  auto opened = Store::open(td.sub("s"));
  REQUIRE(opened.is_ok());
  Store& store = *opened.value();
  DataUnit u = unit_with_policies("cc", {{Purpose{"billing"}, kCtrl, 0, 100},
                                         {Purpose{kCompliancePurpose}, kCtrl, 0, 5000}});
  REQUIRE(store.put(u, kCtrl, Purpose{"billing"}, 10).is_ok());

  ActionRecord stale;
  stale.unit_id = "cc";
  stale.purpose = Purpose{"billing"};
  stale.entity = kCtrl;
  stale.action = {ActionType::kRead, {}};
  stale.time = 200;  // billing window ended at 100
  auto pos = store.mutable_ledger().append(stale);
  REQUIRE(pos.is_ok());

  const auto violations = check_g6(store, 300);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].unit_id == "cc");
  CHECK(violations[0].first_position == static_cast<std::int64_t>(pos.value()));

  // Brute-force re-check of every (record, state) pair agrees.
  CHECK(keys_of(violations) ==
        std::multiset<VKey>{{static_cast<int>(ViolationKind::kG6InconsistentAction), "cc",
                             static_cast<std::int64_t>(pos.value())}});
}

TEST_CASE("g17 deadline semantics: on-time, late, missing") {
  const Timestamp deadline = 1000;
  SUBCASE("erase at deadline-1 is compliant") {
    TempDir td;
    auto opened = Store::open(td.sub("s"));
    Store& store = *opened.value();
    DataUnit u = unit_with_policies("u", {{kService, kCtrl, 0, 2000},
                                          {Purpose{kCompliancePurpose}, kCtrl, 0, deadline}});
    REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
    REQUIRE(store.erase("u", ErasureMode::kDelete, kCtrl, deadline - 1).is_ok());
    CHECK(check_g17(store, deadline + 500).empty());
  }
  SUBCASE("erase after the deadline is late") {
    TempDir td;
    auto opened = Store::open(td.sub("s"));
    Store& store = *opened.value();
    DataUnit u = unit_with_policies("u", {{kService, kCtrl, 0, 2000},
                                          {Purpose{kCompliancePurpose}, kCtrl, 0, deadline}});
    REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
    REQUIRE(store.erase("u", ErasureMode::kDelete, kCtrl, deadline + 5).is_ok());
    const auto violations = check_g17(store, deadline + 500);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == ViolationKind::kG17LateErase);
  }
  SUBCASE("no erase before a passed deadline is missing") {
    TempDir td;
    auto opened = Store::open(td.sub("s"));
    Store& store = *opened.value();
    DataUnit u = unit_with_policies("u", {{kService, kCtrl, 0, 2000},
                                          {Purpose{kCompliancePurpose}, kCtrl, 0, deadline}});
    REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
    const auto violations = check_g17(store, deadline + 1);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == ViolationKind::kG17MissingErase);
  }
  SUBCASE("a unit without a compliance-erase policy is flagged") {
    TempDir td;
    auto opened = Store::open(td.sub("s"));
    Store& store = *opened.value();
    DataUnit u = unit_with_policies("u", {{kService, kCtrl, 0, 2000}});
    REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
    const auto violations = check_g17(store, 20);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].kind == ViolationKind::kG17MissingPolicy);
  }
}

TEST_CASE("g17 violations never disappear as now advances") {
  TempDir td;
  auto opened = Store::open(td.sub("s"));
  Store& store = *opened.value();
  for (int i = 0; i < 6; ++i) {
    const Timestamp deadline = 100 + 40 * static_cast<Timestamp>(i);
    DataUnit u = unit_with_policies("u" + std::to_string(i),
                                    {{kService, kCtrl, 0, 5000},
                                     {Purpose{kCompliancePurpose}, kCtrl, 0, deadline}});
    REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
  }
  REQUIRE(store.erase("u0", ErasureMode::kDelete, kCtrl, 150).is_ok());  // late for deadline 100

  std::multiset<VKey> prev;
  for (Timestamp now = 50; now <= 500; now += 10) {
    auto keys = keys_of(check_g17(store, now));
    for (const auto& k : prev) CHECK(keys.count(k) >= prev.count(k));
    prev = std::move(keys);
  }
}

TEST_CASE("detect_ir flags reads with empty policy sets") {
  TempDir td;
  auto opened = Store::open(td.sub("s"));
  Store& store = *opened.value();
  DataUnit u = unit_with_policies("u", {{kService, kCtrl, 0, 100},
                                        {Purpose{kCompliancePurpose}, kCtrl, 0, 100}});
  REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
  REQUIRE(store.get("u", kCtrl, kService, 20).is_ok());
  CHECK(detect_ir(store, 30).empty());

  // Forced raw read after every policy expired, bypassing enforcement.
  ActionRecord forced;
  forced.unit_id = "u";
  forced.purpose = kService;
  forced.entity = kCtrl;
  forced.action = {ActionType::kRead, {}};
  forced.time = 500;
  REQUIRE(store.mutable_ledger().append(forced).is_ok());

  const auto violations = detect_ir(store, 600);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].kind == ViolationKind::kErasureInconsistentRead);
  CHECK(violations[0].unit_id == "u");
}

TEST_CASE("detect_ii across the erasure modes") {
  TempDir td;
  SUBCASE("delete leaves a live invertible child: violation") {
    auto opened = Store::open(td.sub("a"));
    Store& store = *opened.value();
    DataUnit u = unit_with_policies("base", {{kService, kCtrl, 0, 1000},
                                             {Purpose{kCompliancePurpose}, kCtrl, 0, 1000}});
    REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
    REQUIRE(store.derive({"base"}, "child", "f", true, true, value_bytes(1), kCtrl, kService, 11)
                .is_ok());
    REQUIRE(store.erase("base", ErasureMode::kDelete, kCtrl, 20).is_ok());
    const auto violations = detect_ii(store, 30);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].unit_id == "base");
    CHECK(violations[0].evidence == std::vector<std::string>{"edge:child"});
  }
  SUBCASE("strong delete erases the child: none") {
    auto opened = Store::open(td.sub("b"));
    Store& store = *opened.value();
    DataUnit u = unit_with_policies("base", {{kService, kCtrl, 0, 1000},
                                             {Purpose{kCompliancePurpose}, kCtrl, 0, 1000}});
    REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
    REQUIRE(store.derive({"base"}, "child", "f", true, true, value_bytes(2), kCtrl, kService, 11)
                .is_ok());
    REQUIRE(store.erase("base", ErasureMode::kStrongDelete, kCtrl, 20).is_ok());
    CHECK(detect_ii(store, 30).empty());
  }
  SUBCASE("non-invertible child cannot reconstruct: none") {
    auto opened = Store::open(td.sub("c"));
    Store& store = *opened.value();
    DataUnit u = unit_with_policies("base", {{kService, kCtrl, 0, 1000},
                                             {Purpose{kCompliancePurpose}, kCtrl, 0, 1000}});
    REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
    REQUIRE(store.derive({"base"}, "child", "f", false, true, value_bytes(3), kCtrl, kService, 11)
                .is_ok());
    REQUIRE(store.erase("base", ErasureMode::kDelete, kCtrl, 20).is_ok());
    CHECK(detect_ii(store, 30).empty());
  }
}

TEST_CASE("classify_inv distinguishes escrowed from destroyed") {
  TempDir td;
  auto opened = Store::open(td.sub("s"));
  Store& store = *opened.value();
  for (const char* id : {"a", "b", "c"}) {
    DataUnit u = unit_with_policies(id, {{kService, kCtrl, 0, 1000},
                                         {Purpose{kCompliancePurpose}, kCtrl, 0, 1000}});
    REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
  }
  REQUIRE(store.make_inaccessible("a", 20).is_ok());
  REQUIRE(store.erase("b", ErasureMode::kDelete, kCtrl, 21).is_ok());

  CHECK(classify_inv(store, "a").value() == true);
  CHECK(classify_inv(store, "b").value() == false);
  auto live = classify_inv(store, "c");
  CHECK_FALSE(live.is_ok());
  CHECK(live.status().code() == Code::kUnitLive);
}

TEST_CASE("characterize reproduces the erasure interpretation table") {
  TempDir td;
  const auto expected = expected_characterizations();
  for (const auto& want : expected) {
    auto got = characterize(want.mode, td.path());
    REQUIRE(got.is_ok());
    CHECK(got.value() == want);
  }
}

TEST_CASE("checker equals the brute-force oracle on randomized instances") {
  // A compact version of the acceptance-scale experiment: random stores
  // with injected violations of every kind.
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    TempDir td;
    Rng rng(mix64(0xC4EC4E ^ trial));
    auto opened = Store::open(td.sub("s"));
    REQUIRE(opened.is_ok());
    Store& store = *opened.value();

    const int n_units = 2 + static_cast<int>(rng.below(10));
    const Timestamp now = 3000;
    std::vector<std::string> ids;
    Timestamp clock = 10;
    for (int i = 0; i < n_units; ++i) {
      const std::string id = "u" + std::to_string(i);
      std::vector<PolicyTuple> policies = {{kService, kCtrl, 0, 400 + rng.below(300)}};
      if (rng.below(100) < 75) {
        policies.push_back({Purpose{kCompliancePurpose}, kCtrl, 0, 600 + rng.below(2800)});
      }
      REQUIRE(store.put(unit_with_policies(id, policies), kCtrl, kService, clock++).is_ok());
      ids.push_back(id);
    }
    // Derivations with random flags.
    const int n_derives = static_cast<int>(rng.below(4));
    for (int i = 0; i < n_derives; ++i) {
      const std::string in = ids[rng.below(ids.size())];
      if (store.status_of(in).value() != ErasureStatus::kLive) continue;
      (void)store.derive({in}, "d" + std::to_string(i), "f", rng.below(2) == 0,
                         rng.below(2) == 0, value_bytes(trial * 100 + i), kCtrl, kService,
                         clock++, /*regulation_required=*/true);
    }
    // Reads and erases, some late.
    for (int i = 0; i < n_units; ++i) {
      if (rng.below(100) < 50) (void)store.get(ids[i], kCtrl, kService, clock++);
    }
    for (int i = 0; i < n_units; ++i) {
      if (rng.below(100) < 45) {
        // Sometimes prompt, sometimes far past the deadline.
        const Timestamp t = clock + (rng.below(2) ? 0 : 1500 + rng.below(1000));
        clock = t + 1;
        (void)store.erase(ids[i], rng.below(2) ? ErasureMode::kDelete : ErasureMode::kStrongDelete,
                          kCtrl, t);
      }
    }
    // Injected raw records: bogus purposes, post-expiry reads, unknown units.
    const int n_inject = static_cast<int>(rng.below(5));
    for (int i = 0; i < n_inject; ++i) {
      ActionRecord r;
      r.unit_id = rng.below(4) == 0 ? "ghost" : ids[rng.below(ids.size())];
      r.purpose = rng.below(2) ? Purpose{"bogus"} : kService;
      r.entity = kCtrl;
      r.action = {rng.below(2) ? ActionType::kRead : ActionType::kUpdateMetadata, {}};
      r.time = clock + rng.below(500);
      r.regulation_required = rng.below(100) < 20;
      clock = r.time;
      REQUIRE(store.mutable_ledger().append(r).is_ok());
    }

    const auto got = keys_of(run_all_checks(store, now));
    const auto want = oracle_all(store, now);
    CHECK(got == want);

    // Soundness: every reported violation re-verifies from its evidence.
    for (const auto& v : run_all_checks(store, now)) {
      CHECK(reverify(store, v));
    }
  }
}

TEST_CASE("violation report is deterministic NDJSON sorted by kind, unit, position") {
  TempDir td;
  auto opened = Store::open(td.sub("s"));
  Store& store = *opened.value();
  for (int i = 0; i < 3; ++i) {
    DataUnit u = unit_with_policies("u" + std::to_string(i), {{kService, kCtrl, 0, 100}});
    REQUIRE(store.put(u, kCtrl, kService, 10).is_ok());
  }
  const auto violations = run_all_checks(store, 200);
  REQUIRE(violations.size() == 3);  // three missing compliance-erase policies
  for (size_t i = 1; i < violations.size(); ++i) {
    CHECK(violations[i - 1].unit_id < violations[i].unit_id);
  }
  std::ostringstream a, b;
  write_report_ndjson(a, violations);
  write_report_ndjson(b, run_all_checks(store, 200));
  CHECK(a.str() == b.str());
  CHECK(violation_kind_count(violations) == 1);
}

// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include <doctest.h>

#include <set>

#include "datacase/codec.hpp"
#include "datacase/core.hpp"
#include "datacase/rng.hpp"
#include "datacase/time_codec.hpp"

using namespace datacase;

namespace {

const EntityId kNetflix{EntityKind::kController, "Netflix"};
const EntityId kAws{EntityKind::kProcessor, "AWS"};
const EntityId kSubject1234{EntityKind::kDataSubject, "1234"};

PolicyTuple billing_policy() {
  return {Purpose{"billing"}, kNetflix, parse_iso8601("2023-01-01").value(),
          parse_iso8601("2024-01-01").value()};
}

DataUnit credit_card_unit() {
  DataUnit u;
  u.id = "cc-1234";
  u.subjects = {kSubject1234};
  u.origins = {"0"};
  u.values = {{{0xDE, 0xAD, 0xBE, 0xEF}, parse_iso8601("2023-01-02").value()}};
  u.policies = {billing_policy(),
                {Purpose{"retention"}, kAws, parse_iso8601("2023-01-01").value(),
                 parse_iso8601("2024-01-01").value()}};
  return u;
}

// Brute-force active-time set over a small integer grid; the independent
// oracle for the window algebra.
std::set<Timestamp> active_set(const PolicyTuple& p, Timestamp lo, Timestamp hi) {
  std::set<Timestamp> s;
  for (Timestamp t = lo; t <= hi; ++t) {
    if (p.t_b <= t && t <= p.t_f) s.insert(t);
  }
  return s;
}

}  // namespace

TEST_CASE("policy_active window semantics") {
  const PolicyTuple pi1 = billing_policy();
  CHECK(policy_active(pi1, parse_iso8601("2023-02-26T00:10:00Z").value()));
  CHECK_FALSE(policy_active(pi1, parse_iso8601("2022-12-31").value()));

  PolicyTuple point{Purpose{"p"}, kNetflix, 42, 42};
  CHECK(policy_active(point, 42));  // both ends inclusive
  CHECK_FALSE(policy_active(point, 41));
  CHECK_FALSE(policy_active(point, 43));
}

TEST_CASE("policy_active equals grid membership exhaustively") {
  for (Timestamp b = 0; b <= 12; ++b) {
    for (Timestamp f = b; f <= 12; ++f) {
      const PolicyTuple p{Purpose{"x"}, kNetflix, b, f};
      const auto grid = active_set(p, 0, 14);
      for (Timestamp t = 0; t <= 14; ++t) {
        CHECK(policy_active(p, t) == grid.contains(t));
      }
    }
  }
}

TEST_CASE("state_at returns latest value and active policies") {
  const DataUnit u = credit_card_unit();
  const Timestamp t = parse_iso8601("2023-02-26T00:10:00Z").value();
  const DataUnitState s = state_at(u, t);
  REQUIRE(s.value.has_value());
  CHECK(s.value->bytes == std::vector<std::uint8_t>{0xDE, 0xAD, 0xBE, 0xEF});
  CHECK(s.subjects == std::vector<EntityId>{kSubject1234});
  CHECK(s.active_policies.size() == 2);

  // Before the first value: absent value, policies still computed.
  const DataUnitState early = state_at(u, parse_iso8601("2023-01-01").value());
  CHECK_FALSE(early.value.has_value());
  CHECK(early.active_policies.size() == 2);

  // All policies expired.
  const DataUnitState late = state_at(u, parse_iso8601("2025-01-01").value());
  CHECK(late.active_policies.empty());
}

TEST_CASE("state_at active set equals brute-force filter") {
  DataUnit u;
  u.id = "grid";
  u.subjects = {kSubject1234};
  Rng rng(7);
  for (int i = 0; i < 12; ++i) {
    const Timestamp b = rng.below(30);
    u.policies.push_back(
        {Purpose{"p" + std::to_string(rng.below(3))}, kNetflix, b, b + rng.below(10)});
  }
  for (Timestamp t = 0; t <= 45; ++t) {
    std::vector<PolicyTuple> expect;
    for (const auto& p : u.policies) {
      if (p.t_b <= t && t <= p.t_f) expect.push_back(p);
    }
    CHECK(state_at(u, t).active_policies == expect);
  }
}

TEST_CASE("is_policy_consistent matches purpose and entity") {
  const DataUnit u = credit_card_unit();
  const Timestamp t = parse_iso8601("2023-02-26T00:10:00Z").value();
  ActionRecord read;
  read.unit_id = u.id;
  read.purpose = Purpose{"billing"};
  read.entity = kNetflix;
  read.action = {ActionType::kRead, {}};
  read.time = t;
  CHECK(is_policy_consistent(read, state_at(u, t)));

  // No active policies, not regulation-required.
  ActionRecord stale = read;
  stale.time = parse_iso8601("2025-06-01").value();
  CHECK_FALSE(is_policy_consistent(stale, state_at(u, stale.time)));

  // A regulation-required erase is consistent with an empty policy set.
  ActionRecord erase;
  erase.unit_id = u.id;
  erase.purpose = Purpose{kCompliancePurpose};
  erase.entity = kNetflix;
  erase.action = {ActionType::kErase, ErasureMode::kDelete};
  erase.time = parse_iso8601("2025-06-01").value();
  erase.regulation_required = true;
  CHECK(is_policy_consistent(erase, state_at(u, erase.time)));

  // Wrong entity, same purpose.
  ActionRecord other = read;
  other.entity = kAws;
  CHECK_FALSE(is_policy_consistent(other, state_at(u, t)));
}

TEST_CASE("is_policy_consistent is monotone in the policy set") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    DataUnit u;
    u.id = "m";
    u.subjects = {kSubject1234};
    for (int i = 0; i < 5; ++i) {
      const Timestamp b = rng.below(20);
      u.policies.push_back(
          {Purpose{"p" + std::to_string(rng.below(3))},
           rng.below(2) ? kNetflix : kAws, b, b + rng.below(8)});
    }
    ActionRecord r;
    r.unit_id = u.id;
    r.purpose = Purpose{"p" + std::to_string(rng.below(3))};
    r.entity = rng.below(2) ? kNetflix : kAws;
    r.action = {ActionType::kRead, {}};
    r.time = rng.below(25);
    const bool before = is_policy_consistent(r, state_at(u, r.time));
    DataUnit grown = u;
    const Timestamp b = rng.below(20);
    grown.policies.push_back(
        {Purpose{"p" + std::to_string(rng.below(3))},
         rng.below(2) ? kNetflix : kAws, b, b + rng.below(8)});
    const bool after = is_policy_consistent(r, state_at(grown, r.time));
    if (before) CHECK(after);  // adding policies never flips true -> false
  }
}

TEST_CASE("derive_unit unions subjects and intersects policy windows") {
  DataUnit a = credit_card_unit();
  DataUnit b;
  b.id = "view-5678";
  b.subjects = {{EntityKind::kDataSubject, "5678"}};
  b.origins = {"1"};
  b.policies = {{Purpose{"billing"}, kNetflix, 0, 100}};

  auto derived = derive_unit(std::vector<DataUnit>{a, b}, "joined", "join", false, {0x01}, 5);
  REQUIRE(derived.is_ok());
  const DataUnit& y = derived.value().unit;
  CHECK(y.category == UnitCategory::kDerived);
  CHECK(y.subjects == std::vector<EntityId>{kSubject1234, {EntityKind::kDataSubject, "5678"}});
  CHECK(y.origins == std::vector<std::string>{"0", "1"});
  // (retention, AWS) is not present in b; (billing, Netflix) windows do
  // not overlap, so the restriction is empty.
  CHECK(y.policies.empty());

  // Single input: identity restriction.
  auto solo = derive_unit(std::vector<DataUnit>{a}, "copy", "id", true, {0x02}, 5);
  REQUIRE(solo.is_ok());
  CHECK(solo.value().unit.subjects == a.subjects);
  std::set<PolicyTuple> lhs(solo.value().unit.policies.begin(), solo.value().unit.policies.end());
  std::set<PolicyTuple> rhs(a.policies.begin(), a.policies.end());
  CHECK(lhs == rhs);
  CHECK(solo.value().edge.invertible);
  CHECK(solo.value().edge.subjects_identifiable);  // default
}

TEST_CASE("derive_unit window intersection matches the brute-force oracle") {
  DataUnit a;
  a.id = "a";
  a.subjects = {kSubject1234};
  a.policies = {{Purpose{"billing"}, kNetflix, 10, 20}};
  DataUnit b;
  b.id = "b";
  b.subjects = {{EntityKind::kDataSubject, "5678"}};
  b.policies = {{Purpose{"billing"}, kNetflix, 15, 30}};

  auto derived = derive_unit(std::vector<DataUnit>{a, b}, "y", "f", false, {}, 16);
  REQUIRE(derived.is_ok());
  REQUIRE(derived.value().unit.policies.size() == 1);
  const PolicyTuple& py = derived.value().unit.policies[0];
  CHECK(py.t_b == 15);
  CHECK(py.t_f == 20);

  // Oracle: the intersection of the two active-time sets over the grid.
  std::set<Timestamp> inter;
  for (Timestamp t = 0; t <= 40; ++t) {
    if (policy_active(a.policies[0], t) && policy_active(b.policies[0], t)) inter.insert(t);
  }
  CHECK(active_set(py, 0, 40) == inter);
}

TEST_CASE("derive_unit subset property over random policy sets") {
  Rng rng(23);
  for (int trial = 0; trial < 120; ++trial) {
    std::vector<DataUnit> inputs;
    const int n = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < n; ++i) {
      DataUnit u;
      u.id = "in" + std::to_string(i);
      u.subjects = {{EntityKind::kDataSubject, "s" + std::to_string(rng.below(4))}};
      const int npol = 1 + static_cast<int>(rng.below(4));
      for (int k = 0; k < npol; ++k) {
        const Timestamp b = rng.below(25);
        u.policies.push_back({Purpose{"p" + std::to_string(rng.below(2))},
                              rng.below(2) ? kNetflix : kAws, b, b + rng.below(12)});
      }
      inputs.push_back(std::move(u));
    }
    auto derived = derive_unit(inputs, "y", "f", false, {}, 1);
    REQUIRE(derived.is_ok());
    const DataUnit& y = derived.value().unit;

    for (const auto& in : inputs) {
      for (const auto& s : in.subjects) {
        CHECK(std::find(y.subjects.begin(), y.subjects.end(), s) != y.subjects.end());
      }
    }
    // Every derived window fits inside some same-key window of every input.
    for (const auto& py : y.policies) {
      const auto yset = active_set(py, 0, 45);
      for (const auto& in : inputs) {
        bool contained = false;
        for (const auto& pin : in.policies) {
          if (pin.purpose != py.purpose || pin.entity != py.entity) continue;
          const auto iset = active_set(pin, 0, 45);
          if (std::includes(iset.begin(), iset.end(), yset.begin(), yset.end())) {
            contained = true;
            break;
          }
        }
        CHECK(contained);
      }
    }
  }
}

TEST_CASE("derive_unit rejects empty inputs") {
  auto r = derive_unit({}, "y", "f", false, {}, 0);
  CHECK_FALSE(r.is_ok());
  CHECK(r.status().code() == Code::kEmptyInputs);
}

TEST_CASE("provenance graph stays acyclic") {
  ProvenanceGraph g;
  CHECK(g.add_edge({"y", {"a", "b"}, "f", false, true}).is_ok());
  CHECK(g.add_edge({"z", {"y"}, "g", true, true}).is_ok());
  // A second derivation for an existing unit is rejected.
  CHECK_FALSE(g.add_edge({"z", {"a"}, "h", false, true}).is_ok());
  // a depends on z which depends on y which depends on a: cycle.
  CHECK_FALSE(g.add_edge({"a", {"z"}, "h", false, true}).is_ok());
  // Self-edge.
  CHECK_FALSE(g.add_edge({"w", {"w"}, "h", false, true}).is_ok());
  CHECK(g.reaches("a", "z"));
  CHECK_FALSE(g.reaches("z", "a"));
  CHECK(g.edges_from_input("a").size() == 1);
  CHECK(g.edge_for_derived("z") != nullptr);
}

TEST_CASE("unit payload encoding round-trips with value ranges") {
  DataUnit u = credit_card_unit();
  u.values.push_back({{1, 2, 3}, parse_iso8601("2023-06-01").value()});
  std::vector<ValueRange> ranges;
  const auto payload = encode_unit(u, &ranges);
  REQUIRE(ranges.size() == 2);
  for (size_t i = 0; i < ranges.size(); ++i) {
    CHECK(std::equal(u.values[i].bytes.begin(), u.values[i].bytes.end(),
                     payload.begin() + ranges[i].offset));
    CHECK(ranges[i].length == u.values[i].bytes.size());
  }
  auto back = decode_unit(payload);
  REQUIRE(back.is_ok());
  CHECK(back.value() == u);
}

TEST_CASE("action record encoding round-trips") {
  ActionRecord r;
  r.unit_id = "cc-1234";
  r.purpose = Purpose{"billing"};
  r.entity = kNetflix;
  r.action = {ActionType::kErase, ErasureMode::kStrongDelete};
  r.state_digest = digest_of(std::vector<std::uint8_t>{9, 9, 9});
  r.time = 123456;
  r.regulation_required = true;
  const auto payload = encode_action_record(r);
  auto back = decode_action_record(payload);
  REQUIRE(back.is_ok());
  CHECK(back.value() == r);
}

TEST_CASE("unit validation catches the documented invariants") {
  DataUnit u = credit_card_unit();
  CHECK(u.validate().is_ok());

  DataUnit two_subjects = u;
  two_subjects.subjects.push_back({EntityKind::kDataSubject, "5678"});
  CHECK_FALSE(two_subjects.validate().is_ok());  // base units: exactly one subject

  DataUnit bad_order = u;
  bad_order.values.push_back({{1}, 0});
  CHECK_FALSE(bad_order.validate().is_ok());  // strictly increasing version times

  DataUnit bad_policy = u;
  bad_policy.policies.push_back({Purpose{"x"}, kNetflix, 10, 5});
  CHECK_FALSE(bad_policy.validate().is_ok());
}

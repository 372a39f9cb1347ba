// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "datacase/status.hpp"
#include "datacase/types.hpp"

namespace datacase {

// True iff t falls inside the policy window, both ends inclusive.
bool policy_active(const PolicyTuple& policy, Timestamp t);

std::vector<PolicyTuple> active_policies(std::span<const PolicyTuple> policies, Timestamp t);

// Snapshot of the unit at t: latest value at or before t (absent if the
// first value is later than t) and the policies active at t.
DataUnitState state_at(const DataUnit& unit, Timestamp t);

// An action is policy-consistent when some active policy matches its
// (purpose, entity) pair, or the action is required by a data regulation.
bool is_policy_consistent(const ActionRecord& record, const DataUnitState& state);

struct DerivedUnit {
  DataUnit unit;
  ProvenanceEdge edge;
};

// Builds a derived unit: subjects and origins are the union over the
// inputs; policies are the per-(purpose, entity) window intersection
// across all inputs, dropping empty windows. When a key has multiple
// windows within an input, every combination of one window per input is
// intersected, so each result window is contained in a window of every
// input.
Result<DerivedUnit> derive_unit(std::span<const DataUnit> inputs,
                                const std::string& derived_id,
                                const std::string& f_descriptor,
                                bool invertible,
                                std::vector<std::uint8_t> value,
                                Timestamp t,
                                bool subjects_identifiable = true);

// Derivation dependencies, acyclic by construction.
class ProvenanceGraph {
 public:
  Status add_edge(ProvenanceEdge edge);
  const std::vector<ProvenanceEdge>& edges() const { return edges_; }

  // Edges that list `unit_id` among their inputs.
  std::vector<const ProvenanceEdge*> edges_from_input(const std::string& unit_id) const;
  const ProvenanceEdge* edge_for_derived(const std::string& unit_id) const;
  bool reaches(const std::string& from, const std::string& to) const;

 private:
  std::vector<ProvenanceEdge> edges_;
};

}  // namespace datacase

// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include "datacase/core.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace datacase {

bool policy_active(const PolicyTuple& policy, Timestamp t) {
  return policy.t_b <= t && t <= policy.t_f;
}

std::vector<PolicyTuple> active_policies(std::span<const PolicyTuple> policies, Timestamp t) {
  std::vector<PolicyTuple> out;
  for (const auto& p : policies) {
    if (policy_active(p, t)) out.push_back(p);
  }
  return out;
}

DataUnitState state_at(const DataUnit& unit, Timestamp t) {
  DataUnitState s;
  s.subjects = unit.subjects;
  s.origins = unit.origins;
  for (const auto& v : unit.values) {
    if (v.at <= t) {
      s.value = v;  // versions are time-ordered; keep the latest at or before t
    } else {
      break;
    }
  }
  s.active_policies = active_policies(unit.policies, t);
  return s;
}

bool is_policy_consistent(const ActionRecord& record, const DataUnitState& state) {
  if (record.regulation_required) return true;
  for (const auto& p : state.active_policies) {
    if (p.purpose == record.purpose && p.entity == record.entity) return true;
  }
  return false;
}

namespace {

template <typename T>
void sorted_union_into(std::vector<T>& dst, const std::vector<T>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
  std::sort(dst.begin(), dst.end());
  dst.erase(std::unique(dst.begin(), dst.end()), dst.end());
}

}  // namespace

Result<DerivedUnit> derive_unit(std::span<const DataUnit> inputs,
                                const std::string& derived_id,
                                const std::string& f_descriptor,
                                bool invertible,
                                std::vector<std::uint8_t> value,
                                Timestamp t,
                                bool subjects_identifiable) {
  if (inputs.empty()) return Status(Code::kEmptyInputs, "derive_unit requires at least one input");
  if (derived_id.empty()) return Status(Code::kInvalidArgument, "derived unit id must be non-empty");

  DerivedUnit out;
  out.unit.id = derived_id;
  out.unit.category = UnitCategory::kDerived;
  for (const auto& in : inputs) {
    if (in.id == derived_id) {
      return Status(Code::kInvalidArgument, "derived id collides with an input id");
    }
    sorted_union_into(out.unit.subjects, in.subjects);
    sorted_union_into(out.unit.origins, in.origins);
  }

  // Keys present in every input's policy set, window lists per input.
  using Key = std::pair<Purpose, EntityId>;
  std::map<Key, std::vector<std::vector<std::pair<Timestamp, Timestamp>>>> windows;
  for (const auto& p : inputs.front().policies) {
    windows[{p.purpose, p.entity}] = {};
  }
  for (const auto& in : inputs) {
    std::map<Key, std::vector<std::pair<Timestamp, Timestamp>>> here;
    for (const auto& p : in.policies) here[{p.purpose, p.entity}].push_back({p.t_b, p.t_f});
    for (auto it = windows.begin(); it != windows.end();) {
      auto found = here.find(it->first);
      if (found == here.end()) {
        it = windows.erase(it);
      } else {
        it->second.push_back(found->second);
        ++it;
      }
    }
  }

  std::set<PolicyTuple> restricted;
  for (const auto& [key, per_input] : windows) {
    // One window per input, all combinations; keep non-empty intersections.
    std::vector<std::pair<Timestamp, Timestamp>> acc = {{0, UINT64_MAX}};
    for (const auto& choices : per_input) {
      std::vector<std::pair<Timestamp, Timestamp>> next;
      for (const auto& [lo, hi] : acc) {
        for (const auto& [b, f] : choices) {
          const Timestamp nlo = std::max(lo, b);
          const Timestamp nhi = std::min(hi, f);
          if (nlo <= nhi) next.push_back({nlo, nhi});
        }
      }
      acc = std::move(next);
      if (acc.empty()) break;
    }
    for (const auto& [lo, hi] : acc) {
      restricted.insert(PolicyTuple{key.first, key.second, lo, hi});
    }
  }
  out.unit.policies.assign(restricted.begin(), restricted.end());
  out.unit.values.push_back(ValueVersion{std::move(value), t});

  out.edge.derived_id = derived_id;
  for (const auto& in : inputs) out.edge.input_ids.push_back(in.id);
  std::sort(out.edge.input_ids.begin(), out.edge.input_ids.end());
  out.edge.input_ids.erase(std::unique(out.edge.input_ids.begin(), out.edge.input_ids.end()),
                           out.edge.input_ids.end());
  out.edge.f_descriptor = f_descriptor;
  out.edge.invertible = invertible;
  out.edge.subjects_identifiable = subjects_identifiable;
  return out;
}

Status ProvenanceGraph::add_edge(ProvenanceEdge edge) {
  if (edge.input_ids.empty()) {
    return Status(Code::kEmptyInputs, "provenance edge requires inputs");
  }
  for (const auto& in : edge.input_ids) {
    if (in == edge.derived_id) {
      return Status(Code::kInvalidArgument, "derived unit cannot be its own input");
    }
  }
  if (edge_for_derived(edge.derived_id) != nullptr) {
    return Status(Code::kInvalidArgument, "derived unit already has a provenance edge");
  }
  // Cycle check: the new edge inputs→derived closes a cycle iff some
  // input is already reachable from the derived unit.
  for (const auto& in : edge.input_ids) {
    if (reaches(edge.derived_id, in)) {
      return Status(Code::kInvalidArgument, "provenance edge would create a cycle");
    }
  }
  edges_.push_back(std::move(edge));
  return Status::ok();
}

std::vector<const ProvenanceEdge*> ProvenanceGraph::edges_from_input(const std::string& unit_id) const {
  std::vector<const ProvenanceEdge*> out;
  for (const auto& e : edges_) {
    if (std::find(e.input_ids.begin(), e.input_ids.end(), unit_id) != e.input_ids.end()) {
      out.push_back(&e);
    }
  }
  return out;
}

const ProvenanceEdge* ProvenanceGraph::edge_for_derived(const std::string& unit_id) const {
  for (const auto& e : edges_) {
    if (e.derived_id == unit_id) return &e;
  }
  return nullptr;
}

bool ProvenanceGraph::reaches(const std::string& from, const std::string& to) const {
  std::deque<std::string> frontier = {from};
  std::set<std::string> seen = {from};
  while (!frontier.empty()) {
    std::string cur = std::move(frontier.front());
    frontier.pop_front();
    if (cur == to) return true;
    for (const auto* e : edges_from_input(cur)) {
      if (seen.insert(e->derived_id).second) frontier.push_back(e->derived_id);
    }
  }
  return false;
}

}  // namespace datacase

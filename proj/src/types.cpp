// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include "datacase/types.hpp"

#include <algorithm>

namespace datacase {

const char* code_name(Code c) {
  switch (c) {
    case Code::kOk: return "Ok";
    case Code::kPolicyDenied: return "PolicyDenied";
    case Code::kInaccessible: return "Inaccessible";
    case Code::kUnknownUnit: return "UnknownUnit";
    case Code::kDuplicateId: return "DuplicateId";
    case Code::kInvalidTransition: return "InvalidTransition";
    case Code::kTimeRegression: return "TimeRegression";
    case Code::kEmptyInputs: return "EmptyInputs";
    case Code::kErasedInput: return "ErasedInput";
    case Code::kUnknownWorkload: return "UnknownWorkload";
    case Code::kDirectoryNotEmpty: return "DirectoryNotEmpty";
    case Code::kUnitLive: return "UnitLive";
    case Code::kInvalidArgument: return "InvalidArgument";
    case Code::kLockHeld: return "LockHeld";
    case Code::kCorruption: return "Corruption";
    case Code::kIoError: return "IoError";
  }
  return "Unknown";
}

const char* entity_kind_name(EntityKind k) {
  switch (k) {
    case EntityKind::kDataSubject: return "data-subject";
    case EntityKind::kController: return "controller";
    case EntityKind::kProcessor: return "processor";
    case EntityKind::kAuditor: return "auditor";
  }
  return "unknown";
}

std::optional<EntityKind> entity_kind_from_name(const std::string& name) {
  if (name == "data-subject") return EntityKind::kDataSubject;
  if (name == "controller") return EntityKind::kController;
  if (name == "processor") return EntityKind::kProcessor;
  if (name == "auditor") return EntityKind::kAuditor;
  return std::nullopt;
}

const char* unit_category_name(UnitCategory c) {
  switch (c) {
    case UnitCategory::kBase: return "base";
    case UnitCategory::kDerived: return "derived";
    case UnitCategory::kMetadata: return "metadata";
  }
  return "unknown";
}

const char* erasure_mode_name(ErasureMode m) {
  switch (m) {
    case ErasureMode::kReversiblyInaccessible: return "reversibly_inaccessible";
    case ErasureMode::kDelete: return "delete";
    case ErasureMode::kStrongDelete: return "strong_delete";
    case ErasureMode::kPermanentDelete: return "permanent_delete";
  }
  return "unknown";
}

std::optional<ErasureMode> erasure_mode_from_name(const std::string& name) {
  if (name == "reversibly_inaccessible") return ErasureMode::kReversiblyInaccessible;
  if (name == "delete") return ErasureMode::kDelete;
  if (name == "strong_delete") return ErasureMode::kStrongDelete;
  if (name == "permanent_delete") return ErasureMode::kPermanentDelete;
  return std::nullopt;
}

const char* erasure_status_name(ErasureStatus s) {
  switch (s) {
    case ErasureStatus::kLive: return "live";
    case ErasureStatus::kReversiblyInaccessible: return "reversibly_inaccessible";
    case ErasureStatus::kDeleted: return "deleted";
    case ErasureStatus::kStrongDeleted: return "strong_deleted";
    case ErasureStatus::kPermanentlyDeleted: return "permanently_deleted";
  }
  return "unknown";
}

std::string ActionKind::to_string() const {
  switch (type) {
    case ActionType::kCreate: return "create";
    case ActionType::kRead: return "read";
    case ActionType::kUpdateValue: return "update-value";
    case ActionType::kUpdateMetadata: return "update-metadata";
    case ActionType::kShare: return "share";
    case ActionType::kContract: return "contract";
    case ActionType::kErase: return std::string("erase:") + erasure_mode_name(erase_mode);
  }
  return "unknown";
}

std::optional<ActionKind> action_kind_from_string(const std::string& s) {
  if (s == "create") return ActionKind{ActionType::kCreate, {}};
  if (s == "read") return ActionKind{ActionType::kRead, {}};
  if (s == "update-value") return ActionKind{ActionType::kUpdateValue, {}};
  if (s == "update-metadata") return ActionKind{ActionType::kUpdateMetadata, {}};
  if (s == "share") return ActionKind{ActionType::kShare, {}};
  if (s == "contract") return ActionKind{ActionType::kContract, {}};
  if (s.rfind("erase:", 0) == 0) {
    auto mode = erasure_mode_from_name(s.substr(6));
    if (!mode) return std::nullopt;
    return ActionKind{ActionType::kErase, *mode};
  }
  return std::nullopt;
}

Status DataUnit::validate() const {
  if (id.empty()) return Status(Code::kInvalidArgument, "unit id must be non-empty");
  if (category == UnitCategory::kBase && subjects.size() != 1) {
    return Status(Code::kInvalidArgument, "base units identify exactly one data-subject");
  }
  for (const auto& s : subjects) {
    if (s.kind != EntityKind::kDataSubject) {
      return Status(Code::kInvalidArgument, "unit subjects must be data-subject entities");
    }
    if (s.id.empty()) return Status(Code::kInvalidArgument, "subject id must be non-empty");
  }
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i].at <= values[i - 1].at) {
      return Status(Code::kInvalidArgument, "value timestamps must be strictly increasing");
    }
  }
  for (const auto& p : policies) {
    if (!p.valid()) return Status(Code::kInvalidArgument, "invalid policy tuple on unit " + id);
  }
  return Status::ok();
}

}  // namespace datacase

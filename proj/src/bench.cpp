// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include "datacase/bench.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "datacase/checker.hpp"
#include "datacase/codec.hpp"
#include "datacase/rng.hpp"
#include "datacase/store.hpp"
#include "file_io.hpp"

namespace datacase::bench {

namespace {

const EntityId kController{EntityKind::kController, "ctrl"};
const Purpose kService{"service"};
constexpr std::uint64_t kCategoryCount = 16;
constexpr std::size_t kValueBytes = 64;
constexpr std::size_t kScanPage = 10;
// Policy windows are sized so any transaction count fits without the
// load phase knowing it.
constexpr std::uint64_t kServiceWindow = 10'000'000;
constexpr std::uint64_t kEraseDeadlineWindow = 9'000'000;

std::string unit_id_for(std::uint64_t idx) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "u%07llu", static_cast<unsigned long long>(idx));
  return buf;
}

std::string created_id_for(std::uint64_t ordinal) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "c%07llu", static_cast<unsigned long long>(ordinal));
  return buf;
}

std::string category_purpose(std::uint64_t k) {
  return "cat" + std::to_string(k % kCategoryCount);
}

struct TimeModel {
  Timestamp t0 = kEpochBase;
  std::uint64_t n_records = 0;

  Timestamp create_time(std::uint64_t i) const { return t0 + i; }
  Timestamp run_time(std::uint64_t i) const { return t0 + n_records + 1 + i; }
  Timestamp service_end() const { return t0 + n_records + kServiceWindow; }
  Timestamp erase_deadline() const { return t0 + n_records + kEraseDeadlineWindow; }
  Timestamp logical_end(std::uint64_t n_txns) const { return t0 + n_records + n_txns + 2; }
};

DataUnit make_base_unit(const std::string& id, std::uint64_t cat, std::uint64_t value_seed,
                        Timestamp value_at, const TimeModel& tm) {
  DataUnit u;
  u.id = id;
  u.category = UnitCategory::kBase;
  u.subjects = {EntityId{EntityKind::kDataSubject, "subj-" + id}};
  u.origins = {"org-0"};
  std::vector<std::uint8_t> v(kValueBytes);
  Rng vr(mix64(value_seed));
  vr.fill(v);
  u.values = {ValueVersion{std::move(v), value_at}};
  u.policies = {
      PolicyTuple{kService, kController, tm.t0, tm.service_end()},
      PolicyTuple{Purpose{kCompliancePurpose}, kController, tm.t0, tm.erase_deadline()},
      PolicyTuple{Purpose{category_purpose(cat)}, kController, tm.t0, tm.service_end()},
  };
  return u;
}

// Append-only side file with a per-unit byte-range index, so rows and
// log lines can be located and scrubbed later.
class IndexedFile {
 public:
  Status open(const std::filesystem::path& path, bool index_by_prefix) {
    index_by_prefix_ = index_by_prefix;
    Status st = file_.open(path, /*create=*/true);
    if (!st.is_ok()) return st;
    if (index_by_prefix_ && file_.size() > 0) {
      std::vector<std::uint8_t> buf(file_.size());
      st = file_.read_at(0, buf);
      if (!st.is_ok()) return st;
      std::uint64_t line_start = 0;
      for (std::uint64_t i = 0; i < buf.size(); ++i) {
        if (buf[i] != '\n') continue;
        std::uint64_t tab = line_start;
        while (tab < i && buf[tab] != '\t') ++tab;
        if (tab < i) {
          std::string id(buf.begin() + line_start, buf.begin() + tab);
          index_[id].push_back({line_start, i - line_start});
        }
        line_start = i + 1;
      }
    }
    return st;
  }

  Status append_line(const std::string& id, const std::string& body) {
    const std::string line = id + "\t" + body + "\n";
    std::uint64_t off = 0;
    Status st = file_.append(std::span<const std::uint8_t>(
                                 reinterpret_cast<const std::uint8_t*>(line.data()), line.size()),
                             &off);
    if (st.is_ok() && index_by_prefix_) index_[id].push_back({off, line.size() - 1});
    return st;
  }

  // Reads the most recent row of the unit (the "join" lookup).
  std::uint64_t join_read(const std::string& id) {
    auto it = index_.find(id);
    if (it == index_.end() || it->second.empty()) return 0;
    const auto [off, len] = it->second.back();
    std::vector<std::uint8_t> row(len);
    if (!file_.read_at(off, row).is_ok()) return 0;
    std::uint64_t fields = 0;
    for (std::uint8_t b : row) fields += (b == ';' || b == '|');
    return fields;
  }

  // Overwrites every recorded byte range of the unit with 'X'.
  std::uint64_t scrub(const std::string& id) {
    auto it = index_.find(id);
    if (it == index_.end()) return 0;
    std::uint64_t n = 0;
    for (const auto& [off, len] : it->second) {
      std::vector<std::uint8_t> fill(len, 'X');
      if (file_.write_at(off, fill).is_ok()) ++n;
    }
    index_.erase(it);
    return n;
  }

  void sync() { file_.sync(); }

 private:
  RandomAccessFile file_;
  bool index_by_prefix_ = false;
  std::map<std::string, std::vector<std::pair<std::uint64_t, std::uint64_t>>> index_;
};

std::string policy_row_text(const std::string& id, const PolicyTuple& p) {
  std::ostringstream os;
  os << "GRANT " << p.purpose.name << " TO " << p.entity.to_string() << " ON " << id
     << " WINDOW [" << p.t_b << "," << p.t_f << "]"
     << " CHECK (subject = owner(" << id << "))"
     << " HINT (index = pm_" << p.purpose.name << ", scan = range)"
     << " ATTRS (origin = org-0, sensitivity = personal, lineage = tracked,"
     << " review = quarterly, residency = local)";
  return os.str();
}

std::string metadata_row_text(const DataUnit& u) {
  std::ostringstream os;
  for (const auto& p : u.policies) {
    os << p.purpose.name << ":" << p.entity.to_string() << ":" << p.t_b << ":" << p.t_f << ";";
  }
  return os.str();
}

struct CachedUnit {
  std::string id;
  std::vector<PolicyTuple> policies;
  bool live = true;
};

class ProfiledStore {
 public:
  static Result<std::unique_ptr<ProfiledStore>> open(const std::filesystem::path& dir,
                                                     const ComplianceProfile& profile,
                                                     std::uint64_t seed, std::uint64_t n_records,
                                                     bool fresh) {
    auto ps = std::make_unique<ProfiledStore>();
    ps->profile_ = profile;
    ps->tm_.n_records = n_records;
    StoreOptions opts;
    opts.encrypt_at_rest = profile.encrypted_at_rest;
    opts.encryption_seed = mix64(seed ^ 0xE4C);
    auto opened = Store::open(dir, opts);
    if (!opened.is_ok()) return opened.status();
    ps->store_ = opened.take();

    const auto& d = ps->store_->dir();
    Status st;
    if (profile.access_control == AccessControlMode::kMetadataJoin) {
      st = ps->meta_tbl_.open(d / "metadata.tbl", true);
      if (!st.is_ok()) return st;
      st = ps->meta_idx_.open(d / "metadata.idx", false);
      if (!st.is_ok()) return st;
    }
    if (profile.access_control == AccessControlMode::kFineGrained) {
      st = ps->policy_tbl_.open(d / "policy_meta.tbl", true);
      if (!st.is_ok()) return st;
      st = ps->policy_idx_.open(d / "policy_meta.idx", false);
      if (!st.is_ok()) return st;
    }
    if (profile.logging == LoggingMode::kRowLevelCsv) {
      st = ps->rowlog_.open(d / "rowlog.csv", false);
      if (!st.is_ok()) return st;
    } else {
      st = ps->querylog_.open(d / "query.log", profile.redact_logs_on_erase);
      if (!st.is_ok()) return st;
    }
    if (profile.logging == LoggingMode::kFullQueryPlusPolicyLog) {
      st = ps->policylog_.open(d / "policy.log", profile.redact_logs_on_erase);
      if (!st.is_ok()) return st;
    }

    if (!fresh) {
      for (const auto& id : ps->store_->unit_ids()) {
        auto snap = ps->store_->unit_snapshot(id);
        auto status = ps->store_->status_of(id);
        if (!snap.is_ok() || !status.is_ok()) continue;
        CachedUnit cu;
        cu.id = id;
        cu.policies = snap.value().policies;
        cu.live = status.value() == ErasureStatus::kLive;
        ps->index_[id] = ps->units_.size();
        ps->units_.push_back(std::move(cu));
      }
    }
    return ps;
  }

  Store& store() { return *store_; }
  void close() { store_.reset(); }

  // The harness's own bookkeeping (cached policies, side files, log
  // indexes) is guarded by mu_ so the optional N-client mode stays safe;
  // the engine has its own synchronization.
  Status load_create(std::uint64_t idx, std::uint64_t seed) {
    std::lock_guard<std::mutex> lk(mu_);
    const std::string id = unit_id_for(idx);
    DataUnit u = make_base_unit(id, idx % kCategoryCount, mix64(seed ^ 0xDA7A ^ idx),
                                tm_.create_time(idx), tm_);
    return create_unit(std::move(u), tm_.create_time(idx), /*log=*/false);
  }

  Status op_create(std::uint64_t ordinal, std::uint64_t aux, Timestamp t) {
    std::lock_guard<std::mutex> lk(mu_);
    const std::string id = created_id_for(ordinal);
    DataUnit u = make_base_unit(id, ordinal % kCategoryCount, aux, t, tm_);
    Status st = create_unit(std::move(u), t, /*log=*/true);
    return st;
  }

  Status op_read(std::uint64_t target, Timestamp t) {
    std::lock_guard<std::mutex> lk(mu_);
    if (target >= units_.size()) return Status(Code::kUnknownUnit, "target out of range");
    CachedUnit& cu = units_[target];
    pre_access(cu, ActionType::kRead, t);
    auto res = store_->get(cu.id, kController, kService, t);
    log_op("read", cu.id, t, res.is_ok() ? res.value() : std::vector<std::uint8_t>{},
           res.is_ok());
    return res.is_ok() ? Status::ok() : res.status();
  }

  Status op_update(std::uint64_t target, std::uint64_t aux, Timestamp t) {
    std::lock_guard<std::mutex> lk(mu_);
    if (target >= units_.size()) return Status(Code::kUnknownUnit, "target out of range");
    CachedUnit& cu = units_[target];
    pre_access(cu, ActionType::kUpdateValue, t);
    std::vector<std::uint8_t> v(kValueBytes);
    Rng vr(mix64(aux ^ 0x06DA7E));
    vr.fill(v);
    auto res = store_->update_value(cu.id, v, kController, kService, t);
    log_op("update", cu.id, t, v, res.is_ok());
    return res.is_ok() ? Status::ok() : res.status();
  }

  Status op_delete(std::uint64_t target, Timestamp t) {
    std::lock_guard<std::mutex> lk(mu_);
    if (target >= units_.size()) return Status(Code::kUnknownUnit, "target out of range");
    CachedUnit& cu = units_[target];
    pre_access(cu, ActionType::kErase, t);
    auto res = store_->erase(cu.id, profile_.erase_mode, kController, t);
    log_op("delete", cu.id, t, {}, res.is_ok());
    if (!res.is_ok()) return res.status();
    for (const auto& erased : res.value().erased_units) {
      auto idx = index_.find(erased);
      if (idx != index_.end()) units_[idx->second].live = false;
      if (profile_.redact_logs_on_erase) {
        querylog_.scrub(erased);
        policylog_.scrub(erased);
        policy_tbl_.scrub(erased);
        meta_tbl_.scrub(erased);
      }
    }
    ++deletes_;
    if (profile_.compaction != CompactionPolicy::kNone &&
        deletes_ % profile_.compaction_interval == 0) {
      auto c = store_->compact(profile_.compaction == CompactionPolicy::kFullPeriodic
                                   ? CompactionLevel::kFull
                                   : CompactionLevel::kIncremental);
      if (!c.is_ok()) return c.status();
    }
    return Status::ok();
  }

  Status op_read_metadata(std::uint64_t aux, Timestamp t) {
    std::lock_guard<std::mutex> lk(mu_);
    const Purpose scan_purpose{category_purpose(aux)};
    std::vector<const CachedUnit*> matched;
    if (profile_.access_control == AccessControlMode::kFineGrained) {
      // FGAC evaluates every attached policy of every scanned unit.
      for (const auto& cu : units_) {
        bool allow = false;
        for (const auto& p : cu.policies) {
          const bool hit = p.purpose == scan_purpose && p.entity == kController &&
                           policy_active(p, t);
          allow = allow || hit;
          ++evals_;
        }
        if (allow && cu.live) matched.push_back(&cu);
      }
      for (const auto* cu : matched) {
        policy_tbl_.join_read(cu->id);
        policylog_.append_line(cu->id, "scan=" + scan_purpose.name + " t=" + std::to_string(t) +
                                           " eval=" + std::to_string(cu->policies.size()) +
                                           " dec=allow");
      }
    } else {
      for (const auto& cu : units_) {
        if (!cu.live) continue;
        for (const auto& p : cu.policies) {
          if (p.purpose == scan_purpose && p.entity == kController && policy_active(p, t)) {
            matched.push_back(&cu);
            break;
          }
        }
      }
      if (profile_.access_control == AccessControlMode::kMetadataJoin) {
        for (const auto* cu : matched) evals_ += meta_tbl_.join_read(cu->id);
      }
    }
    std::uint64_t fetched = 0;
    Status last = Status::ok();
    for (const auto* cu : matched) {
      if (fetched >= kScanPage) break;
      auto res = store_->get(cu->id, kController, kService, t);
      if (!res.is_ok()) {
        last = res.status();
        continue;
      }
      ++fetched;
    }
    log_op("scan", scan_purpose.name, t, {}, true);
    return last;
  }

  Status op_update_metadata(std::uint64_t target, std::uint64_t aux, Timestamp t) {
    std::lock_guard<std::mutex> lk(mu_);
    if (target >= units_.size()) return Status(Code::kUnknownUnit, "target out of range");
    CachedUnit& cu = units_[target];
    pre_access(cu, ActionType::kUpdateMetadata, t);
    Status st;
    const Timestamp new_end = tm_.service_end() + 1 + aux % 1000;
    if (aux & 1) {
      const PolicyTuple p{Purpose{category_purpose(aux >> 1)}, kController, tm_.t0, new_end};
      auto res = store_->add_policy(cu.id, p, kController, kService, t);
      st = res.is_ok() ? Status::ok() : res.status();
      if (res.is_ok()) cu.policies.push_back(p);
    } else {
      const Purpose cat{category_purpose(target)};
      auto res = store_->update_policy_window(cu.id, cat, kController, tm_.t0, new_end,
                                              kController, kService, t);
      st = res.is_ok() ? Status::ok() : res.status();
      if (res.is_ok()) {
        for (auto& p : cu.policies) {
          if (p.purpose == cat && p.entity == kController) {
            p.t_b = tm_.t0;
            p.t_f = new_end;
          }
        }
      }
    }
    if (st.is_ok()) sync_metadata_rows(cu, t);
    log_op("update-meta", cu.id, t, {}, st.is_ok());
    return st;
  }

  const TimeModel& time_model() const { return tm_; }

 private:
  Status create_unit(DataUnit u, Timestamp t, bool log) {
    CachedUnit cu;
    cu.id = u.id;
    cu.policies = u.policies;
    const DataUnit for_rows = u;
    auto res = store_->put(std::move(u), kController, kService, t);
    if (!res.is_ok()) return res.status();
    index_[cu.id] = units_.size();
    units_.push_back(cu);
    sync_metadata_rows(units_.back(), t, &for_rows);
    if (log) log_op("create", cu.id, t, {}, true);
    return Status::ok();
  }

  // Keeps the profile's separate metadata/policy tables in step with the
  // unit's policy set (the join/FGAC side of the two-lookup path).
  void sync_metadata_rows(const CachedUnit& cu, Timestamp t, const DataUnit* unit = nullptr) {
    if (profile_.access_control == AccessControlMode::kMetadataJoin) {
      DataUnit tmp;
      if (!unit) {
        tmp.id = cu.id;
        tmp.policies = cu.policies;
        unit = &tmp;
      }
      const std::string row = metadata_row_text(*unit);
      meta_tbl_.append_line(cu.id, row);
      meta_idx_.append_line(cu.id, "len=" + std::to_string(row.size()) +
                                       " t=" + std::to_string(t) + " key=pm_" + cu.id);
    }
    if (profile_.access_control == AccessControlMode::kFineGrained) {
      for (const auto& p : cu.policies) {
        policy_tbl_.append_line(cu.id, policy_row_text(cu.id, p));
        policy_idx_.append_line(cu.id, "pol=" + p.purpose.name + " t=" + std::to_string(t) +
                                           " key=pm_" + p.purpose.name + "_" + cu.id);
      }
    }
  }

  // The per-access work that differs between the compliance profiles.
  void pre_access(const CachedUnit& cu, ActionType action, Timestamp t) {
    if (profile_.access_control == AccessControlMode::kMetadataJoin) {
      evals_ += meta_tbl_.join_read(cu.id);
    } else if (profile_.access_control == AccessControlMode::kFineGrained) {
      evals_ += policy_tbl_.join_read(cu.id);
      for (const auto& p : cu.policies) {
        const bool hit =
            p.entity == kController && policy_active(p, t) &&
            (p.purpose == kService || p.purpose.is_compliance_erase());
        ++evals_;
        if (profile_.logging == LoggingMode::kFullQueryPlusPolicyLog) {
          policylog_.append_line(cu.id, "pol=" + p.purpose.name + " act=" +
                                            ActionKind{action, {}}.to_string() +
                                            " t=" + std::to_string(t) +
                                            " dec=" + (hit ? "allow" : "skip"));
        }
      }
    }
  }

  void log_op(const char* op, const std::string& key, Timestamp t,
              const std::vector<std::uint8_t>& response, bool ok) {
    if (profile_.logging == LoggingMode::kRowLevelCsv) {
      std::ostringstream os;
      os << t << "," << op << "," << key << "," << kController.to_string() << ","
         << kService.name << "," << (ok ? 1 : 0) << "\n";
      const std::string line = os.str();
      rowlog_.append_line(key, line.substr(0, line.size() - 1));
      return;
    }
    nlohmann::json j;
    j["t"] = t;
    j["op"] = op;
    j["key"] = key;
    j["entity"] = kController.to_string();
    j["purpose"] = kService.name;
    j["ok"] = ok;
    j["resp"] = hex_encode(response);
    querylog_.append_line(key, j.dump());
  }

  ComplianceProfile profile_;
  TimeModel tm_;
  std::unique_ptr<Store> store_;
  std::vector<CachedUnit> units_;
  std::map<std::string, std::size_t> index_;
  IndexedFile meta_tbl_, meta_idx_, policy_tbl_, policy_idx_;
  IndexedFile rowlog_, querylog_, policylog_;
  std::uint64_t deletes_ = 0;
  std::uint64_t evals_ = 0;
  std::mutex mu_;
};

}  // namespace

const char* op_class_name(OpClass c) {
  switch (c) {
    case OpClass::kCreateData: return "create-data";
    case OpClass::kReadData: return "read-data";
    case OpClass::kUpdateData: return "update-data";
    case OpClass::kDeleteData: return "delete-data";
    case OpClass::kReadMetadata: return "read-metadata";
    case OpClass::kUpdateMetadata: return "update-metadata";
  }
  return "unknown";
}

Result<WorkloadSpec> builtin_workload(const std::string& name, std::uint64_t n_records,
                                      std::uint64_t n_txns, std::uint64_t seed) {
  WorkloadSpec spec;
  spec.name = name;
  spec.n_records = n_records;
  spec.n_txns = n_txns;
  spec.seed = seed;
  if (name == "wcon") {
    spec.mix = {{OpClass::kCreateData, 25}, {OpClass::kDeleteData, 25},
                {OpClass::kUpdateMetadata, 50}};
  } else if (name == "wpro") {
    spec.mix = {{OpClass::kReadData, 80}, {OpClass::kReadMetadata, 20}};
  } else if (name == "wcus") {
    spec.mix = {{OpClass::kReadData, 20}, {OpClass::kUpdateData, 20},
                {OpClass::kDeleteData, 20}, {OpClass::kReadMetadata, 20},
                {OpClass::kUpdateMetadata, 20}};
  } else if (name == "ycsb-c") {
    spec.mix = {{OpClass::kReadData, 100}};
  } else {
    return Status(Code::kUnknownWorkload, "unknown workload: " + name);
  }
  return spec;
}

std::vector<std::uint64_t> class_counts(const WorkloadSpec& spec) {
  const std::uint64_t n = spec.n_txns;
  std::vector<std::uint64_t> counts(spec.mix.size(), 0);
  std::vector<std::pair<std::uint64_t, std::size_t>> remainders;  // (remainder, index)
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < spec.mix.size(); ++i) {
    const std::uint64_t exact = n * static_cast<std::uint64_t>(spec.mix[i].second);
    counts[i] = exact / 100;
    assigned += counts[i];
    remainders.push_back({exact % 100, i});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::uint64_t left = n - assigned, i = 0; i < left; ++i) {
    ++counts[remainders[i % remainders.size()].second];
  }
  return counts;
}

std::vector<Op> generate_ops(const WorkloadSpec& spec) {
  const auto counts = class_counts(spec);
  std::vector<OpClass> labels;
  labels.reserve(spec.n_txns);
  for (std::size_t i = 0; i < spec.mix.size(); ++i) {
    labels.insert(labels.end(), counts[i], spec.mix[i].first);
  }
  Rng rng(mix64(spec.seed ^ 0x0950EED));
  for (std::size_t i = labels.size(); i > 1; --i) {
    std::swap(labels[i - 1], labels[rng.below(i)]);
  }
  std::vector<Op> ops;
  ops.reserve(labels.size());
  std::uint64_t create_ordinal = 0;
  for (OpClass cls : labels) {
    Op op;
    op.cls = cls;
    op.target = cls == OpClass::kCreateData ? create_ordinal++ : rng.below(spec.n_records);
    op.aux = rng.next();
    ops.push_back(op);
  }
  return ops;
}

std::vector<std::uint8_t> serialize_ops(const std::vector<Op>& ops) {
  ByteWriter w;
  w.u64(ops.size());
  for (const Op& op : ops) {
    w.u8(static_cast<std::uint8_t>(op.cls));
    w.u64(op.target);
    w.u64(op.aux);
  }
  return w.take();
}

std::vector<ComplianceProfile> builtin_profiles() {
  ComplianceProfile base;
  base.name = "P_Base";
  base.access_control = AccessControlMode::kRoleBased;
  base.logging = LoggingMode::kRowLevelCsv;
  base.encrypted_at_rest = true;
  base.erase_mode = ErasureMode::kDelete;
  base.compaction = CompactionPolicy::kIncrementalPeriodic;
  base.compaction_interval = 128;
  base.redact_logs_on_erase = false;

  ComplianceProfile gbench;
  gbench.name = "P_GBench";
  gbench.access_control = AccessControlMode::kMetadataJoin;
  gbench.logging = LoggingMode::kFullQuery;
  gbench.encrypted_at_rest = true;
  gbench.erase_mode = ErasureMode::kDelete;
  gbench.compaction = CompactionPolicy::kNone;
  gbench.redact_logs_on_erase = false;

  ComplianceProfile sys;
  sys.name = "P_SYS";
  sys.access_control = AccessControlMode::kFineGrained;
  sys.logging = LoggingMode::kFullQueryPlusPolicyLog;
  sys.encrypted_at_rest = true;
  sys.erase_mode = ErasureMode::kStrongDelete;
  sys.compaction = CompactionPolicy::kFullPeriodic;
  sys.compaction_interval = 256;
  sys.redact_logs_on_erase = true;

  return {base, gbench, sys};
}

Result<ComplianceProfile> profile_by_name(const std::string& name) {
  for (auto& p : builtin_profiles()) {
    if (p.name == name) return p;
  }
  return Status(Code::kInvalidArgument, "unknown profile: " + name);
}

Result<std::uint64_t> load_phase(const std::filesystem::path& dir,
                                 const ComplianceProfile& profile, std::uint64_t n_records,
                                 std::uint64_t seed) {
  if (std::filesystem::exists(dir) && !std::filesystem::is_empty(dir)) {
    return Status(Code::kDirectoryNotEmpty, "load_phase needs a fresh directory: " + dir.string());
  }
  auto ps = ProfiledStore::open(dir, profile, seed, n_records, /*fresh=*/true);
  if (!ps.is_ok()) return ps.status();
  for (std::uint64_t i = 0; i < n_records; ++i) {
    Status st = ps.value()->load_create(i, seed);
    if (!st.is_ok()) return st;
  }
  ps.value()->close();
  ps.value().reset();
  return store_digest(dir);
}

namespace {

struct WorkerState {
  std::map<std::string, LatencyHistogram> latency;
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t errors = 0;
};

Status execute_op(ProfiledStore& ps, const Op& op, Timestamp t, WorkerState& ws) {
  const auto start = std::chrono::steady_clock::now();
  Status st;
  switch (op.cls) {
    case OpClass::kCreateData: st = ps.op_create(op.target, op.aux, t); break;
    case OpClass::kReadData: st = ps.op_read(op.target, t); break;
    case OpClass::kUpdateData: st = ps.op_update(op.target, op.aux, t); break;
    case OpClass::kDeleteData: st = ps.op_delete(op.target, t); break;
    case OpClass::kReadMetadata: st = ps.op_read_metadata(op.aux, t); break;
    case OpClass::kUpdateMetadata: st = ps.op_update_metadata(op.target, op.aux, t); break;
  }
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  const char* name = op_class_name(op.cls);
  ws.latency[name].add(static_cast<std::uint64_t>(ns));
  ++ws.counts[name];
  if (!st.is_ok()) ++ws.errors;
  return st;
}

}  // namespace

Result<RunMetrics> run_workload(const std::filesystem::path& dir,
                                const ComplianceProfile& profile, const WorkloadSpec& spec,
                                unsigned clients) {
  auto opened = ProfiledStore::open(dir, profile, spec.seed, spec.n_records, /*fresh=*/false);
  if (!opened.is_ok()) return opened.status();
  ProfiledStore& ps = *opened.value();
  const auto ops = generate_ops(spec);
  const TimeModel& tm = ps.time_model();

  RunMetrics m;
  m.profile = profile.name;
  m.workload = spec.name;
  m.n_records = spec.n_records;
  m.n_txns = spec.n_txns;
  m.seed = spec.seed;
  m.clients = clients == 0 ? 1 : clients;

  const auto wall_start = std::chrono::steady_clock::now();
  if (m.clients <= 1) {
    WorkerState ws;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      execute_op(ps, ops[i], tm.run_time(i), ws);
    }
    m.latency_ns = std::move(ws.latency);
    m.op_counts = std::move(ws.counts);
    m.errors = ws.errors;
  } else {
    // Keyspace partition: each unit has a single writer. Times come from
    // a shared counter; a regression (slow thread, stale time) retries
    // with a fresh one.
    std::atomic<std::uint64_t> clock{0};
    std::vector<WorkerState> states(m.clients);
    std::vector<std::thread> threads;
    for (unsigned c = 0; c < m.clients; ++c) {
      threads.emplace_back([&, c] {
        for (const Op& op : ops) {
          if (op.target % m.clients != c) continue;
          for (int attempt = 0; attempt < 8; ++attempt) {
            const Timestamp t = tm.run_time(clock.fetch_add(1));
            Status st = execute_op(ps, op, t, states[c]);
            if (st.code() != Code::kTimeRegression || attempt == 7) break;
            --states[c].errors;  // the regression attempt retries with a fresh time
            --states[c].counts[op_class_name(op.cls)];
          }
        }
      });
    }
    for (auto& th : threads) th.join();
    for (auto& ws : states) {
      for (auto& [k, h] : ws.latency) {
        auto& dst = m.latency_ns[k];
        dst.count += h.count;
        for (std::size_t i = 0; i < h.buckets.size(); ++i) dst.buckets[i] += h.buckets[i];
      }
      for (auto& [k, v] : ws.counts) m.op_counts[k] += v;
      m.errors += ws.errors;
    }
  }
  m.completion_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                       wall_start)
                             .count();

  m.logical_end = tm.logical_end(spec.n_txns);
  Store& store = ps.store();
  const auto violations = run_all_checks(store, m.logical_end);
  for (const auto& v : violations) {
    if (v.kind == ViolationKind::kG6InconsistentAction) ++m.g6_violations;
    if (v.kind == ViolationKind::kG17MissingPolicy || v.kind == ViolationKind::kG17LateErase ||
        v.kind == ViolationKind::kG17MissingErase) {
      ++m.g17_violations;
    }
  }
  m.violations_total = violations.size();
  std::ostringstream report;
  write_report_ndjson(report, violations);
  m.audit_report = report.str();

  m.store_bytes = store.store_dir_bytes();
  m.personal_bytes = store.live_personal_bytes();
  m.space_factor = m.personal_bytes == 0
                       ? 1.0
                       : static_cast<double>(m.store_bytes) / static_cast<double>(m.personal_bytes);
  ps.close();
  opened.value().reset();
  m.store_digest = store_digest(dir);
  return m;
}

double space_factor_of_dir(const std::filesystem::path& dir) {
  auto opened = Store::open(dir);
  if (!opened.is_ok()) return 1.0;
  const std::uint64_t personal = opened.value()->live_personal_bytes();
  const std::uint64_t total = opened.value()->store_dir_bytes();
  if (personal == 0) return 1.0;
  return static_cast<double>(total) / static_cast<double>(personal);
}

std::uint64_t store_digest(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& ent : std::filesystem::recursive_directory_iterator(dir)) {
    if (ent.is_regular_file() && ent.path().filename() != ".lock") {
      files.push_back(ent.path());
    }
  }
  std::sort(files.begin(), files.end(), [&](const auto& a, const auto& b) {
    return a.lexically_relative(dir) < b.lexically_relative(dir);
  });
  std::uint64_t h = 0xDA7ACA5EULL;
  for (const auto& f : files) {
    const std::string rel = f.lexically_relative(dir).string();
    for (char c : rel) h = mix64(h ^ static_cast<std::uint8_t>(c));
    RandomAccessFile raf;
    if (!raf.open(f, false).is_ok()) continue;
    std::vector<std::uint8_t> buf(raf.size());
    if (!raf.read_at(0, buf).is_ok()) continue;
    const StateDigest d = digest_of(buf);
    for (std::uint8_t b : d) h = mix64(h ^ b);
  }
  return h;
}

std::string metrics_to_json(const RunMetrics& m) {
  nlohmann::json j;
  j["profile"] = m.profile;
  j["workload"] = m.workload;
  j["n_records"] = m.n_records;
  j["n_txns"] = m.n_txns;
  j["seed"] = m.seed;
  j["clients"] = m.clients;
  j["op_counts"] = m.op_counts;
  j["errors"] = m.errors;
  j["space_factor"] = m.space_factor;
  j["store_bytes"] = m.store_bytes;
  j["personal_bytes"] = m.personal_bytes;
  j["g6_violations"] = m.g6_violations;
  j["g17_violations"] = m.g17_violations;
  j["violations_total"] = m.violations_total;
  j["audit_report"] = m.audit_report;
  char digest[20];
  std::snprintf(digest, sizeof(digest), "%016llx", static_cast<unsigned long long>(m.store_digest));
  j["store_digest"] = digest;
  j["logical_end"] = m.logical_end;
  nlohmann::json wall;
  wall["completion_seconds"] = m.completion_seconds;
  nlohmann::json lat;
  for (const auto& [k, h] : m.latency_ns) {
    nlohmann::json hb;
    hb["count"] = h.count;
    hb["buckets"] = h.buckets;
    lat[k] = hb;
  }
  wall["latency_ns"] = lat;
  j["wall"] = wall;
  return j.dump(2) + "\n";
}

Result<RunMetrics> metrics_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return Status(Code::kInvalidArgument, "metrics document is not valid JSON");
  }
  RunMetrics m;
  m.profile = j.value("profile", "");
  m.workload = j.value("workload", "");
  m.n_records = j.value("n_records", std::uint64_t{0});
  m.n_txns = j.value("n_txns", std::uint64_t{0});
  m.seed = j.value("seed", std::uint64_t{0});
  m.clients = j.value("clients", std::uint64_t{1});
  m.errors = j.value("errors", std::uint64_t{0});
  m.space_factor = j.value("space_factor", 1.0);
  m.store_bytes = j.value("store_bytes", std::uint64_t{0});
  m.personal_bytes = j.value("personal_bytes", std::uint64_t{0});
  m.g6_violations = j.value("g6_violations", std::uint64_t{0});
  m.g17_violations = j.value("g17_violations", std::uint64_t{0});
  m.violations_total = j.value("violations_total", std::uint64_t{0});
  m.audit_report = j.value("audit_report", "");
  m.logical_end = j.value("logical_end", std::uint64_t{0});
  if (j.contains("op_counts")) {
    for (auto it = j["op_counts"].begin(); it != j["op_counts"].end(); ++it) {
      m.op_counts[it.key()] = it.value().get<std::uint64_t>();
    }
  }
  if (j.contains("wall")) {
    m.completion_seconds = j["wall"].value("completion_seconds", 0.0);
  }
  if (j.contains("store_digest")) {
    m.store_digest = std::strtoull(j["store_digest"].get<std::string>().c_str(), nullptr, 16);
  }
  return m;
}

namespace {

void sort_metrics(std::vector<RunMetrics>& metrics) {
  std::sort(metrics.begin(), metrics.end(), [](const RunMetrics& a, const RunMetrics& b) {
    if (a.profile != b.profile) return a.profile < b.profile;
    if (a.workload != b.workload) return a.workload < b.workload;
    if (a.n_records != b.n_records) return a.n_records < b.n_records;
    return a.seed < b.seed;
  });
}

}  // namespace

std::string render_report_table(std::vector<RunMetrics> metrics) {
  sort_metrics(metrics);
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %-8s %10s %8s %12s %8s %8s %6s\n", "profile",
                "workload", "records", "txns", "time_s", "space", "errors", "viol");
  os << line;
  for (const auto& m : metrics) {
    std::snprintf(line, sizeof(line), "%-10s %-8s %10llu %8llu %12.3f %8.2f %8llu %6llu\n",
                  m.profile.c_str(), m.workload.c_str(),
                  static_cast<unsigned long long>(m.n_records),
                  static_cast<unsigned long long>(m.n_txns), m.completion_seconds, m.space_factor,
                  static_cast<unsigned long long>(m.errors),
                  static_cast<unsigned long long>(m.violations_total));
    os << line;
  }
  return os.str();
}

std::string render_report_json(std::vector<RunMetrics> metrics) {
  sort_metrics(metrics);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : metrics) {
    arr.push_back(nlohmann::json::parse(metrics_to_json(m)));
  }
  nlohmann::json j;
  j["results"] = arr;
  return j.dump(2) + "\n";
}

}  // namespace datacase::bench

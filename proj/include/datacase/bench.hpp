// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "datacase/status.hpp"
#include "datacase/types.hpp"

namespace datacase::bench {

// Logical clock base for generated workloads (2023-11-14T22:13:20Z).
inline constexpr Timestamp kEpochBase = 1'700'000'000;

enum class OpClass : std::uint8_t {
  kCreateData = 0,
  kReadData = 1,
  kUpdateData = 2,
  kDeleteData = 3,
  kReadMetadata = 4,
  kUpdateMetadata = 5,
};

const char* op_class_name(OpClass c);

struct WorkloadSpec {
  std::string name;
  std::vector<std::pair<OpClass, int>> mix;  // percentages, sum 100
  std::uint64_t n_records = 0;
  std::uint64_t n_txns = 0;
  std::uint64_t seed = 0;
};

struct Op {
  OpClass cls = OpClass::kReadData;
  std::uint64_t target = 0;  // unit index for existing units, ordinal for creates
  std::uint64_t aux = 0;     // value seed / scan key / policy window delta
};

// Built-in mixes: wcon (25 create / 25 delete / 50 update-metadata),
// wpro (80 key-read / 20 metadata-read), wcus (20 each of read, update,
// delete, metadata-read, metadata-update), ycsb-c (100 read).
Result<WorkloadSpec> builtin_workload(const std::string& name, std::uint64_t n_records,
                                      std::uint64_t n_txns, std::uint64_t seed);

// Exact op-class counts under largest-remainder rounding, mix order
// breaking ties.
std::vector<std::uint64_t> class_counts(const WorkloadSpec& spec);

// The op stream is a pure function of (spec, seed): counts are exact and
// the interleaving and targets come from the seeded generator.
std::vector<Op> generate_ops(const WorkloadSpec& spec);

std::vector<std::uint8_t> serialize_ops(const std::vector<Op>& ops);

enum class AccessControlMode : std::uint8_t {
  kRoleBased = 0,      // first-match policy check
  kMetadataJoin = 1,   // policies in a separate table; every access joins
  kFineGrained = 2,    // every attached policy evaluated, decisions logged
};

enum class LoggingMode : std::uint8_t {
  kRowLevelCsv = 0,
  kFullQuery = 1,
  kFullQueryPlusPolicyLog = 2,
};

enum class CompactionPolicy : std::uint8_t {
  kNone = 0,
  kIncrementalPeriodic = 1,
  kFullPeriodic = 2,
};

struct ComplianceProfile {
  std::string name;
  AccessControlMode access_control = AccessControlMode::kRoleBased;
  LoggingMode logging = LoggingMode::kRowLevelCsv;
  bool encrypted_at_rest = true;
  ErasureMode erase_mode = ErasureMode::kDelete;
  CompactionPolicy compaction = CompactionPolicy::kNone;
  std::uint64_t compaction_interval = 128;  // deletes between compactions
  bool redact_logs_on_erase = false;
};

// P_Base, P_GBench, P_SYS.
std::vector<ComplianceProfile> builtin_profiles();
Result<ComplianceProfile> profile_by_name(const std::string& name);

struct LatencyHistogram {
  std::array<std::uint64_t, 40> buckets{};  // log2(ns) buckets
  std::uint64_t count = 0;
  void add(std::uint64_t ns) {
    ++count;
    unsigned b = 0;
    while (ns > 1 && b + 1 < buckets.size()) {
      ns >>= 1;
      ++b;
    }
    ++buckets[b];
  }
};

struct RunMetrics {
  std::string profile;
  std::string workload;
  std::uint64_t n_records = 0;
  std::uint64_t n_txns = 0;
  std::uint64_t seed = 0;
  std::uint64_t clients = 1;

  double completion_seconds = 0;  // wall clock
  std::map<std::string, LatencyHistogram> latency_ns;
  std::map<std::string, std::uint64_t> op_counts;
  std::uint64_t errors = 0;

  double space_factor = 1.0;
  std::uint64_t store_bytes = 0;
  std::uint64_t personal_bytes = 0;

  std::uint64_t g6_violations = 0;
  std::uint64_t g17_violations = 0;
  std::uint64_t violations_total = 0;
  std::string audit_report;  // NDJSON, deterministic

  std::uint64_t store_digest = 0;
  Timestamp logical_end = 0;
};

// Populates a fresh directory with n_records base units (service policy,
// compliance-erase policy, one category policy, 64-byte value with a
// seeded 16-byte marker) plus the profile's metadata side files. Fails
// with kDirectoryNotEmpty when the directory already has content.
// Returns the store content digest.
Result<std::uint64_t> load_phase(const std::filesystem::path& dir,
                                 const ComplianceProfile& profile, std::uint64_t n_records,
                                 std::uint64_t seed);

// Executes the op stream against a loaded store under the profile's
// enforcement, logging, erasure and compaction settings, then audits.
// clients > 1 partitions targets round-robin; determinism holds only for
// the single-client default.
Result<RunMetrics> run_workload(const std::filesystem::path& dir,
                                const ComplianceProfile& profile, const WorkloadSpec& spec,
                                unsigned clients = 1);

// (segments + indices + ledgers + escrow + manifest) / live personal
// value bytes; 1.0 when no personal data exists.
double space_factor_of_dir(const std::filesystem::path& dir);

// Digest over every regular file (sorted relative paths + contents).
std::uint64_t store_digest(const std::filesystem::path& dir);

std::string metrics_to_json(const RunMetrics& m);
Result<RunMetrics> metrics_from_json(const std::string& text);

// Deterministic report: rows sorted by (profile, workload, n_records).
std::string render_report_table(std::vector<RunMetrics> metrics);
std::string render_report_json(std::vector<RunMetrics> metrics);

}  // namespace datacase::bench

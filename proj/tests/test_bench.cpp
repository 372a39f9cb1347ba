// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "datacase/bench.hpp"
#include "datacase/checker.hpp"
#include "datacase/rng.hpp"
#include "datacase/store.hpp"
#include "test_util.hpp"

using namespace datacase;
using namespace datacase::bench;
using testutil::TempDir;

namespace {

std::vector<std::uint64_t> counts_for(const std::string& name, std::uint64_t n) {
  auto spec = builtin_workload(name, 1000, n, 1);
  REQUIRE(spec.is_ok());
  return class_counts(spec.value());
}

}  // namespace

TEST_CASE("built-in mixes produce the documented counts") {
  CHECK(counts_for("wcus", 1000) == std::vector<std::uint64_t>{200, 200, 200, 200, 200});
  CHECK(counts_for("wpro", 1000) == std::vector<std::uint64_t>{800, 200});
  CHECK(counts_for("ycsb-c", 1000) == std::vector<std::uint64_t>{1000});
  CHECK(counts_for("wcon", 1000) == std::vector<std::uint64_t>{250, 250, 500});
  // Largest remainder at a non-divisible size: 25% of 7 = 1.75 (rem .75),
  // 50% of 7 = 3.5 (rem .50); the two create/delete slots win the ties.
  CHECK(counts_for("wcon", 7) == std::vector<std::uint64_t>{2, 2, 3});
  CHECK(counts_for("wcus", 7) == std::vector<std::uint64_t>{2, 2, 1, 1, 1});
  CHECK(counts_for("wcus", 1) == std::vector<std::uint64_t>{1, 0, 0, 0, 0});
  CHECK(counts_for("ycsb-c", 1) == std::vector<std::uint64_t>{1});

  CHECK_FALSE(builtin_workload("nope", 10, 10, 1).is_ok());
  CHECK(builtin_workload("nope", 10, 10, 1).status().code() == Code::kUnknownWorkload);
}

TEST_CASE("mix exactness holds for every txn count") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t n = 1 + rng.below(5000);
    for (const char* name : {"wcon", "wpro", "wcus", "ycsb-c"}) {
      auto spec = builtin_workload(name, 100, n, trial);
      REQUIRE(spec.is_ok());
      const auto counts = class_counts(spec.value());
      std::uint64_t total = 0;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        total += counts[i];
        const std::uint64_t pct = spec.value().mix[i].second;
        CHECK(counts[i] >= n * pct / 100);        // floor
        CHECK(counts[i] <= n * pct / 100 + 1);    // ceil
      }
      CHECK(total == n);
      // The generated stream realizes exactly these counts.
      const auto ops = generate_ops(spec.value());
      CHECK(ops.size() == n);
      std::vector<std::uint64_t> seen(counts.size(), 0);
      for (const auto& op : ops) {
        for (std::size_t i = 0; i < spec.value().mix.size(); ++i) {
          if (spec.value().mix[i].first == op.cls) ++seen[i];
        }
      }
      CHECK(seen == counts);
    }
  }
}

TEST_CASE("op streams are a pure function of spec and seed") {
  auto spec = builtin_workload("wcus", 500, 300, 42);
  REQUIRE(spec.is_ok());
  const auto a = serialize_ops(generate_ops(spec.value()));
  const auto b = serialize_ops(generate_ops(spec.value()));
  CHECK(a == b);  // byte-identical

  auto other_seed = builtin_workload("wcus", 500, 300, 43);
  CHECK(serialize_ops(generate_ops(other_seed.value())) != a);

  // Targets for existing units stay inside the keyspace.
  for (const auto& op : generate_ops(spec.value())) {
    if (op.cls != OpClass::kCreateData) CHECK(op.target < 500);
  }
}

TEST_CASE("profiles mirror the three grounding bundles") {
  const auto profiles = builtin_profiles();
  REQUIRE(profiles.size() == 3);
  CHECK(profiles[0].name == "P_Base");
  CHECK(profiles[0].access_control == AccessControlMode::kRoleBased);
  CHECK(profiles[0].logging == LoggingMode::kRowLevelCsv);
  CHECK(profiles[0].erase_mode == ErasureMode::kDelete);
  CHECK(profiles[0].compaction == CompactionPolicy::kIncrementalPeriodic);
  CHECK_FALSE(profiles[0].redact_logs_on_erase);
  CHECK(profiles[0].encrypted_at_rest);

  CHECK(profiles[1].name == "P_GBench");
  CHECK(profiles[1].access_control == AccessControlMode::kMetadataJoin);
  CHECK(profiles[1].logging == LoggingMode::kFullQuery);
  CHECK(profiles[1].erase_mode == ErasureMode::kDelete);
  CHECK(profiles[1].compaction == CompactionPolicy::kNone);

  CHECK(profiles[2].name == "P_SYS");
  CHECK(profiles[2].access_control == AccessControlMode::kFineGrained);
  CHECK(profiles[2].logging == LoggingMode::kFullQueryPlusPolicyLog);
  CHECK(profiles[2].erase_mode == ErasureMode::kStrongDelete);
  CHECK(profiles[2].compaction == CompactionPolicy::kFullPeriodic);
  CHECK(profiles[2].redact_logs_on_erase);

  CHECK(profile_by_name("P_SYS").is_ok());
  CHECK_FALSE(profile_by_name("P_NOPE").is_ok());
}

TEST_CASE("load_phase populates a clean auditable store") {
  TempDir td;
  const auto profile = profile_by_name("P_Base").value();
  auto digest = load_phase(td.sub("s"), profile, 300, 7);
  REQUIRE(digest.is_ok());

  auto opened = Store::open(td.sub("s"));
  REQUIRE(opened.is_ok());
  Store& store = *opened.value();
  CHECK(store.unit_ids().size() == 300);
  CHECK(store.ledger().size() == 300);  // one create per record
  const Timestamp now = kEpochBase + 301;
  CHECK(check_g6(store, now).empty());
  CHECK(check_g17(store, now).empty());
  for (const auto& id : store.unit_ids()) {
    CHECK(store.status_of(id).value() == ErasureStatus::kLive);
  }
}

TEST_CASE("load_phase rejects a dirty directory") {
  TempDir td;
  const auto profile = profile_by_name("P_Base").value();
  REQUIRE(load_phase(td.sub("s"), profile, 10, 7).is_ok());
  auto second = load_phase(td.sub("s"), profile, 10, 7);
  CHECK_FALSE(second.is_ok());
  CHECK(second.status().code() == Code::kDirectoryNotEmpty);
}

TEST_CASE("identical seeds load byte-identical stores") {
  TempDir td;
  const auto profile = profile_by_name("P_SYS").value();
  auto a = load_phase(td.sub("a"), profile, 120, 11);
  auto b = load_phase(td.sub("b"), profile, 120, 11);
  auto c = load_phase(td.sub("c"), profile, 120, 12);
  REQUIRE(a.is_ok());
  REQUIRE(b.is_ok());
  REQUIRE(c.is_ok());
  CHECK(a.value() == b.value());
  CHECK(a.value() != c.value());

  // Empty store: the ratio degenerates to 1.
  auto empty = load_phase(td.sub("e"), profile, 0, 1);
  REQUIRE(empty.is_ok());
  CHECK(space_factor_of_dir(td.sub("e")) == 1.0);
}

TEST_CASE("run executes the stream and stays audit-clean") {
  TempDir td;
  for (const auto& profile : builtin_profiles()) {
    const auto dir = td.sub(profile.name);
    REQUIRE(load_phase(dir, profile, 400, 5).is_ok());
    auto spec = builtin_workload("wcus", 400, 150, 5);
    REQUIRE(spec.is_ok());
    auto metrics = run_workload(dir, profile, spec.value());
    REQUIRE(metrics.is_ok());
    const RunMetrics& m = metrics.value();
    CHECK(m.g6_violations == 0);
    CHECK(m.g17_violations == 0);
    CHECK(m.violations_total == 0);
    CHECK(m.completion_seconds > 0);
    CHECK(m.space_factor > 1.0);
    std::uint64_t total_ops = 0;
    for (const auto& [k, v] : m.op_counts) total_ops += v;
    CHECK(total_ops == 150);
    // Deletes that hit an already-erased target surface as errors, never
    // as violations.
    CHECK(m.errors <= 150);
  }
}

TEST_CASE("zero-txn run produces empty histograms and near-zero time") {
  TempDir td;
  const auto profile = profile_by_name("P_Base").value();
  REQUIRE(load_phase(td.sub("s"), profile, 50, 3).is_ok());
  auto spec = builtin_workload("wcus", 50, 0, 3);
  auto metrics = run_workload(td.sub("s"), profile, spec.value());
  REQUIRE(metrics.is_ok());
  CHECK(metrics.value().latency_ns.empty());
  CHECK(metrics.value().op_counts.empty());
  CHECK(metrics.value().errors == 0);
  CHECK(metrics.value().completion_seconds < 0.5);
}

TEST_CASE("identical runs differ only in wall-clock fields") {
  TempDir td;
  const auto profile = profile_by_name("P_GBench").value();
  auto spec = builtin_workload("wcon", 200, 120, 9);
  REQUIRE(spec.is_ok());

  nlohmann::json docs[2];
  for (int i = 0; i < 2; ++i) {
    const auto dir = td.sub("run" + std::to_string(i));
    REQUIRE(load_phase(dir, profile, 200, 9).is_ok());
    auto metrics = run_workload(dir, profile, spec.value());
    REQUIRE(metrics.is_ok());
    docs[i] = nlohmann::json::parse(metrics_to_json(metrics.value()));
  }
  CHECK(docs[0]["wall"] != nullptr);
  docs[0].erase("wall");
  docs[1].erase("wall");
  CHECK(docs[0].dump() == docs[1].dump());  // identical JSON bytes
  CHECK(docs[0]["store_digest"] == docs[1]["store_digest"]);
  CHECK(docs[0]["audit_report"] == docs[1]["audit_report"]);
}

TEST_CASE("metrics round-trip through JSON") {
  TempDir td;
  const auto profile = profile_by_name("P_Base").value();
  REQUIRE(load_phase(td.sub("s"), profile, 60, 2).is_ok());
  auto spec = builtin_workload("wpro", 60, 40, 2);
  auto metrics = run_workload(td.sub("s"), profile, spec.value());
  REQUIRE(metrics.is_ok());
  auto back = metrics_from_json(metrics_to_json(metrics.value()));
  REQUIRE(back.is_ok());
  CHECK(back.value().profile == "P_Base");
  CHECK(back.value().workload == "wpro");
  CHECK(back.value().store_digest == metrics.value().store_digest);
  CHECK(back.value().op_counts == metrics.value().op_counts);
}

TEST_CASE("report renders deterministically and sorts sweeps by size") {
  RunMetrics a;
  a.profile = "P_Base";
  a.workload = "wcus";
  a.n_records = 30000;
  a.completion_seconds = 2.0;
  RunMetrics b = a;
  b.n_records = 10000;
  RunMetrics c = a;
  c.n_records = 20000;
  const std::string table = render_report_table({a, b, c});
  const auto p10 = table.find("10000");
  const auto p20 = table.find("20000");
  const auto p30 = table.find("30000");
  REQUIRE(p10 != std::string::npos);
  CHECK(p10 < p20);
  CHECK(p20 < p30);

  CHECK(render_report_table({}) ==
        render_report_table({}));  // stable header, no rows
  const std::string json = render_report_json({a, b, c});
  CHECK(nlohmann::json::parse(json)["results"].size() == 3);
  CHECK(render_report_json({}) == "{\n  \"results\": []\n}\n");
}

TEST_CASE("two clients partition the keyspace and stay consistent") {
  TempDir td;
  const auto profile = profile_by_name("P_Base").value();
  REQUIRE(load_phase(td.sub("s"), profile, 200, 21).is_ok());
  auto spec = builtin_workload("wcus", 200, 120, 21);
  auto metrics = run_workload(td.sub("s"), profile, spec.value(), /*clients=*/2);
  REQUIRE(metrics.is_ok());
  CHECK(metrics.value().g6_violations == 0);  // cross-client audit after quiescence
  std::uint64_t total_ops = 0;
  for (const auto& [k, v] : metrics.value().op_counts) total_ops += v;
  CHECK(total_ops == 120);
}

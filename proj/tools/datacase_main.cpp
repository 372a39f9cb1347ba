// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "datacase/bench.hpp"
#include "datacase/checker.hpp"
#include "datacase/codec.hpp"
#include "datacase/store.hpp"
#include "datacase/time_codec.hpp"

namespace {

using namespace datacase;

constexpr int kUsageExit = 2;

// Engine and policy failures: one machine-readable line on stderr.
int fail(const Status& st) {
  nlohmann::json j;
  j["error"] = st.name();
  j["message"] = st.message();
  std::cerr << j.dump() << "\n";
  return 1;
}

int fail_usage(const std::string& message) {
  std::cerr << "usage error: " << message << "\n";
  return kUsageExit;
}

std::filesystem::path resolve_store(const std::string& flag_value) {
  // DATACASE_STORE takes precedence over --store.
  const char* env = std::getenv("DATACASE_STORE");
  if (env && *env) return env;
  return flag_value;
}

Result<Timestamp> resolve_time(const std::string& text) {
  if (text.empty()) {
    return static_cast<Timestamp>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
  }
  return parse_iso8601(text);
}

Result<EntityId> parse_entity(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    return Status(Code::kInvalidArgument, "entity must be <kind>:<id>, got " + text);
  }
  const auto kind = entity_kind_from_name(text.substr(0, colon));
  if (!kind) {
    return Status(Code::kInvalidArgument, "unknown entity kind in " + text);
  }
  const std::string id = text.substr(colon + 1);
  if (id.empty()) return Status(Code::kInvalidArgument, "empty entity id in " + text);
  return EntityId{*kind, id};
}

// purpose,entity-kind,entity-id,start,end with ISO-8601 bounds.
Result<PolicyTuple> parse_policy(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 5) {
    return Status(Code::kInvalidArgument,
                  "policy must be <purpose>,<kind>,<id>,<start>,<end>: " + text);
  }
  auto entity = parse_entity(parts[1] + ":" + parts[2]);
  if (!entity.is_ok()) return entity.status();
  auto t_b = parse_iso8601(parts[3]);
  if (!t_b.is_ok()) return t_b.status();
  auto t_f = parse_iso8601(parts[4]);
  if (!t_f.is_ok()) return t_f.status();
  PolicyTuple p{Purpose{parts[0]}, entity.value(), t_b.value(), t_f.value()};
  if (!p.valid()) return Status(Code::kInvalidArgument, "invalid policy window: " + text);
  return p;
}

Result<std::vector<std::uint8_t>> parse_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) return Status(Code::kInvalidArgument, "odd hex length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    const int hi = nibble(hex[i]);
    const int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return Status(Code::kInvalidArgument, "invalid hex digit");
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

Result<std::unique_ptr<Store>> open_store_checked(const std::filesystem::path& dir,
                                                  bool must_exist) {
  if (must_exist && !std::filesystem::exists(dir / "manifest.json")) {
    return Status(Code::kInvalidArgument, "not a store directory: " + dir.string());
  }
  return Store::open(dir);
}

struct InitArgs {
  std::string store;
  bool encrypt = false;
  std::uint64_t seed = 0;
  std::uint64_t segment_max = 1 << 20;
};

struct PutArgs {
  std::string store, id, subject, value, value_hex, entity, purpose, time;
  std::vector<std::string> origins, policies;
  bool regulation = false;
  bool metadata = false;
};

struct UnitArgs {
  std::string store, id, entity, purpose, time;
};

struct EraseArgs {
  std::string store, id, mode, entity, time;
};

struct BenchArgs {
  std::string store, workload = "wcus", profile = "P_Base", config, results = "results";
  std::uint64_t records = 10000, txns = 2000, seed = 1;
  unsigned clients = 1, repeat = 1;
};

int cmd_init(const InitArgs& a) {
  StoreOptions opts;
  opts.encrypt_at_rest = a.encrypt;
  opts.encryption_seed = a.seed;
  opts.segment_max_bytes = a.segment_max;
  auto store = Store::open(resolve_store(a.store), opts);
  if (!store.is_ok()) return fail(store.status());
  nlohmann::json j;
  j["store"] = store.value()->dir().string();
  j["encrypted_at_rest"] = store.value()->options().encrypt_at_rest;
  j["initialized"] = true;
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_put(const PutArgs& a) {
  auto t = resolve_time(a.time);
  if (!t.is_ok()) return fail(t.status());
  auto entity = parse_entity(a.entity);
  if (!entity.is_ok()) return fail(entity.status());
  DataUnit unit;
  unit.id = a.id;
  unit.category = a.metadata ? UnitCategory::kMetadata : UnitCategory::kBase;
  if (!a.subject.empty()) unit.subjects = {{EntityKind::kDataSubject, a.subject}};
  unit.origins = a.origins;
  std::vector<std::uint8_t> value;
  if (!a.value_hex.empty()) {
    auto v = parse_hex(a.value_hex);
    if (!v.is_ok()) return fail(v.status());
    value = v.take();
  } else {
    value.assign(a.value.begin(), a.value.end());
  }
  if (!value.empty()) unit.values = {{value, t.value()}};
  for (const auto& text : a.policies) {
    auto p = parse_policy(text);
    if (!p.is_ok()) return fail(p.status());
    unit.policies.push_back(p.take());
  }
  auto store = open_store_checked(resolve_store(a.store), true);
  if (!store.is_ok()) return fail(store.status());
  auto id = store.value()->put(std::move(unit), entity.value(), Purpose{a.purpose}, t.value(),
                               a.regulation);
  if (!id.is_ok()) return fail(id.status());
  nlohmann::json j;
  j["unit_id"] = id.value();
  j["created"] = true;
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_get(const UnitArgs& a) {
  auto t = resolve_time(a.time);
  if (!t.is_ok()) return fail(t.status());
  auto entity = parse_entity(a.entity);
  if (!entity.is_ok()) return fail(entity.status());
  auto store = open_store_checked(resolve_store(a.store), true);
  if (!store.is_ok()) return fail(store.status());
  auto value = store.value()->get(a.id, entity.value(), Purpose{a.purpose}, t.value());
  if (!value.is_ok()) return fail(value.status());
  nlohmann::json j;
  j["unit_id"] = a.id;
  j["value_hex"] = hex_encode(value.value());
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_erase(const EraseArgs& a) {
  auto t = resolve_time(a.time);
  if (!t.is_ok()) return fail(t.status());
  const auto mode = erasure_mode_from_name(a.mode);
  if (!mode) return fail_usage("unknown erasure mode: " + a.mode);
  auto store = open_store_checked(resolve_store(a.store), true);
  if (!store.is_ok()) return fail(store.status());

  nlohmann::json j;
  if (*mode == ErasureMode::kReversiblyInaccessible) {
    auto st = store.value()->make_inaccessible(a.id, t.value());
    if (!st.is_ok()) return fail(st.status());
    j["unit_id"] = a.id;
    j["mode"] = erasure_mode_name(*mode);
    j["status"] = erasure_status_name(st.value());
  } else {
    auto entity = parse_entity(a.entity);
    if (!entity.is_ok()) return fail(entity.status());
    auto rep = store.value()->erase(a.id, *mode, entity.value(), t.value());
    if (!rep.is_ok()) return fail(rep.status());
    j["unit_id"] = a.id;
    j["mode"] = erasure_mode_name(*mode);
    j["erased_units"] = rep.value().erased_units;
    j["value_bytes_wiped"] = rep.value().value_bytes_wiped;
    j["ledger_records_redacted"] = rep.value().ledger_records_redacted;
    j["status"] = erasure_status_name(status_for_mode(*mode));
  }
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_restore(const UnitArgs& a) {
  auto t = resolve_time(a.time);
  if (!t.is_ok()) return fail(t.status());
  auto store = open_store_checked(resolve_store(a.store), true);
  if (!store.is_ok()) return fail(store.status());
  auto st = store.value()->restore_access(a.id, t.value());
  if (!st.is_ok()) return fail(st.status());
  nlohmann::json j;
  j["unit_id"] = a.id;
  j["status"] = erasure_status_name(st.value());
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_compact(const std::string& store_flag, const std::string& level) {
  auto store = open_store_checked(resolve_store(store_flag), true);
  if (!store.is_ok()) return fail(store.status());
  const CompactionLevel lvl =
      level == "full" ? CompactionLevel::kFull : CompactionLevel::kIncremental;
  if (level != "full" && level != "incremental") {
    return fail_usage("compaction level must be incremental or full");
  }
  auto reclaimed = store.value()->compact(lvl);
  if (!reclaimed.is_ok()) return fail(reclaimed.status());
  nlohmann::json j;
  j["level"] = level;
  j["bytes_reclaimed"] = reclaimed.value();
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_audit(const std::string& store_flag, const std::string& now_text) {
  auto store = open_store_checked(resolve_store(store_flag), true);
  if (!store.is_ok()) return fail(store.status());
  Timestamp now;
  if (now_text.empty()) {
    // Deterministic default: the time of the last recorded action.
    const auto& records = store.value()->ledger().records();
    now = records.empty() ? 0 : records.back().time;
  } else {
    auto t = parse_iso8601(now_text);
    if (!t.is_ok()) return fail(t.status());
    now = t.value();
  }
  const auto violations = run_all_checks(*store.value(), now);
  write_report_ndjson(std::cout, violations);
  std::cout << violations.size() << " violations\n";
  const std::size_t kinds = violation_kind_count(violations);
  return static_cast<int>(std::min<std::size_t>(kinds, 125));
}

int cmd_characterize(const std::string& scratch) {
  const bool default_scratch = scratch.empty();
  const std::filesystem::path dir =
      default_scratch ? std::filesystem::temp_directory_path() / "datacase-characterize"
                      : std::filesystem::path(scratch);
  const auto expected = expected_characterizations();
  bool all_match = true;
  std::printf("%-24s %-4s %-4s %-4s\n", "mode", "IR", "II", "Inv");
  for (const auto& want : expected) {
    auto got = characterize(want.mode, dir);
    if (!got.is_ok()) return fail(got.status());
    const auto& c = got.value();
    std::printf("%-24s %-4s %-4s %-4s\n", erasure_mode_name(c.mode), c.ir ? "yes" : "no",
                c.ii ? "yes" : "no", c.inv ? "yes" : "no");
    all_match = all_match && c == want;
  }
  if (default_scratch) {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
  return all_match ? 0 : 1;
}

int cmd_export_ledger(const std::string& store_flag, const std::string& out) {
  auto store = open_store_checked(resolve_store(store_flag), true);
  if (!store.is_ok()) return fail(store.status());
  if (out.empty()) {
    store.value()->ledger().export_ndjson(std::cout);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) return fail(Status(Code::kIoError, "cannot open " + out));
    store.value()->ledger().export_ndjson(f);
  }
  return 0;
}

Result<bench::WorkloadSpec> workload_from_args(const BenchArgs& a) {
  if (a.config.empty()) {
    return bench::builtin_workload(a.workload, a.records, a.txns, a.seed);
  }
  std::ifstream f(a.config);
  if (!f) return Status(Code::kIoError, "cannot read config " + a.config);
  nlohmann::json j = nlohmann::json::parse(f, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return Status(Code::kInvalidArgument, "config is not valid JSON");
  const std::string name = j.value("name", a.workload);
  const std::uint64_t records = j.value("n_records", a.records);
  const std::uint64_t txns = j.value("n_txns", a.txns);
  const std::uint64_t seed = j.value("seed", a.seed);
  if (!j.contains("mix")) return bench::builtin_workload(name, records, txns, seed);
  bench::WorkloadSpec spec;
  spec.name = name;
  spec.n_records = records;
  spec.n_txns = txns;
  spec.seed = seed;
  int total = 0;
  for (auto it = j["mix"].begin(); it != j["mix"].end(); ++it) {
    bool known = false;
    for (int c = 0; c <= static_cast<int>(bench::OpClass::kUpdateMetadata); ++c) {
      const auto cls = static_cast<bench::OpClass>(c);
      if (it.key() == bench::op_class_name(cls)) {
        spec.mix.push_back({cls, it.value().get<int>()});
        known = true;
      }
    }
    if (!known) return Status(Code::kInvalidArgument, "unknown op class: " + it.key());
    total += spec.mix.back().second;
  }
  if (total != 100) return Status(Code::kInvalidArgument, "mix percentages must sum to 100");
  return spec;
}

int cmd_bench(const BenchArgs& a) {
  auto profile = bench::profile_by_name(a.profile);
  if (!profile.is_ok()) return fail(profile.status());
  auto spec = workload_from_args(a);
  if (!spec.is_ok()) return fail(spec.status());

  const std::filesystem::path base = resolve_store(a.store);
  const unsigned repeat = std::max(1u, a.repeat);
  std::vector<bench::RunMetrics> runs;
  for (unsigned rep = 0; rep < repeat; ++rep) {
    const auto dir = repeat == 1 ? base : base / ("rep-" + std::to_string(rep));
    auto digest = bench::load_phase(dir, profile.value(), spec.value().n_records,
                                    spec.value().seed);
    if (!digest.is_ok()) return fail(digest.status());
    auto metrics = bench::run_workload(dir, profile.value(), spec.value(), a.clients);
    if (!metrics.is_ok()) return fail(metrics.status());
    runs.push_back(metrics.take());
  }
  std::sort(runs.begin(), runs.end(), [](const auto& x, const auto& y) {
    return x.completion_seconds < y.completion_seconds;
  });
  const bench::RunMetrics& median = runs[runs.size() / 2];

  std::error_code ec;
  std::filesystem::create_directories(a.results, ec);
  const auto out_path = std::filesystem::path(a.results) /
                        (profile.value().name + "-" + spec.value().name + ".json");
  nlohmann::json doc = nlohmann::json::parse(bench::metrics_to_json(median));
  doc["repeats"] = repeat;
  std::ofstream out(out_path, std::ios::binary);
  if (!out) return fail(Status(Code::kIoError, "cannot write " + out_path.string()));
  out << doc.dump(2) << "\n";
  out.close();

  std::cout << bench::render_report_table({median});
  return median.g6_violations == 0 ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& files, const std::string& dir, bool as_json) {
  std::vector<std::string> paths = files;
  if (!dir.empty() && std::filesystem::exists(dir)) {
    for (const auto& ent : std::filesystem::directory_iterator(dir)) {
      if (ent.path().extension() == ".json") paths.push_back(ent.path().string());
    }
  }
  std::vector<bench::RunMetrics> metrics;
  for (const auto& p : paths) {
    std::ifstream f(p, std::ios::binary);
    if (!f) return fail(Status(Code::kIoError, "cannot read " + p));
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    auto m = bench::metrics_from_json(text);
    if (!m.is_ok()) return fail(m.status());
    metrics.push_back(m.take());
  }
  std::cout << (as_json ? bench::render_report_json(metrics)
                        : bench::render_report_table(metrics));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"datacase: policy-aware embedded datastore with grounded erasure semantics"};
  app.require_subcommand(1);

  InitArgs init_args;
  auto* init = app.add_subcommand("init", "create an empty store directory");
  init->add_option("--store", init_args.store, "store directory")->required();
  init->add_flag("--encrypt", init_args.encrypt, "enable the at-rest value transform");
  init->add_option("--seed", init_args.seed, "encryption seed");
  init->add_option("--segment-max", init_args.segment_max, "segment size limit in bytes");

  PutArgs put_args;
  auto* put = app.add_subcommand("put", "create a data unit");
  put->add_option("--store", put_args.store)->required();
  put->add_option("--id", put_args.id)->required();
  put->add_option("--subject", put_args.subject, "data-subject id");
  put->add_option("--origin", put_args.origins, "origin identifiers");
  put->add_option("--value", put_args.value, "value as a UTF-8 string");
  put->add_option("--value-hex", put_args.value_hex, "value as hex bytes");
  put->add_option("--policy", put_args.policies,
                  "policy as <purpose>,<kind>,<id>,<start>,<end> (ISO-8601 UTC)");
  put->add_option("--entity", put_args.entity, "acting entity <kind>:<id>")->required();
  put->add_option("--purpose", put_args.purpose, "acting purpose")->required();
  put->add_option("--time", put_args.time, "action time, ISO-8601 UTC (default: now)");
  put->add_flag("--regulation", put_args.regulation, "action is required by regulation");
  put->add_flag("--metadata", put_args.metadata, "create a metadata-category unit");

  UnitArgs get_args;
  auto* get = app.add_subcommand("get", "read a data unit's latest value");
  get->add_option("--store", get_args.store)->required();
  get->add_option("--id", get_args.id)->required();
  get->add_option("--entity", get_args.entity)->required();
  get->add_option("--purpose", get_args.purpose)->required();
  get->add_option("--time", get_args.time);

  EraseArgs erase_args;
  auto* erase = app.add_subcommand("erase", "apply one of the four erasure interpretations");
  erase->add_option("--store", erase_args.store)->required();
  erase->add_option("--id", erase_args.id)->required();
  erase->add_option("--mode", erase_args.mode,
                    "reversibly_inaccessible | delete | strong_delete | permanent_delete")
      ->required();
  erase->add_option("--entity", erase_args.entity, "acting entity <kind>:<id>");
  erase->add_option("--time", erase_args.time);

  UnitArgs restore_args;
  auto* restore = app.add_subcommand("restore", "restore a reversibly inaccessible unit");
  restore->add_option("--store", restore_args.store)->required();
  restore->add_option("--id", restore_args.id)->required();
  restore->add_option("--time", restore_args.time);

  std::string compact_store, compact_level = "incremental";
  auto* compact = app.add_subcommand("compact", "reclaim tombstoned space");
  compact->add_option("--store", compact_store)->required();
  compact->add_option("--level", compact_level, "incremental | full");

  std::string audit_store, audit_now;
  auto* audit = app.add_subcommand("audit", "run every invariant check");
  audit->add_option("--store", audit_store)->required();
  audit->add_option("--now", audit_now, "audit time, ISO-8601 UTC (default: last action)");

  std::string characterize_scratch;
  auto* characterize_cmd =
      app.add_subcommand("characterize", "verify the erasure interpretation table");
  characterize_cmd->add_option("--scratch", characterize_scratch, "scratch directory");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "load a store and run a workload");
  bench_cmd->add_option("--store", bench_args.store)->required();
  bench_cmd->add_option("--workload", bench_args.workload, "wcon | wpro | wcus | ycsb-c");
  bench_cmd->add_option("--profile", bench_args.profile, "P_Base | P_GBench | P_SYS");
  bench_cmd->add_option("--records", bench_args.records);
  bench_cmd->add_option("--txns", bench_args.txns);
  bench_cmd->add_option("--seed", bench_args.seed);
  bench_cmd->add_option("--clients", bench_args.clients);
  bench_cmd->add_option("--repeat", bench_args.repeat, "repetitions; the median is reported");
  bench_cmd->add_option("--config", bench_args.config, "workload config JSON");
  bench_cmd->add_option("--results", bench_args.results, "results directory");

  std::vector<std::string> report_files;
  std::string report_dir;
  bool report_json = false;
  auto* report = app.add_subcommand("report", "aggregate benchmark results");
  report->add_option("files", report_files, "metrics JSON files");
  report->add_option("--dir", report_dir, "directory of metrics JSON files");
  report->add_flag("--json", report_json, "emit JSON instead of the table");

  std::string export_store, export_out;
  auto* export_cmd = app.add_subcommand("export-ledger", "emit the action history as NDJSON");
  export_cmd->add_option("--store", export_store)->required();
  export_cmd->add_option("--out", export_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kUsageExit;
  }

  if (init->parsed()) return cmd_init(init_args);
  if (put->parsed()) return cmd_put(put_args);
  if (get->parsed()) return cmd_get(get_args);
  if (erase->parsed()) return cmd_erase(erase_args);
  if (restore->parsed()) return cmd_restore(restore_args);
  if (compact->parsed()) return cmd_compact(compact_store, compact_level);
  if (audit->parsed()) return cmd_audit(audit_store, audit_now);
  if (characterize_cmd->parsed()) return cmd_characterize(characterize_scratch);
  if (bench_cmd->parsed()) return cmd_bench(bench_args);
  if (report->parsed()) return cmd_report(report_files, report_dir, report_json);
  if (export_cmd->parsed()) return cmd_export_ledger(export_store, export_out);
  return fail_usage("no command");
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stratjoin/allocation.h"
#include "stratjoin/datagen.h"
#include "stratjoin/join_algorithms.h"
#include "stratjoin/randomness.h"

namespace stratjoin {

inline constexpr int kReportSchemaVersion = 1;

/// A pair of relations to join: either generated or read from files.
struct Dataset {
  std::string name;
  std::optional<ZipfSpec> left_spec;
  std::optional<ZipfSpec> right_spec;
  std::filesystem::path left_path;
  std::filesystem::path right_path;
  std::string join_column = "JoinKey";
  char delimiter = ',';
};

struct ExperimentConfig {
  std::vector<Algorithm> algorithms;
  std::vector<SamplingRate> rates;
  std::vector<Dataset> datasets;
  std::uint64_t trials = 1;
  std::uint64_t seed = 42;
  bool timing = false;
};

struct ReportRow {
  std::string dataset;
  std::string algorithm;
  double f = 0;
  double left_size = 0;   // mean over trials
  double right_size = 0;
  double account_total = 0;
  double ratio_vs_relations = 0;  // account / (|R1| + |R2|)
  double ratio_vs_baseline = 0;   // account / stratjoin_overall account
  double strata_sampled = 0;      // fraction of joinable strata with a sampled side
  double any_stratum_sampled = 0; // 1 when at least one stratum is sampled
  std::optional<double> runtime_ms;
  std::string error;              // dataset or run failure for this row

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

/// One row per (dataset, f, algorithm), in that nesting order.
std::vector<ReportRow> run_bench(const ExperimentConfig& config);

enum class ReportFormat { kJson, kCsv };
ReportFormat parse_format(std::string_view name);

/// Numbers are written as decimal strings with 6 significant digits.
std::string format_number(double value);

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                 std::ostream& out);
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                 const std::filesystem::path& path);
std::vector<ReportRow> parse_report(std::istream& in, ReportFormat format);

nlohmann::ordered_json to_json(const SamplePlan& plan);
nlohmann::ordered_json to_json(const SizeAccount& account);
nlohmann::ordered_json to_json(const StrataProfile& profile);
nlohmann::ordered_json to_json(const AllocationPlan& plan);
nlohmann::ordered_json to_json(const SampleCount& count);
nlohmann::ordered_json to_json(const TestReport& report);

/// Accepts {"rows": [[..],..]}, a bare array of rows, or delimited text with
/// one relation per line.
StrataMatrix parse_strata_matrix(std::istream& in);
AllocationPlan parse_allocation_plan(std::istream& in);

}  // namespace stratjoin

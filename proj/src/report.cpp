#include "stratjoin/report.h"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "stratjoin/error.h"
#include "stratjoin/sampler.h"

namespace stratjoin {

using nlohmann::ordered_json;

namespace {

std::pair<StratifiedRelation, StratifiedRelation> load(const Dataset& d) {
  if (d.left_spec && d.right_spec) {
    return {generate(*d.left_spec, "left"), generate(*d.right_spec, "right")};
  }
  return {ingest(d.left_path, d.join_column, d.delimiter),
          ingest(d.right_path, d.join_column, d.delimiter)};
}

double normalized(double v) { return std::stod(format_number(v)); }

ReportRow normalized(ReportRow row) {
  row.f = normalized(row.f);
  row.left_size = normalized(row.left_size);
  row.right_size = normalized(row.right_size);
  row.account_total = normalized(row.account_total);
  row.ratio_vs_relations = normalized(row.ratio_vs_relations);
  row.ratio_vs_baseline = normalized(row.ratio_vs_baseline);
  row.strata_sampled = normalized(row.strata_sampled);
  row.any_stratum_sampled = normalized(row.any_stratum_sampled);
  if (row.runtime_ms) row.runtime_ms = normalized(*row.runtime_ms);
  return row;
}

}  // namespace

std::vector<ReportRow> run_bench(const ExperimentConfig& config) {
  if (config.algorithms.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "bench needs at least one algorithm");
  }
  if (config.rates.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "bench needs at least one rate");
  }
  std::vector<ReportRow> rows;
  const RngHandle master(config.seed);
  for (const auto& dataset : config.datasets) {
    std::optional<std::pair<StratifiedRelation, StratifiedRelation>> rel;
    std::string load_error;
    try {
      rel = load(dataset);
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (const auto& f : config.rates) {
      std::optional<StrataProfile> prof;
      std::optional<SamplePlan> overall;
      if (rel) {
        prof = profile(rel->first, rel->second);
        overall = plan_overall(*prof, f);
      }
      for (Algorithm algorithm : config.algorithms) {
        ReportRow row;
        row.dataset = dataset.name;
        row.algorithm = std::string(to_string(algorithm));
        row.f = f.value();
        if (!rel) {
          row.error = load_error;
          rows.push_back(normalized(row));
          continue;
        }
        try {
          const auto start = std::chrono::steady_clock::now();
          std::uint64_t left = 0;
          std::uint64_t right = 0;
          for (std::uint64_t t = 0; t < config.trials; ++t) {
            const RngHandle rng = master.derive(dataset.name).derive(t);
            const JoinRun run = run_algorithm(algorithm, rel->first, rel->second, f, rng);
            left += run.account.left;
            right += run.account.right;
          }
          const auto elapsed = std::chrono::steady_clock::now() - start;
          const auto n = static_cast<double>(config.trials);
          row.left_size = static_cast<double>(left) / n;
          row.right_size = static_cast<double>(right) / n;
          row.account_total = row.left_size + row.right_size;
          const auto relations =
              static_cast<double>(prof->left_cardinality + prof->right_cardinality);
          row.ratio_vs_relations = relations > 0 ? row.account_total / relations : 0;
          const auto baseline = static_cast<double>(overall->total());
          row.ratio_vs_baseline = baseline > 0 ? row.account_total / baseline : 0;
          const auto joinable = overall->joinable_strata();
          row.strata_sampled =
              joinable ? static_cast<double>(overall->sampled_strata()) /
                             static_cast<double>(joinable)
                       : 0;
          row.any_stratum_sampled = overall->sampled_strata() > 0 ? 1 : 0;
          if (config.timing) {
            row.runtime_ms =
                std::chrono::duration<double, std::milli>(elapsed).count() / n;
          }
        } catch (const std::exception& e) {
          row.error = e.what();
        }
        rows.push_back(normalized(row));
      }
    }
  }
  return rows;
}

ReportFormat parse_format(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv") return ReportFormat::kCsv;
  throw Error(ErrorKind::kInvalidArgument, "unknown format '" + std::string(name) + "'");
}

std::string format_number(double value) {
  if (value == 0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

const std::vector<std::string> kColumns = {
    "dataset",        "algorithm",          "f",
    "left_size",      "right_size",         "account_total",
    "ratio_vs_relations", "ratio_vs_baseline", "strata_sampled",
    "any_stratum_sampled", "runtime_ms",    "error"};

std::vector<std::string> cells(const ReportRow& r) {
  return {r.dataset,
          r.algorithm,
          format_number(r.f),
          format_number(r.left_size),
          format_number(r.right_size),
          format_number(r.account_total),
          format_number(r.ratio_vs_relations),
          format_number(r.ratio_vs_baseline),
          format_number(r.strata_sampled),
          format_number(r.any_stratum_sampled),
          r.runtime_ms ? format_number(*r.runtime_ms) : std::string(),
          r.error};
}

ReportRow from_cells(const std::vector<std::string>& c) {
  if (c.size() != kColumns.size()) {
    throw Error(ErrorKind::kSchema, "report row has " + std::to_string(c.size()) +
                                        " columns, expected " +
                                        std::to_string(kColumns.size()));
  }
  ReportRow r;
  r.dataset = c[0];
  r.algorithm = c[1];
  r.f = std::stod(c[2]);
  r.left_size = std::stod(c[3]);
  r.right_size = std::stod(c[4]);
  r.account_total = std::stod(c[5]);
  r.ratio_vs_relations = std::stod(c[6]);
  r.ratio_vs_baseline = std::stod(c[7]);
  r.strata_sampled = std::stod(c[8]);
  r.any_stratum_sampled = std::stod(c[9]);
  if (!c[10].empty()) r.runtime_ms = std::stod(c[10]);
  r.error = c[11];
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

// RFC 4180 records; quoted fields may contain commas, quotes and newlines.
std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n') {
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else if (ch != '\r') {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorKind::kSchema, "unterminated quoted field");
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                 std::ostream& out) {
  if (rows.empty()) throw Error(ErrorKind::kInvalidArgument, "report has no rows");
  if (format == ReportFormat::kCsv) {
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
      out << (i ? "," : "") << kColumns[i];
    }
    out << '\n';
    for (const auto& row : rows) {
      const auto c = cells(row);
      for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << csv_field(c[i]);
      out << '\n';
    }
    return;
  }
  ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["rows"] = ordered_json::array();
  for (const auto& row : rows) {
    const auto c = cells(row);
    ordered_json obj;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (kColumns[i] == "runtime_ms" && !row.runtime_ms) continue;
      if (kColumns[i] == "error" && row.error.empty()) continue;
      obj[kColumns[i]] = c[i];
    }
    doc["rows"].push_back(std::move(obj));
  }
  out << doc.dump(2) << '\n';
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  emit_report(rows, format, out);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path.string());
}

std::vector<ReportRow> parse_report(std::istream& in, ReportFormat format) {
  std::vector<ReportRow> rows;
  if (format == ReportFormat::kCsv) {
    auto records = read_csv(in);
    if (records.empty() || records.front() != kColumns) {
      throw Error(ErrorKind::kSchema, "CSV report header does not match");
    }
    for (std::size_t i = 1; i < records.size(); ++i) rows.push_back(from_cells(records[i]));
    return rows;
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSchema, std::string("report JSON: ") + e.what());
  }
  if (!doc.contains("schema_version") || doc["schema_version"] != kReportSchemaVersion) {
    throw Error(ErrorKind::kSchema, "unsupported report schema_version");
  }
  for (const auto& obj : doc.at("rows")) {
    std::vector<std::string> c;
    for (const auto& col : kColumns) {
      c.push_back(obj.contains(col) ? obj[col].get<std::string>() : std::string());
    }
    rows.push_back(from_cells(c));
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

ordered_json key_json(const Key& k) {
  if (k.is_integer()) return k.as_integer();
  return k.as_string();
}

}  // namespace

ordered_json to_json(const SamplePlan& plan) {
  ordered_json doc;
  doc["f"] = format_number(plan.rate.value());
  doc["left_total"] = plan.left_total();
  doc["right_total"] = plan.right_total();
  doc["total"] = plan.total();
  doc["target_total"] = plan.target_total();
  doc["sampled_strata"] = plan.sampled_strata();
  doc["joinable_strata"] = plan.joinable_strata();
  doc["strata"] = ordered_json::array();
  for (const auto& s : plan.strata) {
    ordered_json e;
    e["key"] = key_json(s.key);
    e["m1"] = s.m1;
    e["m2"] = s.m2;
    e["strategy"] = std::string(to_string(s.strategy));
    e["target"] = s.target;
    e["left_input"] = s.left_input;
    e["right_input"] = s.right_input;
    if (s.zero_target) e["zero_target"] = true;
    doc["strata"].push_back(std::move(e));
  }
  return doc;
}

ordered_json to_json(const SizeAccount& account) {
  ordered_json doc;
  doc["left"] = account.left;
  doc["right"] = account.right;
  doc["total"] = account.total();
  doc["no_sampling"] = account.no_sampling;
  doc["savings"] = account.savings();
  doc["strata"] = ordered_json::array();
  for (const auto& s : account.strata) {
    doc["strata"].push_back({{"key", key_json(s.key)}, {"left", s.left}, {"right", s.right}});
  }
  return doc;
}

ordered_json to_json(const StrataProfile& profile) {
  ordered_json doc;
  doc["left_cardinality"] = profile.left_cardinality;
  doc["right_cardinality"] = profile.right_cardinality;
  doc["join_cardinality"] = profile.join_cardinality;
  doc["strata"] = ordered_json::array();
  for (const auto& [key, c] : profile.strata) {
    doc["strata"].push_back({{"key", key_json(key)}, {"left", c.left}, {"right", c.right}});
  }
  return doc;
}

ordered_json to_json(const AllocationPlan& plan) {
  ordered_json doc;
  doc["k"] = plan.total();
  doc["mm"] = plan.mm;
  doc["stratum_totals"] = plan.stratum_totals();
  return doc;
}

ordered_json to_json(const SampleCount& count) {
  ordered_json doc;
  if (count.exact) doc["exact"] = count.exact->str();
  doc["log_value"] = format_number(count.log_value);
  return doc;
}

ordered_json to_json(const TestReport& report) {
  ordered_json doc;
  doc["criterion"] = report.criterion;
  doc["subject"] = report.subject;
  doc["statistic"] = format_number(report.statistic);
  doc["degrees_of_freedom"] = format_number(report.degrees_of_freedom);
  doc["p_value"] = format_number(report.p_value);
  doc["alpha"] = format_number(report.alpha);
  doc["pass"] = report.pass;
  doc["note"] = report.note;
  return doc;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<std::uint64_t>> parse_grid(std::istream& in, const char* what) {
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw Error(ErrorKind::kSchema, std::string(what) + " is empty");
  std::vector<std::vector<std::uint64_t>> rows;
  if (text[first] == '{' || text[first] == '[') {
    try {
      auto doc = nlohmann::json::parse(text);
      if (doc.is_object()) doc = doc.contains("rows") ? doc["rows"] : doc.at("mm");
      rows = doc.get<std::vector<std::vector<std::uint64_t>>>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kSchema, std::string(what) + ": " + e.what());
    }
    return rows;
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    for (char& ch : line) {
      if (ch == ',' || ch == ';' || ch == '\t' || ch == '|') ch = ' ';
    }
    std::istringstream cells(line);
    std::vector<std::uint64_t> row;
    std::string cell;
    while (cells >> cell) {
      std::size_t used = 0;
      std::uint64_t v = 0;
      try {
        if (cell.front() == '-') throw std::invalid_argument(cell);
        v = std::stoull(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size()) {
        throw Error(ErrorKind::kSchema,
                    std::string(what) + ": '" + cell + "' is not a nonnegative integer");
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

StrataMatrix parse_strata_matrix(std::istream& in) {
  return StrataMatrix(parse_grid(in, "strata matrix"));
}

AllocationPlan parse_allocation_plan(std::istream& in) {
  return AllocationPlan{parse_grid(in, "allocation plan")};
}

}  // namespace stratjoin

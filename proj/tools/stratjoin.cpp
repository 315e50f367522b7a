// Command-line front end: data generation, sampling, planning, allocation,
// randomness verification and benchmark reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stratjoin/allocation.h"
#include "stratjoin/datagen.h"
#include "stratjoin/error.h"
#include "stratjoin/join_algorithms.h"
#include "stratjoin/mini_join.h"
#include "stratjoin/randomness.h"
#include "stratjoin/report.h"
#include "stratjoin/sampler.h"
#include "stratjoin/strata.h"

using namespace stratjoin;
using nlohmann::ordered_json;

namespace {

struct Common {
  std::uint64_t seed = 42;
  std::vector<std::string> rates;
  std::vector<std::string> algos;
  std::string out;
  std::string join_col = "JoinKey";
  std::string delim = ",";
};

char delimiter(const Common& c) {
  if (c.delim == "\\t" || c.delim == "tab") return '\t';
  if (c.delim.size() != 1) {
    throw Error(ErrorKind::kInvalidArgument, "--delim takes a single character");
  }
  return c.delim[0];
}

std::vector<SamplingRate> rates(const Common& c) {
  std::vector<SamplingRate> out;
  for (const auto& r : c.rates) out.push_back(SamplingRate::parse(r));
  if (out.empty()) throw Error(ErrorKind::kInvalidArgument, "at least one --rate is required");
  return out;
}

// Writes to --out when given, otherwise stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error(ErrorKind::kIo, "cannot write " + path);
    path_ = path;
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    if (!file_) return;
    file_->close();
    if (!*file_) throw Error(ErrorKind::kIo, "write failed for " + path_);
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::string path_;
};

void write_json(const Common& c, const ordered_json& doc) {
  Output out(c.out);
  out.stream() << doc.dump(2) << '\n';
  out.close();
}

StratifiedRelation load(const std::string& path, const Common& c) {
  return ingest(path, c.join_col, delimiter(c));
}

StrataMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return parse_strata_matrix(in);
}

AllocationPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return parse_allocation_plan(in);
}

std::vector<TestReport> checks_for(const TrialSubject& subject, const TrialStatistics& stats,
                                   double alpha) {
  if (subject.control == Control::kNone &&
      (subject.algorithm == Algorithm::kStreamSample ||
       subject.algorithm == Algorithm::kSrsBoth)) {
    return {check_multinomial(stats, alpha)};
  }
  return {check_strs1(stats), check_strs2(stats, alpha), check_strs3(stats, alpha)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stratified random sampling over equi-joins"};
  app.require_subcommand(1);
  Common c;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", c.out, "Output file (default stdout)");
  };
  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--join-col", c.join_col, "Join column name")->capture_default_str();
    sub->add_option("--delim", c.delim, "Field delimiter")->capture_default_str();
  };
  auto add_rates = [&](CLI::App* sub) {
    sub->add_option("-f,--rate", c.rates, "Join sampling rate in (0, 1]; repeatable")
        ->required();
  };

  // gen
  ZipfSpec spec;
  std::string gen_name = "zipf";
  auto* gen = app.add_subcommand("gen", "Generate a zipfian relation");
  gen->add_option("--tuples", spec.n_tuples, "Number of tuples")->required();
  gen->add_option("--z", spec.z, "Skew exponent")->capture_default_str();
  gen->add_option("--keys", spec.n_keys, "Distinct join values")->required();
  gen->add_option("--name", gen_name, "Relation name")->capture_default_str();
  add_seed(gen);
  add_out(gen);
  gen->add_option("--delim", c.delim, "Field delimiter")->capture_default_str();

  // stats / sample / plan
  std::string left_path;
  std::string right_path;
  auto add_pair = [&](CLI::App* sub) {
    sub->add_option("left", left_path, "Left relation R1")->required()->check(CLI::ExistingFile);
    sub->add_option("right", right_path, "Right relation R2")->required()->check(CLI::ExistingFile);
    add_io(sub);
  };
  auto* stats = app.add_subcommand("stats", "Per-stratum counts of two relations");
  add_pair(stats);
  add_out(stats);

  std::string account_path;
  auto* sample = app.add_subcommand("sample", "Run one join-sampling algorithm");
  add_pair(sample);
  add_rates(sample);
  sample->add_option("--algo", c.algos, "Algorithm")->required();
  sample->add_option("--account", account_path, "Also write the size account as JSON");
  add_seed(sample);
  add_out(sample);

  bool fk_pk = false;
  auto* plan = app.add_subcommand("plan", "Per-stratum sampling plan");
  add_pair(plan);
  add_rates(plan);
  plan->add_flag("--fk-pk", fk_pk, "Plan for a foreign-key/primary-key join");
  add_out(plan);

  // allocate / uc
  std::string matrix_path;
  std::string plan_path;
  std::uint64_t k = 0;
  bool brute = false;
  std::uint64_t cap = kDefaultSearchCap;
  auto* allocate = app.add_subcommand("allocate", "Allocate a sample budget across strata");
  allocate->add_option("matrix", matrix_path, "Strata matrix (rows = relations)")
      ->required()
      ->check(CLI::ExistingFile);
  allocate->add_option("-k,--budget", k, "Total sample size")->required();
  allocate->add_flag("--brute-force", brute, "Also search all plans for the optimum");
  allocate->add_option("--cap", cap, "Search cap for --brute-force")->capture_default_str();
  add_out(allocate);

  auto* uc = app.add_subcommand("uc", "Uniformity confidence of an allocation plan");
  uc->add_option("matrix", matrix_path, "Strata matrix")->required()->check(CLI::ExistingFile);
  uc->add_option("plan", plan_path, "Allocation plan")->required()->check(CLI::ExistingFile);
  add_out(uc);

  // verify
  double alpha = kDefaultAlpha;
  auto* verify = app.add_subcommand("verify", "Empirical randomness checks over seeded trials");
  add_pair(verify);
  add_rates(verify);
  verify->add_option("--algo", c.algos, "Algorithm or negative control; repeatable")
      ->required();
  std::uint64_t verify_trials = 1000;
  std::string verify_format = "table";
  verify->add_option("--trials", verify_trials, "Trials per check")->capture_default_str();
  verify->add_option("--alpha", alpha, "Significance level")->capture_default_str();
  verify->add_option("--format", verify_format, "table or json")->capture_default_str();
  add_seed(verify);
  add_out(verify);

  // bench
  ZipfSpec left_spec;
  ZipfSpec right_spec;
  bool timing = false;
  auto* bench = app.add_subcommand("bench", "Sample-size accounts per algorithm and rate");
  bench->add_option("--left", left_path, "Left relation file")->check(CLI::ExistingFile);
  bench->add_option("--right", right_path, "Right relation file")->check(CLI::ExistingFile);
  bench->add_option("--tuples", left_spec.n_tuples, "Generate both relations with this size");
  bench->add_option("--z", left_spec.z, "Skew exponent for generated relations");
  bench->add_option("--keys", left_spec.n_keys, "Distinct keys for generated relations");
  add_rates(bench);
  bench->add_option("--algo", c.algos, "Algorithm; repeatable (default all)");
  std::uint64_t bench_trials = 1;
  std::string bench_format = "json";
  bench->add_option("--trials", bench_trials, "Runs averaged per row")->capture_default_str();
  bench->add_option("--format", bench_format, "json or csv")->capture_default_str();
  bench->add_flag("--timing", timing, "Include mean runtime per row");
  add_seed(bench);
  add_out(bench);
  add_io(bench);

  // report
  std::string report_path;
  std::string input_format;
  auto* report = app.add_subcommand("report", "Re-emit a saved bench report");
  report->add_option("input", report_path, "Report file")->required()->check(CLI::ExistingFile);
  report->add_option("--from", input_format, "Input format (default from extension)");
  std::string report_format = "csv";
  report->add_option("--format", report_format, "json or csv")->capture_default_str();
  add_out(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    ordered_json err;
    err["error"] = {{"kind", "usage"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) {
      const auto rel = generate(ZipfSpec{spec.n_tuples, spec.z, spec.n_keys, c.seed}, gen_name);
      Output out(c.out);
      emit(rel, out.stream(), delimiter(c));
      out.close();
    } else if (stats->parsed()) {
      write_json(c, to_json(profile(load(left_path, c), load(right_path, c))));
    } else if (sample->parsed()) {
      if (c.algos.size() != 1 || c.rates.size() != 1) {
        throw Error(ErrorKind::kInvalidArgument, "sample takes one --algo and one --rate");
      }
      const auto r1 = load(left_path, c);
      const auto r2 = load(right_path, c);
      const JoinRun run = run_algorithm(parse_algorithm(c.algos[0]), r1, r2, rates(c)[0],
                                        RngHandle(c.seed));
      Output out(c.out);
      write_join_sample(run.sample, r1, r2, out.stream(), delimiter(c));
      out.close();
      if (!account_path.empty()) {
        Output acc(account_path);
        acc.stream() << to_json(run.account).dump(2) << '\n';
        acc.close();
      }
    } else if (plan->parsed()) {
      const auto prof = profile(load(left_path, c), load(right_path, c));
      ordered_json doc = ordered_json::array();
      for (const auto& f : rates(c)) {
        doc.push_back(to_json(fk_pk ? plan_1n(prof, f) : plan_overall(prof, f)));
      }
      write_json(c, doc);
    } else if (allocate->parsed()) {
      const auto m = load_matrix(matrix_path);
      const AllocationPlan p = m.strata() == 1
                                   ? [&] {
                                       std::vector<std::uint64_t> col;
                                       for (const auto& row : m.rows()) col.push_back(row[0]);
                                       AllocationPlan single;
                                       for (auto v : allocate_single_stratum(col, k)) {
                                         single.mm.push_back({v});
                                       }
                                       return single;
                                     }()
                                   : allocate_multi_strata(m, k);
      ordered_json doc;
      doc["plan"] = to_json(p);
      doc["count"] = to_json(count_possible_samples(m, p));
      doc["uniformity_confidence"] = format_number(uniformity_confidence(m, p));
      if (brute) {
        const auto best = brute_force_optimal(m, k, cap);
        doc["optimal"] = to_json(best.plan);
        doc["optimal_count"] = to_json(best.count);
        doc["optimal_uniformity_confidence"] =
            format_number(uniformity_confidence(m, best.plan));
        doc["candidates"] = best.candidates;
        const auto err = allocation_error(p, best.plan);
        doc["error"] = {{"mse", format_number(err.mse)},
                        {"msre", format_number(err.msre)},
                        {"max_diff", err.max_diff}};
      }
      write_json(c, doc);
    } else if (uc->parsed()) {
      const auto m = load_matrix(matrix_path);
      const auto p = load_plan(plan_path);
      ordered_json doc;
      doc["count"] = to_json(count_possible_samples(m, p));
      doc["uniformity_confidence"] = format_number(uniformity_confidence(m, p));
      write_json(c, doc);
    } else if (verify->parsed()) {
      if (verify_format != "table" && verify_format != "json") {
        throw Error(ErrorKind::kInvalidArgument, "verify --format is table or json");
      }
      const auto r1 = load(left_path, c);
      const auto r2 = load(right_path, c);
      std::vector<TestReport> reports;
      for (const auto& f : rates(c)) {
        for (const auto& name : c.algos) {
          const TrialSubject subject = parse_subject(name);
          const auto st = run_trials(subject, r1, r2, f, verify_trials, c.seed);
          for (auto& r : checks_for(subject, st, alpha)) reports.push_back(std::move(r));
        }
      }
      Output out(c.out);
      if (verify_format == "json") {
        ordered_json doc = ordered_json::array();
        for (const auto& r : reports) doc.push_back(to_json(r));
        out.stream() << doc.dump(2) << '\n';
      } else {
        char line[160];
        std::snprintf(line, sizeof line, "%-18s %-12s %12s %8s %12s  %s\n", "subject",
                      "criterion", "statistic", "df", "p", "result");
        out.stream() << line;
        for (const auto& r : reports) {
          std::snprintf(line, sizeof line, "%-18s %-12s %12s %8s %12s  %s\n",
                        r.subject.c_str(), r.criterion.c_str(),
                        format_number(r.statistic).c_str(),
                        format_number(r.degrees_of_freedom).c_str(),
                        format_number(r.p_value).c_str(), r.pass ? "pass" : "FAIL");
          out.stream() << line;
        }
      }
      out.close();
    } else if (bench->parsed()) {
      ExperimentConfig config;
      for (const auto& a : c.algos) config.algorithms.push_back(parse_algorithm(a));
      if (config.algorithms.empty()) config.algorithms = all_algorithms();
      config.rates = rates(c);
      config.trials = bench_trials;
      config.seed = c.seed;
      config.timing = timing;
      Dataset d;
      if (!left_path.empty() || !right_path.empty()) {
        if (left_path.empty() || right_path.empty()) {
          throw Error(ErrorKind::kInvalidArgument, "bench needs both --left and --right");
        }
        d.name = left_path + "|" + right_path;
        d.left_path = left_path;
        d.right_path = right_path;
        d.join_column = c.join_col;
        d.delimiter = delimiter(c);
      } else {
        if (left_spec.n_tuples == 0) {
          throw Error(ErrorKind::kInvalidArgument,
                      "bench needs --left/--right or --tuples/--keys");
        }
        right_spec = left_spec;
        left_spec.seed = RngHandle(c.seed).derive("left").next();
        right_spec.seed = RngHandle(c.seed).derive("right").next();
        std::ostringstream name;
        name << "zipf(n=" << left_spec.n_tuples << ",z=" << format_number(left_spec.z)
             << ",keys=" << left_spec.n_keys << ")";
        d.name = name.str();
        d.left_spec = left_spec;
        d.right_spec = right_spec;
      }
      config.datasets.push_back(d);
      const auto rows = run_bench(config);
      Output out(c.out);
      emit_report(rows, parse_format(bench_format), out.stream());
      out.close();
    } else if (report->parsed()) {
      std::string from = input_format;
      if (from.empty()) {
        from = report_path.size() >= 4 && report_path.substr(report_path.size() - 4) == ".csv"
                   ? "csv"
                   : "json";
      }
      std::ifstream in(report_path, std::ios::binary);
      if (!in) throw Error(ErrorKind::kIo, "cannot open " + report_path);
      const auto rows = parse_report(in, parse_format(from));
      Output out(c.out);
      emit_report(rows, parse_format(report_format), out.stream());
      out.close();
    }
  } catch (const Error& e) {
    ordered_json err;
    err["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    ordered_json err;
    err["error"] = {{"kind", "internal"}, {"message", e.what()}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
  return 0;
}

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../fixtures.h"
#include "stratjoin/allocation.h"
#include "stratjoin/datagen.h"
#include "stratjoin/error.h"
#include "stratjoin/join_algorithms.h"
#include "stratjoin/mini_join.h"
#include "stratjoin/randomness.h"
#include "stratjoin/sampler.h"

namespace fs = std::filesystem;
using namespace stratjoin;
using testing::k;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failure messages; the first few are kept for the summary line.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (messages_.size() < 3) messages_.push_back(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string summary(const std::string& on_pass) const {
    if (ok()) return on_pass;
    std::string s = std::to_string(failures_) + "/" + std::to_string(checks_) + " checks failed";
    for (const auto& m : messages_) s += "; " + m;
    return s;
  }

 private:
  std::uint64_t checks_ = 0;
  std::uint64_t failures_ = 0;
  std::vector<std::string> messages_;
};

// ---------------------------------------------------------------------------

Outcome inflation_table() {
  Checker c;
  const auto prof = StrataProfile::from_counts(
      {{k(1), {1000, 5}}, {k(2), {1000, 15}}, {k(3), {5, 1000}}, {k(4), {15, 1000}}});
  const SamplingRate f(0.1);
  const double overall[] = {505, 1015, 505, 1015};
  const double stream[] = {505, 1515, 1500, 2500};
  const double srs[] = {1000, 3000, 1000, 3000};
  const auto plan = plan_overall(prof, f);
  const auto o = expected_stratum_accounts(Algorithm::kStratJoinOverall, prof, f);
  const auto s = expected_stratum_accounts(Algorithm::kStreamSample, prof, f);
  const auto b = expected_stratum_accounts(Algorithm::kSrsBoth, prof, f);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto n = std::to_string(i + 1);
    c.expect(plan.strata[i].left_input + plan.strata[i].right_input == overall[i],
             "overall stratum " + n);
    c.expect(o[i].total() == overall[i], "overall expected stratum " + n);
    c.expect(s[i].total() == stream[i], "stream_sample stratum " + n);
    c.expect(b[i].total() == srs[i], "srs_both stratum " + n);
  }
  c.expect(plan.total() == 3040, "overall total");
  c.expect(overall_account(prof, f).no_sampling == 4040, "no-sampling total");
  c.expect(stream_sample_account(prof, f).total() == 6020, "stream_sample total");
  c.expect(srs_both_account(prof, f).total() == 8000, "srs_both total");

  // Executed on materialized relations, the stratified account is the plan's.
  const auto r1 = testing::relation("R1", {{k(1), 1000}, {k(2), 1000}, {k(3), 5}, {k(4), 15}});
  const auto r2 = testing::relation("R2", {{k(1), 5}, {k(2), 15}, {k(3), 1000}, {k(4), 1000}});
  const auto run = stratjoin_overall(r1, r2, f, RngHandle(42));
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& a = run.account.strata[i];
    c.expect(a.left + a.right == overall[i], "executed stratum " + std::to_string(i + 1));
  }
  c.expect(run.sample.total() == 4000, "executed output size");
  return {c.ok(), c.summary("overall 505/1015/505/1015 = 3040, stream_sample "
                            "505/1515/1500/2500, srs_both 1000/3000/1000/3000")};
}

Outcome possible_samples_table() {
  Checker c;
  const StrataMatrix m({{10}, {20}});
  const std::map<std::uint64_t, std::vector<std::uint64_t>> table = {
      {6, {155040, 218025, 136800, 39900, 5040, 210}},
      {12, {1679600, 8314020, 20155200, 26453700, 19535040, 8139600, 1860480, 218025, 11400,
            190}},
      {18, {11400, 218025, 1860480, 8139600, 19535040, 26453700, 20155200, 8314020, 1679600,
            125970}}};
  const std::map<std::uint64_t, std::uint64_t> argmax = {{6, 2}, {12, 4}, {18, 6}};
  int values = 0;
  for (const auto& [budget, row] : table) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::uint64_t mm1 = i + 1;
      const auto count = count_possible_samples(m, AllocationPlan{{{mm1}, {budget - mm1}}});
      c.expect(count.exact && *count.exact == row[i],
               "k=" + std::to_string(budget) + " mm1=" + std::to_string(mm1));
      ++values;
    }
    const std::uint64_t cells[] = {10, 20};
    const auto eq2 = allocate_single_stratum(cells, budget);
    c.expect(eq2[0] == argmax.at(budget), "proportional split for k=" + std::to_string(budget));
    c.expect(brute_force_optimal(m, budget).plan.mm[0][0] == argmax.at(budget),
             "search argmax for k=" + std::to_string(budget));
  }
  return {c.ok(), c.summary(std::to_string(values) +
                            " counts exact; argmax mm1 = 2, 4, 6 for k = 6, 12, 18")};
}

Outcome two_strata_example() {
  Checker c;
  const StrataMatrix m({{10, 5}, {20, 15}});
  const auto plan = allocate_multi_strata(m, 20);
  c.expect(plan.stratum_totals()[0] == 12, "k^1 from proportional split");
  // For every k^1, the best count over all plans with that stratum total.
  std::vector<long double> best(21, -1);
  for (std::uint64_t a = 0; a <= 10; ++a) {
    for (std::uint64_t b = 0; b <= 5; ++b) {
      for (std::uint64_t d = 0; d <= 20; ++d) {
        if (a + b + d > 20 || 20 - a - b - d > 15) continue;
        const AllocationPlan p{{{a, b}, {d, 20 - a - b - d}}};
        const auto v = count_possible_samples(m, p).log_value;
        best[a + d] = std::max<long double>(best[a + d], v);
      }
    }
  }
  const auto peak = std::max_element(best.begin(), best.end()) - best.begin();
  c.expect(peak == 12, "k^1 = " + std::to_string(peak) + " maximizes the count");
  c.expect(brute_force_optimal(m, 20).plan.stratum_totals()[0] == 12, "search optimum k^1");
  return {c.ok(), c.summary("k^1 = 12 from the split and from exhaustive search")};
}

// ---------------------------------------------------------------------------

Outcome allocation_sweeps(std::string& extra) {
  Checker c;
  std::ostringstream table;
  for (std::uint64_t population : {150, 200, 300}) {
    AllocationErrorAccumulator acc;
    for (std::uint64_t a = 5; a + 10 <= population; ++a) {
      for (std::uint64_t b = 5; a + b + 5 <= population; ++b) {
        const std::uint64_t cells[] = {a, b, population - a - b};
        const StrataMatrix m({{cells[0]}, {cells[1]}, {cells[2]}});
        for (std::uint64_t budget = 15; budget <= 100; ++budget) {
          const auto split = allocate_single_stratum(cells, budget);
          acc.add(AllocationPlan{{{split[0]}, {split[1]}, {split[2]}}},
                  marginal_optimal(m, budget));
        }
      }
    }
    const auto e = acc.result();
    c.expect(e.max_diff <= 2, "single stratum population " + std::to_string(population) +
                                  " max_diff " + std::to_string(e.max_diff));
    c.expect(e.msre < 0.05, "single stratum population " + std::to_string(population) +
                                " MSRE " + std::to_string(e.msre));
    char line[200];
    std::snprintf(line, sizeof line,
                  "    single  P=%-4llu instances=%-8zu MSE=%.4f MSRE=%.4f max_diff=%llu\n",
                  static_cast<unsigned long long>(population), acc.instances(), e.mse, e.msre,
                  static_cast<unsigned long long>(e.max_diff));
    table << line;
  }

  // 3 relations x 3 strata, every cell >= 3. P = 40 exhaustively; larger
  // populations by a seeded uniform sample of compositions.
  RngHandle rng(42);
  for (std::uint64_t population : {40, 45, 50, 55}) {
    AllocationErrorAccumulator acc;
    const std::uint64_t extra_units = population - 27;
    auto evaluate = [&](const std::vector<std::uint64_t>& cells) {
      const StrataMatrix m({{cells[0], cells[1], cells[2]},
                            {cells[3], cells[4], cells[5]},
                            {cells[6], cells[7], cells[8]}});
      for (std::uint64_t budget = 27; budget <= 30; ++budget) {
        acc.add(allocate_multi_strata(m, budget), marginal_optimal(m, budget));
      }
    };
    std::vector<std::uint64_t> cells(9, 3);
    if (population == 40) {
      std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t i,
                                                                 std::uint64_t left) {
        if (i == 8) {
          cells[8] = 3 + left;
          evaluate(cells);
          return;
        }
        for (std::uint64_t x = 0; x <= left; ++x) {
          cells[i] = 3 + x;
          rec(i + 1, left - x);
        }
      };
      rec(0, extra_units);
    } else {
      // Uniform composition: choose 8 bar positions among extra_units + 8 slots.
      for (int sample = 0; sample < 200000; ++sample) {
        std::vector<std::uint64_t> slots(extra_units + 8);
        std::iota(slots.begin(), slots.end(), std::uint64_t{0});
        for (std::size_t i = 0; i < 8; ++i) {
          std::swap(slots[i], slots[i + rng.uniform_index(slots.size() - i)]);
        }
        std::vector<std::uint64_t> bars(slots.begin(), slots.begin() + 8);
        std::sort(bars.begin(), bars.end());
        std::uint64_t prev = 0;
        for (std::size_t i = 0; i < 8; ++i) {
          cells[i] = 3 + (bars[i] - prev - (i ? 1 : 0));
          prev = bars[i];
        }
        cells[8] = 3 + (extra_units + 8 - 1 - bars[7]);
        evaluate(cells);
      }
    }
    const auto e = acc.result();
    c.expect(e.max_diff <= 1, "multi strata population " + std::to_string(population) +
                                  " max_diff " + std::to_string(e.max_diff));
    char line[200];
    std::snprintf(line, sizeof line,
                  "    multi   P=%-4llu instances=%-8zu MSE=%.4f MSRE=%.4f max_diff=%llu\n",
                  static_cast<unsigned long long>(population), acc.instances(), e.mse, e.msre,
                  static_cast<unsigned long long>(e.max_diff));
    table << line;
  }
  extra = table.str();
  return {c.ok(), c.summary("single stratum max_diff <= 2 and MSRE < 0.05; "
                            "multi strata max_diff <= 1")};
}

// ---------------------------------------------------------------------------

Outcome randomness_suite(std::string& extra) {
  constexpr std::uint64_t kTrials = 40000;
  constexpr std::uint64_t kSeeds = 20;
  const auto fixtures = testing::randomness_fixtures();

  // (fixture, subject, criterion) -> seeds passing.
  std::map<std::string, int> positive;
  std::map<std::string, int> negative;
  std::string error;
  auto record = [](std::map<std::string, int>& tally, const std::string& id, bool pass) {
    tally[id] += pass ? 1 : 0;
  };

  try {
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      for (const auto& fx : fixtures) {
        const auto r1 = fx.r1();
        const auto r2 = fx.r2();
        const auto pk = fx.pk();
        for (const char* name : {"stratjoin_1n", "stratjoin_nn", "stratjoin_both",
                                 "stratjoin_overall"}) {
          const bool fk = std::string(name) == "stratjoin_1n";
          const auto stats = run_trials(parse_subject(name), r1, fk ? pk : r2,
                                        fk ? fx.f_1n : fx.f, kTrials, seed);
          const std::string id = fx.name + " " + name + " ";
          record(positive, id + "StRS_1", check_strs1(stats).pass);
          record(positive, id + "StRS_2", check_strs2(stats).pass);
          record(positive, id + "StRS_3", check_strs3(stats).pass);
        }
        for (const char* name : {"stream_sample", "srs_both"}) {
          const auto stats = run_trials(parse_subject(name), r1, r2, fx.f, kTrials, seed);
          record(positive, fx.name + " " + name + " multinomial",
                 check_multinomial(stats).pass);
        }
      }
      auto fixture = [&](const std::string& n) {
        for (const auto& fx : fixtures) {
          if (fx.name == n) return fx;
        }
        throw std::runtime_error("missing fixture " + n);
      };
      const auto f3 = fixture("F3");
      const auto f4 = fixture("F4");
      const auto f1 = fixture("F1");
      // A negative control "passes" the suite when its check fails.
      record(negative, "F3 biased_first StRS_2",
             !check_strs2(run_trials(parse_subject("biased_first"), f3.r1(), f3.r2(), f3.f,
                                     kTrials, seed))
                  .pass);
      record(negative, "F4 correlated_both StRS_3",
             !check_strs3(run_trials(parse_subject("correlated_both"), f4.r1(), f4.r2(), f4.f,
                                     kTrials, seed))
                  .pass);
      record(negative, "F1 stratjoin_nn multinomial",
             !check_multinomial(run_trials(parse_subject("stratjoin_nn"), f1.r1(), f1.r2(),
                                           f1.f, kTrials, seed))
                  .pass);
      record(negative, "F1 stream_sample StRS_1",
             !check_strs1(run_trials(parse_subject("stream_sample"), f1.r1(), f1.r2(), f1.f,
                                     kTrials, seed))
                  .pass);
    }
  } catch (const std::exception& e) {
    error = e.what();
  }
  if (!error.empty()) return {false, "error: " + error};

  Checker c;
  int min_positive = static_cast<int>(kSeeds);
  std::ostringstream table;
  for (const auto& [id, passed] : positive) {
    c.expect(passed >= 19, id + " passed " + std::to_string(passed) + "/20 seeds");
    min_positive = std::min(min_positive, passed);
    if (passed < static_cast<int>(kSeeds)) {
      table << "    " << id << ": " << passed << "/20 seeds\n";
    }
  }
  for (const auto& [id, failed] : negative) {
    c.expect(failed == static_cast<int>(kSeeds),
             id + " rejected in " + std::to_string(failed) + "/20 seeds");
    table << "    negative " << id << ": rejected " << failed << "/20 seeds\n";
  }
  extra = table.str();
  return {c.ok(), c.summary(std::to_string(positive.size()) +
                            " positive checks pass >= " + std::to_string(min_positive) +
                            "/20 seeds at T=40000; " + std::to_string(negative.size()) +
                            " negative controls rejected 20/20")};
}

// ---------------------------------------------------------------------------

Outcome inflation_guard(std::string& extra) {
  Checker c;
  RngHandle rng(2024);
  const double rates[] = {0.001, 0.01, 0.1, 0.5};
  std::uint64_t integral_cases = 0;
  std::uint64_t cases = 0;
  std::int64_t worst_excess = 0;
  std::string worst;
  for (int pair = 0; pair < 200; ++pair) {
    auto spec = [&](std::uint64_t seed) {
      ZipfSpec s;
      // Log-uniform sizes in [1k, 100k] and distinct keys in [10, n/10].
      s.n_tuples = static_cast<std::uint64_t>(std::llround(1000 * std::pow(100.0, rng.uniform_real())));
      const double max_keys = static_cast<double>(s.n_tuples) / 10;
      s.n_keys = static_cast<std::uint64_t>(std::llround(10 * std::pow(max_keys / 10, rng.uniform_real())));
      s.z = static_cast<double>(rng.uniform_index(4));
      s.seed = seed;
      return s;
    };
    const ZipfSpec left = spec(2 * pair);
    const ZipfSpec right = spec(2 * pair + 1);
    const auto ls = zipf_strata_sizes(left);
    const auto rs = zipf_strata_sizes(right);
    std::map<Key, StratumCounts> strata;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (ls[i]) strata[Key(static_cast<std::int64_t>(i + 1))].left = ls[i];
    }
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (rs[i]) strata[Key(static_cast<std::int64_t>(i + 1))].right = rs[i];
    }
    std::vector<std::pair<Key, StratumCounts>> counts(strata.begin(), strata.end());
    const auto prof = StrataProfile::from_counts(counts);
    for (double fv : rates) {
      const SamplingRate f(fv);
      ++cases;
      const auto overall = overall_account(prof, f);
      const auto stream = stream_sample_account(prof, f);
      const std::string id = "pair " + std::to_string(pair) + " f=" + std::to_string(fv);
      c.expect(overall.total() <= overall.no_sampling, id + " exceeds |R1|+|R2|");
      c.expect(overall.total() <= stream.total(),
               id + " overall " + std::to_string(overall.total()) + " > stream_sample " +
                   std::to_string(stream.total()));
      const auto excess = static_cast<std::int64_t>(overall.total()) -
                          static_cast<std::int64_t>(stream.total());
      if (excess > worst_excess) {
        worst_excess = excess;
        worst = id;
      }
      bool integral = true;
      for (const auto& [key, sc] : prof.strata) integral = integral && f.integral(sc.left, sc.right);
      if (integral) {
        ++integral_cases;
        c.expect(savings(prof, f) == static_cast<double>(overall.savings()),
                 id + " savings identity");
      }
    }
  }
  c.expect(integral_cases > 0, "no case had integral targets");
  std::ostringstream os;
  os << "    " << cases << " (pair, f) cases, " << integral_cases
     << " with integral targets checked against savings()\n";
  if (worst_excess > 0) {
    os << "    largest overall - stream_sample excess: " << worst_excess << " (" << worst << ")\n";
  }
  extra = os.str();
  return {c.ok(), c.summary("overall <= |R1|+|R2| and <= stream_sample in all " +
                            std::to_string(cases) + " cases; savings identity holds")};
}

// ---------------------------------------------------------------------------

Outcome mini_join_contract() {
  Checker c;
  {
    StrataDraws s1;
    StrataDraws s2;
    s1[k("a")] = DrawSet{{0, 1}, false};
    s1[k("b")] = DrawSet{{2, 3, 4, 5, 6}, false};
    s2[k("a")] = DrawSet{{0, 1, 2}, false};
    s2[k("b")] = DrawSet{{3, 4, 5}, false};
    const auto out = mini_join(s1, s2, RngHandle(42));
    c.expect(out.count(k("a")) == 2 && out.count(k("b")) == 3, "worked example (a:2, b:3)");
  }
  RngHandle rng(7);
  for (int sample = 0; sample < 1000; ++sample) {
    StrataDraws s1;
    StrataDraws s2;
    const std::uint64_t keys = 1 + rng.uniform_index(6);
    for (std::uint64_t key = 0; key < keys; ++key) {
      const Key kk(static_cast<std::int64_t>(key));
      // Some strata exist on one side only.
      const bool on_left = rng.uniform_index(8) != 0;
      const bool on_right = rng.uniform_index(8) != 0;
      const std::uint64_t pop1 = 1 + rng.uniform_index(10);
      const std::uint64_t pop2 = 1 + rng.uniform_index(10);
      auto draw = [&](std::uint64_t pop) {
        DrawSet d{{}, true};
        const std::uint64_t n = rng.uniform_index(25);
        for (std::uint64_t i = 0; i < n; ++i) {
          d.tuple_ids.push_back(static_cast<TupleId>(100 * key + rng.uniform_index(pop)));
        }
        return d;
      };
      if (on_left) s1[kk] = draw(pop1);
      if (on_right) s2[kk] = draw(pop2);
    }
    const auto out = mini_join(s1, s2, rng.derive(sample));
    const std::string id = "sample " + std::to_string(sample);
    for (const auto& [key, left] : s1) {
      const auto it = s2.find(key);
      const std::uint64_t expected = it == s2.end() ? 0 : std::min(left.size(), it->second.size());
      c.expect(out.count(key) == expected, id + " stratum count");
    }
    for (const auto& [key, tuples] : out.strata) {
      c.expect(s1.count(key) && s2.count(key), id + " stratum on one side only");
      if (!s1.count(key) || !s2.count(key)) continue;
      // Each output position consumes one input position: per-id multiplicity
      // in the output never exceeds that in the input.
      std::multiset<TupleId> l(s1.at(key).tuple_ids.begin(), s1.at(key).tuple_ids.end());
      std::multiset<TupleId> r(s2.at(key).tuple_ids.begin(), s2.at(key).tuple_ids.end());
      for (const auto& t : tuples) {
        auto li = l.find(t.left_id);
        auto ri = r.find(t.right_id);
        c.expect(li != l.end() && ri != r.end(), id + " position reused");
        if (li != l.end()) l.erase(li);
        if (ri != r.end()) r.erase(ri);
        c.expect(t.key == key, id + " key");
      }
    }
  }
  return {c.ok(), c.summary("worked example (a:2, b:3); 1000 fuzzed pairs give min counts "
                            "with no reused positions")};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism(std::string& extra) {
  Checker c;
  const fs::path dir = fs::temp_directory_path() / ("stratjoin_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = STRATJOIN_CLI;
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  auto run = [&](const std::string& args, const std::string& out) {
    const std::string cmd = cli + " " + args + " --out " + out + " 2>" + p("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  {
    std::ofstream(p("m.txt")) << "10 5\n20 15\n";
    std::ofstream(p("plan.json")) << "[[4,2],[8,6]]";
    // Small pair for verify: strata (a:2, b:5) and (a:3, b:3).
    std::ofstream small_left(p("v1.csv"));
    small_left << "RID,JoinKey\n";
    for (int i = 0; i < 7; ++i) small_left << i << "," << (i < 2 ? "a" : "b") << "\n";
    std::ofstream small_right(p("v2.csv"));
    small_right << "RID,JoinKey\n";
    for (int i = 0; i < 6; ++i) small_right << i << "," << (i < 3 ? "a" : "b") << "\n";
  }
  c.expect(run("gen --tuples 2000 --z 1 --keys 50 --seed 3", p("l.csv")), "gen left");
  c.expect(run("gen --tuples 1500 --z 2 --keys 40 --seed 4", p("r.csv")), "gen right");
  const std::string pair = p("l.csv") + " " + p("r.csv");
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen", "gen --tuples 5000 --z 1.5 --keys 100 --seed 9"},
      {"stats", "stats " + pair},
      {"sample_overall", "sample " + pair + " --algo stratjoin_overall -f 0.01 --seed 5"},
      {"sample_stream", "sample " + pair + " --algo stream_sample -f 0.0001 --seed 5"},
      {"plan", "plan " + pair + " -f 0.001 -f 0.1"},
      {"allocate", "allocate " + p("m.txt") + " -k 20 --brute-force"},
      {"uc", "uc " + p("m.txt") + " " + p("plan.json")},
      {"verify", "verify " + p("v1.csv") + " " + p("v2.csv") +
                     " -f 1/3 --algo stratjoin_both --trials 2000 --format json"},
      {"bench", "bench --left " + p("l.csv") + " --right " + p("r.csv") +
                    " -f 0.001 -f 0.01 --trials 2 --format csv --seed 8"},
      {"bench_gen", "bench --tuples 3000 --z 2 --keys 60 -f 0.01 --format json --seed 8"},
  };
  int compared = 0;
  for (const auto& [name, args] : commands) {
    const bool a = run(args, p(name + ".1"));
    const bool b = run(args, p(name + ".2"));
    c.expect(a && b, name + " exited nonzero: " + slurp(p("stderr.txt")));
    c.expect(slurp(p(name + ".1")) == slurp(p(name + ".2")), name + " output differs");
    c.expect(!slurp(p(name + ".1")).empty(), name + " output empty");
    ++compared;
  }
  // The report command re-reads a bench file.
  c.expect(run("report " + p("bench.1") + " --from csv --format json", p("report.1")) &&
               run("report " + p("bench.1") + " --from csv --format json", p("report.2")),
           "report exited nonzero");
  c.expect(slurp(p("report.1")) == slurp(p("report.2")), "report output differs");
  ++compared;
  // The sample account file too.
  const std::string acc = "sample " + pair + " --algo stratjoin_both -f 0.01 --account ";
  c.expect(run(acc + p("acc.1"), p("s.1")) && run(acc + p("acc.2"), p("s.2")),
           "sample with account exited nonzero");
  c.expect(slurp(p("acc.1")) == slurp(p("acc.2")), "account output differs");
  ++compared;
  // A different seed must change sampled output, or the comparison is vacuous.
  c.expect(run("sample " + pair + " --algo stratjoin_overall -f 0.01 --seed 6", p("seed6")) &&
               slurp(p("seed6")) != slurp(p("sample_overall.1")),
           "seed has no effect");
  extra = "    " + std::to_string(compared) + " command outputs compared byte for byte\n";
  fs::remove_all(dir);
  return {c.ok(), c.summary("gen, stats, sample, plan, allocate, uc, verify, bench, report "
                            "byte-identical across reruns")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double cap_seconds;
    std::function<Outcome(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "sample-size accounts under inflation", 1, [](std::string&) { return inflation_table(); }},
      {2, "possible-sample counts, single stratum", 1,
       [](std::string&) { return possible_samples_table(); }},
      {3, "two-strata allocation example", 5, [](std::string&) { return two_strata_example(); }},
      {4, "allocation error bounds", 600, allocation_sweeps},
      {5, "randomness property suite", 600, randomness_suite},
      {6, "minimality and inflation guard", 300, inflation_guard},
      {7, "mini-join contract", 30, [](std::string&) { return mini_join_contract(); }},
      {8, "CLI determinism", 60, cli_determinism},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    std::string extra;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run(extra);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > cr.cap_seconds) {
      o.pass = false;
      o.detail += "; runtime over the " + std::to_string(static_cast<int>(cr.cap_seconds)) +
                  " s cap";
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %d %s: %s (%.2f s) %s\n", cr.id, cr.name, o.pass ? "PASS" : "FAIL",
                secs, o.detail.c_str());
    std::fputs(extra.c_str(), stdout);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}

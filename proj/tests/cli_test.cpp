#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "harness.hpp"

using namespace growthlab::cli;

namespace {

std::string csv_of(const ExperimentConfig& cfg) {
  std::ostringstream out;
  write_csv(run_experiment(cfg), out);
  return out.str();
}

ExperimentConfig valid(const std::string& text) {
  auto v = validate_config(text);
  std::string all;
  for (const auto& e : v.errors) all += e + "; ";
  EXPECT_TRUE(v.config.has_value()) << all;
  return v.config.value_or(ExperimentConfig{});
}

std::vector<std::vector<std::string>> cells(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (!line.empty() && line.back() == ',') row.emplace_back();
    out.push_back(row);
  }
  return out;
}

bool has_error(const Validation& v, const std::string& needle) {
  for (const auto& e : v.errors) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

class TempDir {
 public:
  TempDir() : path_(std::filesystem::temp_directory_path() / ("growthlab_cli_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::filesystem::path file(const std::string& name, const std::string& contents = {}) const {
    const auto p = path_ / name;
    if (!contents.empty()) std::ofstream(p) << contents;
    return p;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

int run_cli(const std::string& args, const std::filesystem::path& err) {
  const std::string cmd = std::string(GROWTHLAB_CLI_PATH) + " " + args + " > /dev/null 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kMeasure = R"(
[run]
scenario = measure
label = squares
seed = 7
[params]
eps = 0.5
[inputs]
family = family(additive, x, x^2, range(0, 9))
A = ap(0, 1, n)
sizes = 20,40,80
)";

}  // namespace

TEST(ParseSpec, CallsAndLiterals) {
  const Spec s = parse_spec("family(additive, x^2 + 1, (x+1)^3, ap(0, 1/2, 5))");
  EXPECT_TRUE(s.call);
  EXPECT_EQ(s.name, "family");
  EXPECT_EQ(s.args, (std::vector<std::string>{"additive", "x^2 + 1", "(x+1)^3", "ap(0, 1/2, 5)"}));
  const Spec lit = parse_spec("(x+1)^2");
  EXPECT_FALSE(lit.call);
  EXPECT_FALSE(parse_spec("f(x)+1").call);
  EXPECT_THROW(parse_spec("ap(1, 2"), std::invalid_argument);
}

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.5, 1.0 / 3.0, 1e-300, 2.935552377e9, -0.1, 1.0 / 12.0}) {
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(32), "32");
}

TEST(ValidateConfig, MinimalMeasure) {
  const auto v = validate_config("[run]\nscenario = measure\n[inputs]\nfamily = x^2\nA = range(1, 10)\n");
  ASSERT_TRUE(v.config) << (v.errors.empty() ? "" : v.errors.front());
  EXPECT_EQ(v.config->scenario, Scenario::measure);
  EXPECT_EQ(v.config->label, "measure");
  EXPECT_EQ(v.config->threads, 1u);
}

TEST(ValidateConfig, EpsRange) {
  const auto v = validate_config("[run]\nscenario = measure\n[params]\neps = 0\n[inputs]\nfamily = x^2\nA = range(1, 10)\n");
  EXPECT_FALSE(v.config);
  EXPECT_TRUE(has_error(v, "eps must be in (0,1)"));
  EXPECT_TRUE(validate_config("[run]\nscenario = bounds\n[params]\neps = 1\n").config);
  EXPECT_FALSE(validate_config("[run]\nscenario = bounds\n[params]\neps = 1.5\n").config);
}

TEST(ValidateConfig, AccumulatesErrors) {
  const auto v = validate_config("[run]\nscenario = measure\nthreads = 0\n[params]\neps = 2\nbogus = 1\n[inputs]\nA = range(1, 10)\n");
  EXPECT_FALSE(v.config);
  EXPECT_GE(v.errors.size(), 4u);
  EXPECT_TRUE(has_error(v, "eps must be in (0,1)"));
  EXPECT_TRUE(has_error(v, "threads"));
  EXPECT_TRUE(has_error(v, "bogus"));
  EXPECT_TRUE(has_error(v, "exactly one of 'family' or 'poly'"));
}

TEST(ValidateConfig, MissingFileIsNamed) {
  const auto v = validate_config("[run]\nscenario = measure\n[inputs]\nfamily = file(no/such/family.txt)\nA = range(1, 3)\n",
                                 std::nullopt, "/tmp");
  EXPECT_FALSE(v.config);
  EXPECT_TRUE(has_error(v, "/tmp/no/such/family.txt"));
}

TEST(ValidateConfig, ScenarioMismatchAndPlaceholder) {
  EXPECT_FALSE(validate_config("[run]\nscenario = tower\n", Scenario::bounds).config);
  EXPECT_TRUE(validate_config("[inputs]\nns = 1-4\n", Scenario::tower).config);
  const auto v = validate_config("[run]\nscenario = measure\n[inputs]\nfamily = x^2\nA = ap(0, 1, n)\n");
  EXPECT_TRUE(has_error(v, "placeholder n"));
  EXPECT_TRUE(has_error(validate_config("[run]\nscenario = decompose\n[inputs]\npoly = x^^2\n"), "poly"));
}

TEST(RunExperiment, BoundsRow) {
  const auto cfg = valid("[run]\nscenario = bounds\n[params]\neps = 1\nm = 1\nc_prime = 1\n");
  const auto rep = run_experiment(cfg);
  bool found = false;
  for (const auto& r : rep.rows) {
    if (r.label == "bounds/eta_unbalanced") {
      found = true;
      EXPECT_EQ(r.value, "0.5");
    }
  }
  EXPECT_TRUE(found);
  bool echoed = false;
  for (const auto& line : rep.summary) echoed = echoed || line.find("c=1 c'=1") != std::string::npos;
  EXPECT_TRUE(echoed);
}

TEST(RunExperiment, TowerImage) {
  const auto rep = run_experiment(valid("[run]\nscenario = tower\n[inputs]\nns = 16\n"));
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].image, "32");
  EXPECT_EQ(rep.rows[0].n, 16u);
}

TEST(RunExperiment, MeasureSortedWithFit) {
  const auto rows = cells(csv_of(valid(kMeasure)));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][0], "scenario");
  EXPECT_EQ(rows[0].size(), 11u);
  EXPECT_EQ(rows[1][2], "20");
  EXPECT_EQ(rows[2][2], "40");
  EXPECT_EQ(rows[3][2], "80");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 11u);
    EXPECT_EQ(rows[i][3], "10");
    // image of {(t + a)^2} over 0..n-1 with a in 0..9 is the squares 0..(n+8)^2
    EXPECT_EQ(rows[i][4], std::to_string(std::stoul(rows[i][2]) + 9));
    for (std::size_t c : {7u, 8u, 9u}) {
      ASSERT_FALSE(rows[i][c].empty());
      EXPECT_EQ(format_double(std::strtod(rows[i][c].c_str(), nullptr)), rows[i][c]);
    }
  }
}

TEST(RunExperiment, IdenticalAcrossThreadsAndRuns) {
  ExperimentConfig cfg = valid(R"(
[run]
scenario = measure
seed = 3
[inputs]
poly = x^2 + x*y0 + y0^2
A = random(-50, 50, n)
sizes = 30,60
)");
  const std::string one = csv_of(cfg);
  EXPECT_EQ(one, csv_of(cfg));
  cfg.threads = 4;
  EXPECT_EQ(one, csv_of(cfg));
  cfg.seed = 4;
  EXPECT_NE(one, csv_of(cfg));
}

TEST(RunExperiment, OtherScenarios) {
  auto incidence = run_experiment(valid(
      "[run]\nscenario = incidence\n[inputs]\nsurface = x + d\nA = range(1, 10)\nD = range(1, 10)\nB = range(1, 20)\n"));
  ASSERT_EQ(incidence.rows.size(), 1u);
  EXPECT_EQ(incidence.rows[0].incidence, "100");

  auto classify = run_experiment(valid("[run]\nscenario = classify\n[inputs]\nfamily = list(x^2, (x+1)^2, x^3)\n"));
  ASSERT_FALSE(classify.rows.empty());
  EXPECT_EQ(classify.rows[0].label, "classify/additive");
  EXPECT_EQ(classify.rows[0].value, "2");

  auto detect = run_experiment(valid("[run]\nscenario = decompose\n[inputs]\npoly = (x + y0^2)^3 + 1\n"));
  ASSERT_EQ(detect.rows.size(), 1u);
  EXPECT_EQ(detect.rows[0].label, "decompose/additive");

  auto uni = run_experiment(valid("[run]\nscenario = decompose\n[inputs]\npoly = (x^2 + x)^2\n"));
  ASSERT_EQ(uni.rows.size(), 1u);
  EXPECT_EQ(uni.rows[0].n, 2u);

  auto stab = run_experiment(valid("[run]\nscenario = stab\n[params]\nn = 3\n[inputs]\naction = psl2(5)\n"));
  std::uint64_t nontrivial = 0;
  for (const auto& r : stab.rows) {
    if (*r.n > 1) nontrivial += std::stoull(r.value);
  }
  EXPECT_EQ(nontrivial, 96u);

  auto span = run_experiment(valid("[run]\nscenario = span\n[inputs]\nNs = 256\nks = 1-3\n"));
  ASSERT_EQ(span.rows.size(), 3u);
  EXPECT_EQ(span.rows[2].image, "194937");

  auto bsg = run_experiment(
      valid("[run]\nscenario = bsg\n[inputs]\naction = cyclic(10007)\nS = range(0, 99)\nA = range(0, 999)\n"));
  ASSERT_EQ(bsg.rows.size(), 1u);
  EXPECT_LT(std::strtod(bsg.rows[0].value.c_str(), nullptr), 0.3);

  auto construct = run_experiment(valid("[run]\nscenario = construct\n[inputs]\ngenerator = gp(1, 2, 5)\n"));
  ASSERT_EQ(construct.artifacts.size(), 1u);
  EXPECT_EQ(construct.artifacts[0].second, "1\n2\n4\n8\n16\n");
}

TEST(Cli, ExitCodesAndOutputs) {
  TempDir dir;
  const auto err = dir.path() / "stderr.txt";
  const auto out = dir.path() / "tower.csv";

  const auto tower = dir.file("tower.cfg", "[run]\nscenario = tower\n[inputs]\nns = 1-4,16\n");
  EXPECT_EQ(run_cli("tower --config " + tower.string() + " --out " + out.string(), err), 0);
  const auto rows = cells(slurp(out));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows.back()[4], "32");
  EXPECT_NE(slurp(out.string() + ".summary").find("|F*A| = 32"), std::string::npos);

  const auto missing = dir.file("missing.cfg",
                                "[run]\nscenario = measure\n[inputs]\nfamily = file(absent.txt)\nA = range(1, 3)\n");
  EXPECT_EQ(run_cli("measure --config " + missing.string(), err), 2);
  EXPECT_NE(slurp(err).find((dir.path() / "absent.txt").string()), std::string::npos);

  EXPECT_EQ(run_cli("measure --config " + (dir.path() / "nope.cfg").string(), err), 2);
  EXPECT_EQ(run_cli("bounds --config " + tower.string(), err), 2);

  const auto budget = dir.file("span.cfg", "[run]\nscenario = span\n[params]\nbudget = 100\n[inputs]\nNs = 256\n");
  EXPECT_EQ(run_cli("span --config " + budget.string() + " --out " + (dir.path() / "span.csv").string(), err), 3);

  const auto dry_out = dir.path() / "dry.csv";
  const auto measure = dir.file("measure.cfg", kMeasure);
  EXPECT_EQ(run_cli("measure --dry-run --config " + measure.string() + " --out " + dry_out.string(), err), 0);
  EXPECT_FALSE(std::filesystem::exists(dry_out));

  const auto a = dir.path() / "a.csv";
  const auto b = dir.path() / "b.csv";
  EXPECT_EQ(run_cli("measure --config " + measure.string() + " --threads 1 --out " + a.string(), err), 0);
  EXPECT_EQ(run_cli("measure --config " + measure.string() + " --threads 3 --seed 7 --out " + b.string(), err), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a.string() + ".summary").find("xi=|A|"), std::string::npos);
}

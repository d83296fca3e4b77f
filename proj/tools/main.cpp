#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "growthlab/errors.hpp"
#include "harness.hpp"

namespace cli = growthlab::cli;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool dry_run = false;
};

int run(cli::Scenario scenario, const Options& opts) {
  std::ifstream in(opts.config);
  if (!in) {
    std::cerr << "error: config file not found: " << opts.config << '\n';
    return cli::invalid_config;
  }
  std::stringstream text;
  text << in.rdbuf();
  const auto base = std::filesystem::path(opts.config).parent_path();
  auto v = cli::validate_config(text.str(), scenario, base.empty() ? std::filesystem::path(".") : base);
  if (opts.threads && *opts.threads == 0) v.errors.push_back("--threads must be at least 1");
  if (!v.errors.empty()) {
    for (const auto& e : v.errors) std::cerr << "error: " << e << '\n';
    return cli::invalid_config;
  }
  cli::ExperimentConfig cfg = *v.config;
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.threads) cfg.threads = *opts.threads;
  const std::string out = opts.out.empty() ? cli::to_string(scenario) + ".csv" : opts.out;

  if (opts.dry_run) {
    for (const auto& line : cli::plan(cfg)) std::cout << line << '\n';
    std::cout << "would write " << out << " and " << out << ".summary\n";
    return cli::ok;
  }

  cli::Report report;
  try {
    report = cli::run_experiment(cfg);
  } catch (const growthlab::BudgetExceeded& e) {
    std::cerr << "error: budget exceeded: " << e.what() << '\n';
    return cli::budget_exceeded;
  } catch (const cli::InvariantViolation& e) {
    std::cerr << "error: invariant violation: " << e.what() << '\n';
    return cli::invariant_violation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::invalid_config;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::invalid_config;
  } catch (const std::exception& e) {
    std::cerr << "error: internal failure: " << e.what() << '\n';
    return cli::invariant_violation;
  }

  std::ofstream csv(out);
  if (!csv) {
    std::cerr << "error: cannot write " << out << '\n';
    return cli::invalid_config;
  }
  cli::write_csv(report, csv);
  std::ofstream summary(out + ".summary");
  for (const auto& line : report.summary) {
    std::cout << line << '\n';
    summary << line << '\n';
  }
  for (const auto& [suffix, contents] : report.artifacts) std::ofstream(out + suffix) << contents;
  return cli::ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Growth and expansion experiments over exact arithmetic"};
  app.require_subcommand(1);
  Options opts;
  std::optional<cli::Scenario> chosen;
  for (const auto& name : cli::scenario_names()) {
    auto* sub = app.add_subcommand(name, "Run the " + name + " scenario");
    sub->add_option("--config", opts.config, "Experiment config file")->required();
    sub->add_option("--out", opts.out, "CSV output path (summary goes to <out>.summary)");
    sub->add_option("--seed", opts.seed, "Override the config seed");
    sub->add_option("--threads", opts.threads, "Worker threads for counting");
    sub->add_flag("--dry-run", opts.dry_run, "Validate and print the plan without computing");
    sub->callback([&chosen, name] { chosen = cli::scenario_from(name); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::invalid_config;
  }
  return run(*chosen, opts);
}

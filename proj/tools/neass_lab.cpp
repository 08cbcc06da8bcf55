// neass_lab: command-line driver for the NEASS experiments.
//
// Exit codes: 0 pass, 2 acceptance failure, 1 error.

#include "neass/experiments.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

struct CommonOptions {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "experiment config file")->required()->check(CLI::ExistingFile);
  app->add_option("--out", o.out, "output directory")->capture_default_str();
  app->add_option("--seed", o.seed, "seed for random panels")->capture_default_str();
  app->add_option("--threads", o.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

struct Context {
  neass::ExperimentSetup setup;
  neass::RunMetadata meta;
  std::filesystem::path out;
};

Context prepare(const CommonOptions& o) {
  Context c;
  c.setup = neass::load_setup(neass::Config::load(o.config));
  c.meta.hash = neass::metadata_hash(c.setup.canonical_config, o.seed);
  c.out = o.out;
  std::filesystem::create_directories(c.out);
  return c;
}

void write(const Context& c, const neass::Table& t) {
  const auto path = (c.out / (t.name + ".csv")).string();
  neass::export_csv(t, path, c.meta);
  std::cout << "wrote " << path << " (" << t.rows.size() << " rows)\n";
}

int verdict(bool pass, const std::string& what) {
  std::cout << (pass ? "PASS " : "FAIL ") << what << '\n';
  return pass ? 0 : 2;
}

int model_check(const CommonOptions& o) {
  const Context c = prepare(o);
  const auto report = neass::model_check(c.setup, o.threads);
  write(c, report.gaps);
  write(c, report.summary);
  return verdict(report.pass, report.uniform_gap ? "uniform gap" : (report.bulk_gap ? "bulk gap" : "gap"));
}

int neass_build(const CommonOptions& o) {
  const Context c = prepare(o);
  const auto report = neass::neass_build(c.setup, o.seed, o.threads);
  write(c, report.residuals);
  for (const auto& g : report.generators) {
    const auto path = (c.out / ("generator_n" + std::to_string(g.order) + ".txt")).string();
    std::ofstream f(path);
    if (!f) throw neass::Error(neass::ErrorCode::IoFailure, "cannot open " + path);
    neass::write_generator_dump(f, g);
    std::cout << "wrote " << path << '\n';
  }
  return verdict(report.pass, "order-by-order stationarity");
}

int sweep_defect(const CommonOptions& o) {
  const Context c = prepare(o);
  const auto records = neass::run_defect_sweep(c.setup, o.seed, o.threads);
  write(c, neass::defect_table(records));
  const auto checks = neass::check_defect_scaling(c.setup, records);
  write(c, neass::scaling_table(checks));
  bool pass = !checks.empty();
  for (const auto& ch : checks) {
    std::cout << "  n=" << ch.n << ' ' << ch.observable << ' ' << ch.axis << "-slope " << ch.fit.slope << " (expected "
              << ch.expected << " +- " << ch.tolerance << ")" << (ch.note.empty() ? "" : " " + ch.note) << '\n';
    pass = pass && ch.pass;
  }
  for (const auto& r : records) {
    if (!r.error.empty()) {
      std::cout << "  error at n=" << r.n << " eps=" << r.eps << " eta=" << r.eta << ": " << r.error << '\n';
      pass = false;
    }
  }
  return verdict(pass, "defect scaling");
}

int sweep_lifetime(const CommonOptions& o) {
  const Context c = prepare(o);
  const auto records = neass::lifetime_experiment(c.setup, o.seed, o.threads);
  write(c, neass::lifetime_table(records));
  const auto checks = neass::check_lifetime(c.setup, records);
  write(c, neass::lifetime_check_table(checks));
  bool pass = !checks.empty();
  for (const auto& ch : checks) {
    std::cout << "  n=" << ch.n << ' ' << ch.observable << " eps-slope " << ch.eps_fit.slope << ", s-exponent "
              << ch.s_fit.slope << (ch.note.empty() ? "" : " " + ch.note) << '\n';
    pass = pass && ch.eps_pass && ch.s_pass;
  }
  return verdict(pass, "lifetime");
}

int tdl(const CommonOptions& o) {
  const Context c = prepare(o);
  const auto records = neass::tdl_convergence_experiment(c.setup, o.seed, o.threads);
  write(c, neass::tdl_table(records));
  return verdict(neass::tdl_monotone(records), "ground-state differences decrease with k");
}

int norms(const CommonOptions& o) {
  const Context c = prepare(o);
  write(c, neass::norms_table(c.setup));
  return verdict(true, "norms");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super-adiabatic NEASS construction and adiabatic-defect experiments"};
  app.require_subcommand(1);

  CommonOptions opts;
  int (*action)(const CommonOptions&) = nullptr;

  auto* model = app.add_subcommand("model", "model diagnostics");
  model->require_subcommand(1);
  auto* check = model->add_subcommand("check", "gap scan, bulk gap, Lipschitz constants");
  add_common(check, opts);
  check->callback([&] { action = model_check; });

  auto* neass_cmd = app.add_subcommand("neass", "generator construction");
  neass_cmd->require_subcommand(1);
  auto* build = neass_cmd->add_subcommand("build", "build and certify the generators, write dumps");
  add_common(build, opts);
  build->callback([&] { action = neass_build; });

  auto* sweep = app.add_subcommand("sweep", "parameter sweeps");
  sweep->require_subcommand(1);
  auto* defect = sweep->add_subcommand("defect", "adiabatic defect over the eps/eta grid");
  add_common(defect, opts);
  defect->callback([&] { action = sweep_defect; });
  auto* lifetime = sweep->add_subcommand("lifetime", "NEASS drift under the static perturbed dynamics");
  add_common(lifetime, opts);
  lifetime->callback([&] { action = sweep_lifetime; });

  auto* tdl_cmd = app.add_subcommand("tdl", "finite-size convergence of central observables");
  add_common(tdl_cmd, opts);
  tdl_cmd->callback([&] { action = tdl; });

  auto* norms_cmd = app.add_subcommand("norms", "interaction norm tables");
  add_common(norms_cmd, opts);
  norms_cmd->callback([&] { action = norms; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return action(opts);
  } catch (const neass::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == neass::ErrorCode::ResidualTooLarge ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

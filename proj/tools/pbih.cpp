#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "pbih/errors.hpp"
#include "pbih/run.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pbih::ConfigError(0, "cannot open config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual checks for p-biharmonic hypersurfaces"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string out_path;
  std::string format_name = "json";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string filter;
  int workers = pbih::default_workers();
  bool list = false;

  app.add_flag("--list-builtins", list, "List built-in configurations and search families");
  for (const char* name : {"check", "verify", "search", "convergence"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Config file");
    sub->add_option("--out", out_path, "Report path (default stdout)");
    sub->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--tol", tol, "Residual tolerance");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--filter", filter, "Acceptance check name, id or tag (verify)");
    sub->add_flag("--list-builtins", list, "List built-in configurations and search families");
  }
  CLI11_PARSE(app, argc, argv);

  if (list) {
    std::cout << pbih::builtins_listing();
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return 2;
  }
  const std::string mode = app.get_subcommands().front()->get_name();

  pbih::RunConfig config;
  pbih::Report report;
  try {
    if (!config_path.empty()) {
      config = pbih::parse_config(read_file(config_path));
    } else if (mode != "verify") {
      throw pbih::ConfigError(0, mode + " needs --config");
    }
    if (mode == "check") config.mode = pbih::Mode::check;
    if (mode == "verify") config.mode = pbih::Mode::verify;
    if (mode == "search") config.mode = pbih::Mode::search;
    if (mode == "convergence") config.mode = pbih::Mode::convergence;
    if (tol) {
      if (config.mode == pbih::Mode::verify)
        config.verify_tolerance = *tol;
      else
        config.tolerance = *tol;
    }
    if (seed) config.seed = *seed;
    if (!filter.empty()) config.filter = filter;
    config.validate();

    const pbih::RunOptions options{workers};
    switch (config.mode) {
      case pbih::Mode::check: report = pbih::run_check(config, options); break;
      case pbih::Mode::convergence: report = pbih::run_convergence(config, options); break;
      case pbih::Mode::search: report = pbih::run_search(config, options); break;
      case pbih::Mode::verify:
        report = pbih::run_verify(config, options, [&](const pbih::CheckOutcome& o) {
          (out_path.empty() ? std::cerr : std::cout) << pbih::format_outcome(o) << std::endl;
        });
        break;
    }
  } catch (const pbih::Error& e) {
    std::cerr << "pbih: " << e.what() << "\n";
    return 2;
  }

  const std::string text = report.render(format_name == "csv" ? pbih::Format::csv : pbih::Format::json);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "pbih: cannot write '" << out_path << "'\n";
      return 2;
    }
    out << text;
  }
  return report.exit_code;
}

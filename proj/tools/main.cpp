// Command-line front end: subcommands select a task family from a JSON
// config; reports are canonical JSON (byte-identical for identical config
// and seed) or CSV. Exit 0: all residuals in tolerance; 1: violation
// (worst witness in the report); 2: config error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "runner.hpp"

namespace {

int emit(const excal::tool::RunOutcome& outcome, const std::string& out_path) {
  if (outcome.exit_code == 2) {
    std::cerr << outcome.report << "\n";
    return 2;
  }
  if (out_path.empty()) {
    std::cout << outcome.report;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "config error: cannot write " << out_path << "\n";
      return 2;
    }
    out << outcome.report;
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exterior-calculus identity and surface-measure runner"};
  app.require_subcommand(1);

  std::string config_path, format = "json", out_path;
  excal::tool::RunOptions opt;
  std::uint64_t seed = 0;
  int points = 0;
  double tol = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config path")->required();
    sub->add_option("--seed", seed, "RNG seed (overrides config and EXCAL_SEED)");
    sub->add_option("--points", points, "sample points per identity check");
    sub->add_option("--tol", tol, "tolerance override for every task");
    sub->add_option("--format", format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_path, "write the report here instead of stdout");
  };
  for (const char* name : {"check", "div", "weakdiv", "surface", "theorem2",
                           "restriction", "all"})
    add_common(app.add_subcommand(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  opt.mode = sub->get_name() == "all" ? "" : sub->get_name();
  opt.format = format;
  if (sub->count("--seed") > 0) {
    opt.seed = seed;
  } else if (const char* env = std::getenv("EXCAL_SEED")) {
    opt.seed = std::strtoull(env, nullptr, 10);
  }
  if (sub->count("--points") > 0) opt.points = points;
  if (sub->count("--tol") > 0) opt.tol = tol;

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "config error: cannot read " << config_path << "\n";
    return 2;
  }
  std::ostringstream text;
  text << in.rdbuf();

  return emit(excal::tool::run_config(text.str(), opt), out_path);
}

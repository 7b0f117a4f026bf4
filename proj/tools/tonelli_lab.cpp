// tonelli-lab: experiment runner for the Tonelli catalogue.
//
//   tonelli-lab <task> --config cfg.json [overrides] [--output out.json] [--csv out.csv]
//   tonelli-lab compare --a report_a.json --b report_b.json [--tol 1e-9] [--tolerances t.json]
//
// Exit codes: 0 ok, 1 config/schema error, 2 numeric failure, 3 hypothesis violated.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tonelli/report.hpp"

using tonelli::Json;

namespace {

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tonelli::ConfigError("cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& ex) {
    throw tonelli::ConfigError(path + ": " + ex.what());
  }
  return doc;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw tonelli::ConfigError("cannot write " + path);
  out << text;
}

struct TaskArgs {
  std::string config_path, output_path, csv_path;
  std::string model, method;
  double step = 0;
  std::vector<std::string> overrides;  // key=json fragments merged into params
};

int run_one(const std::string& task, const TaskArgs& args) {
  Json cfg = args.config_path.empty() ? Json::object() : load_json(args.config_path);
  cfg["task"] = task;
  if (!args.model.empty()) cfg["hamiltonian"]["name"] = args.model;
  if (!args.method.empty()) cfg["integrator"]["method"] = args.method;
  if (args.step > 0) cfg["integrator"]["h"] = args.step;
  for (const std::string& ov : args.overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw tonelli::ConfigError("override must look like key=value: " + ov);
    const std::string key = ov.substr(0, eq);
    try {
      cfg["params"][key] = Json::parse(ov.substr(eq + 1));
    } catch (const Json::parse_error&) {
      cfg["params"][key] = ov.substr(eq + 1);  // bare string value
    }
  }
  std::string output = args.output_path;
  if (cfg.contains("output")) {
    if (output.empty()) output = cfg.at("output").get<std::string>();
  }
  const tonelli::RunConfig rc = tonelli::RunConfig::from_json(cfg);
  const tonelli::RunReport report = tonelli::run_task(rc);
  const std::string text = report.document.dump(2) + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    write_file(output, text);
  }
  if (!args.csv_path.empty()) write_file(args.csv_path, tonelli::report_csv(report.document));
  return report.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for Tonelli Hamiltonians on the torus"};
  app.require_subcommand(1);

  const std::vector<std::string> tasks{"flow",     "minimize", "torus-periodic",
                                       "green",    "lyapunov", "kam",
                                       "alpha",    "foliation", "acceptance"};
  std::map<std::string, TaskArgs> args;
  for (const std::string& task : tasks) {
    TaskArgs& a = args[task];
    CLI::App* sub = app.add_subcommand(task);
    sub->add_option("--config", a.config_path, "JSON experiment config");
    sub->add_option("--output", a.output_path, "report path (default stdout)");
    sub->add_option("--csv", a.csv_path, "flattened CSV export path");
    sub->add_option("--hamiltonian", a.model, "catalogue model override");
    sub->add_option("--method", a.method, "integrator override (auto|verlet|midpoint)");
    sub->add_option("--step", a.step, "integrator step override")
        ->check(CLI::PositiveNumber);
    sub->add_option("--set", a.overrides, "task parameter override key=value")
        ->take_all();
  }

  std::string cmp_a, cmp_b, cmp_tols;
  double cmp_tol = 1e-9;
  CLI::App* cmp = app.add_subcommand("compare", "fieldwise diff of two reports");
  cmp->add_option("--a", cmp_a, "first report")->required();
  cmp->add_option("--b", cmp_b, "second report")->required();
  cmp->add_option("--tol", cmp_tol, "default numeric tolerance");
  cmp->add_option("--tolerances", cmp_tols, "JSON map of per-field tolerances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // bad flags are config errors
  }

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "compare") {
      const Json tols = cmp_tols.empty() ? Json::object() : load_json(cmp_tols);
      const Json diff =
          tonelli::compare_reports(load_json(cmp_a), load_json(cmp_b), cmp_tol, tols);
      std::cout << diff.dump(2) << "\n";
      return diff.at("identical").get<bool>() ? 0 : 2;
    }
    return run_one(sub, args.at(sub));
  } catch (const tonelli::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 1;
  } catch (const tonelli::HypothesisViolated& ex) {
    std::cerr << "hypothesis violated: " << ex.what() << "\n";
    return 3;
  } catch (const Json::exception& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 1;
  } catch (const tonelli::NumericError& ex) {
    std::cerr << "numeric error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
}

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sflow/experiments.hpp"

namespace {

int run_command(const std::string& config, const std::string& template_name, const std::string& out) {
  std::optional<sflow::ExperimentConfig> cfg;
  try {
    if (!template_name.empty()) {
      const auto t = sflow::find_template(template_name);
      if (!t) {
        std::cerr << "unknown template '" << template_name << "' (see `sflow list`)\n";
        return 1;
      }
      cfg = sflow::ExperimentConfig::from_json(t->config, std::filesystem::current_path(), "template:" + template_name);
    } else {
      cfg = sflow::ExperimentConfig::load(config);
    }
  } catch (const sflow::InvalidArgument& e) {
    std::cout << "input error: " << e.what() << '\n';
    return 1;
  }
  std::optional<std::filesystem::path> dir;
  if (!out.empty()) dir = out;
  const auto r = sflow::run(*cfg, dir);
  std::cout << r.summary << '\n';
  return r.status;
}

int validate_command(const std::string& config) {
  try {
    const auto cfg = sflow::ExperimentConfig::load(config);
    sflow::validate(cfg);
    std::cout << config << ": ok (" << cfg.kind() << ")\n";
    return 0;
  } catch (const std::exception& e) {
    std::cout << "input error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Suspension-flow thermodynamic formalism experiments"};
  app.require_subcommand(1);

  std::string config, template_name, out;
  auto* run = app.add_subcommand("run", "run an experiment config; exit 0 pass, 2 tolerance failure, 1 input error");
  run->add_option("config", config, "config JSON file");
  run->add_option("--template", template_name, "run a bundled template instead of a file");
  run->add_option("--out", out, "output directory (overrides the config)");

  bool as_json = false;
  auto* list = app.add_subcommand("list", "list bundled experiment templates");
  list->add_flag("--json", as_json, "print the templates as JSON");

  std::string to_check;
  auto* validate = app.add_subcommand("validate", "check a config and its inputs without running it");
  validate->add_option("config", to_check, "config JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    if (config.empty() == template_name.empty()) {
      std::cerr << "run: give exactly one of <config> or --template\n";
      return 1;
    }
    return run_command(config, template_name, out);
  }
  if (*list) {
    if (as_json) {
      sflow::json all = sflow::json::array();
      for (const auto& t : sflow::list_experiments())
        all.push_back({{"name", t.name}, {"description", t.description}, {"anchor", t.anchor}, {"schema", t.schema}, {"config", t.config}});
      std::cout << all.dump(2) << '\n';
    } else {
      for (const auto& t : sflow::list_experiments())
        std::cout << t.name << "  " << t.description << "  [" << t.anchor << "]  -> " << t.schema << '\n';
    }
    return 0;
  }
  return validate_command(to_check);
}

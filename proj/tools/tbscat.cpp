// Command line driver: runs pipeline stages from a configuration file.
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical
// failure, 1 anything else (I/O).

#include <CLI11.hpp>
#include <iostream>

#include "tbscat/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace tbscat;
  CLI::App app{"Three-body scattering: explicit field, correction solve and diagnostics"};
  std::string config_path;
  std::string out_dir = "out";
  std::string stage = "all";
  std::string bc;
  unsigned threads = 0;
  app.add_option("--config", config_path, "configuration file (key = value)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--stage", stage, "stage to run when no subcommand is given: pair|field|mesh|solve|diagnose|all")
      ->capture_default_str();
  app.add_option("--bc", bc, "boundary condition override")->check(CLI::IsMember({"plain", "corrected"}));
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.require_subcommand(0, 1);
  for (const char* name : {"pair", "field", "mesh", "solve", "diagnose", "all"})
    app.add_subcommand(name, std::string("run the ") + name + " stage and its prerequisites")->fallthrough();
  app.add_subcommand("describe", "print the sector fan, windows and pair coefficients")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    set_thread_count(threads);
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (!bc.empty()) cfg.bc = parse_bc(bc);
    Pipeline pipeline(cfg, out_dir);
    std::string command = stage;
    if (!app.get_subcommands().empty()) command = app.get_subcommands().front()->get_name();
    if (command == "describe") {
      std::cout << pipeline.describe();
      return 0;
    }
    pipeline.run(parse_stage(command));
    for (const StageRecord& r : pipeline.records())
      std::cout << r.name << ": " << r.seconds << " s" << (r.cached ? " (cached)" : "") << "\n";
    std::cout << "artifacts in " << pipeline.out_dir().string() << ", config " << pipeline.hash() << "\n";
    return 0;
  } catch (const ConfigInvalid& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// laglad: run verification campaigns from ini configs.
//
//   laglad run <config> [--seed N] [--replications N] [--out DIR] [--workers N]
//   laglad list-identities
//   laglad dump-scenario <config> [--seed N]
//   laglad tree <file.json>
//
// Exit status: 0 all identities pass, 1 an identity failed (or a scenario
// failed), 2 configuration error. LAGLAD_OUT_DIR sets the default output
// directory when neither --out nor the config names one.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "laglad/errors.hpp"
#include "laglad/experiment.hpp"
#include "laglad/tree_io.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw laglad::Error(laglad::ErrorCode::ConfigInvalid, "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optional semimartingale identity checks"};
  app.require_subcommand(1);

  std::string config_path, out_dir, tree_path;
  std::uint64_t seed = 0;
  std::size_t replications = 0;
  int workers = 0;

  CLI::App* run = app.add_subcommand("run", "run the identities listed in a config");
  run->add_option("config", config_path, "ini config")->required();
  CLI::Option* seed_opt = run->add_option("--seed", seed, "master seed (overrides the config)");
  CLI::Option* reps_opt = run->add_option("--replications", replications, "replications (overrides the config)");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--workers", workers, "OpenMP worker count (0 = default)");

  app.add_subcommand("list-identities", "print every registered identity");

  CLI::App* dump = app.add_subcommand("dump-scenario", "print replication 0 of the configured scenario");
  dump->add_option("config", config_path, "ini config")->required();
  CLI::Option* dump_seed = dump->add_option("--seed", seed, "master seed (overrides the config)");

  CLI::App* tree = app.add_subcommand("tree", "multiplicative system and constructed time of a JSON tree");
  tree->add_option("file", tree_path, "tree JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand("list-identities")) {
      for (const laglad::IdentityInfo& id : laglad::identity_catalog()) {
        std::cout << id.name << "\t" << id.anchor << "\t[";
        for (std::size_t i = 0; i < id.scenarios.size(); ++i)
          std::cout << (i ? " " : "") << laglad::to_string(id.scenarios[i]);
        std::cout << "]\n";
      }
      return 0;
    }

    if (app.got_subcommand("tree")) {
      const laglad::TreeInput in = laglad::parse_tree_json(slurp(tree_path));
      nlohmann::json j = in.b ? laglad::tree_report_json(laglad::construct_time(in.tree, *in.b))
                              : laglad::tree_report_json(laglad::build_mult_system(in.tree, *in.x));
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    laglad::ExperimentConfig cfg = laglad::load_config(config_path);
    if (*seed_opt || *dump_seed) cfg.master_seed = seed;

    if (app.got_subcommand("dump-scenario")) {
      std::cout << laglad::dump_scenario(cfg);
      return 0;
    }

    if (*reps_opt) cfg.replications = replications;
    cfg.workers = workers;
    if (!out_dir.empty()) {
      cfg.out_dir = out_dir;
    } else if (cfg.out_dir.empty()) {
      const char* env = std::getenv("LAGLAD_OUT_DIR");
      cfg.out_dir = env != nullptr && *env != '\0' ? env : "laglad_out";
    }
    laglad::validate(cfg);

    const auto start = std::chrono::steady_clock::now();
    const laglad::ExperimentReport rep = laglad::run(cfg);
    laglad::write_report(rep, cfg.out_dir);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::cout << laglad::report_csv(rep);
    std::cerr << "wrote " << cfg.out_dir.string() << " in " << secs << " s\n";
    return rep.all_pass() ? 0 : 1;
  } catch (const laglad::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == laglad::ErrorCode::ConfigInvalid ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

// Benchmark harness: runs the three experiments and writes CSV/JSON results.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qkla/bench/experiments.hpp"
#include "qkla/bench/result.hpp"

#ifndef QKLA_GIT_DESCRIBE
#define QKLA_GIT_DESCRIBE "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qkla::bench;

namespace {

struct Options {
  std::optional<std::uint64_t> seed;
  std::string out_dir = "results";
  std::optional<std::size_t> trials;
  std::vector<double> tau_grid;
  std::optional<double> L;
  std::optional<std::size_t> shots;
  std::optional<unsigned> threads;
  std::string format = "csv";
  std::optional<std::string> config_path;
  std::optional<std::string> synthetic_net;
  std::size_t replicates = 0;
};

void print_error(const std::string& kind, const std::string& message) {
  json err{{"error", kind}, {"message", message}};
  std::cerr << err.dump() << std::endl;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed config file " + path + ": " + e.what());
  }
}

// Config file < command-line flags.
template <typename Config>
Config build_config(const json& file, const char* section, const Options& opt) {
  Config c;
  if (file.contains("seed")) c.seed = file.at("seed").get<std::uint64_t>();
  if (file.contains("threads")) c.threads = file.at("threads").get<unsigned>();
  if (file.contains(section)) from_json(file.at(section), c);
  if (opt.seed) c.seed = *opt.seed;
  if (opt.trials) c.trials = *opt.trials;
  if (opt.L) c.L = *opt.L;
  if (opt.shots) c.shots = *opt.shots;
  if (opt.threads) c.threads = *opt.threads;
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<std::string> write_result(const ExperimentResult& r, const Options& opt) {
  std::vector<std::string> files;
  const fs::path dir(opt.out_dir);
  if (opt.format == "json") {
    const fs::path p = dir / (r.experiment + ".json");
    write_file(p, to_json(r).dump(2) + "\n");
    files.push_back(p.filename().string());
  } else {
    for (const Table& t : r.tables) {
      const fs::path p = dir / (t.name + ".csv");
      write_file(p, to_csv(t));
      files.push_back(p.filename().string());
    }
    // Slopes and scalar metrics travel in a small JSON sidecar.
    json extra{{"experiment", r.experiment},
               {"seed", r.seed},
               {"fitted_slopes", r.fitted_slopes},
               {"metrics", r.metrics},
               {"notes", r.notes}};
    const fs::path p = dir / (r.experiment + "_summary.json");
    write_file(p, extra.dump(2) + "\n");
    files.push_back(p.filename().string());
  }
  return files;
}

void print_summary(const ExperimentResult& r) {
  std::printf("== %s (seed %llu, %.2f s)\n", r.experiment.c_str(), static_cast<unsigned long long>(r.seed),
              r.runtime_seconds);
  for (const auto& [k, v] : r.fitted_slopes) std::printf("  slope %-22s %.4f\n", k.c_str(), v);
  for (const auto& [k, v] : r.metrics) std::printf("  %-28s %.6g\n", k.c_str(), v);
  const Table& t = r.experiment == "exp2"   ? r.table("exp2_queries")
                   : r.experiment == "exp3" ? r.table("exp3_summary")
                                            : r.tables.back();
  std::printf("  -- %s\n  ", t.name.c_str());
  for (const auto& c : t.columns) std::printf("%s  ", c.c_str());
  std::printf("\n");
  for (const auto& row : t.rows) {
    std::printf("  ");
    for (const auto& v : row) {
      const std::string s = format_value(v);
      std::printf("%s  ", s.empty() ? "-" : s.c_str());
    }
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QKLA simulation and benchmark harness"};
  app.require_subcommand(1);
  Options opt;

  app.add_option("--seed", opt.seed, "Master seed (default 11)");
  app.add_option("--out-dir", opt.out_dir, "Output directory")->capture_default_str();
  app.add_option("--trials", opt.trials,
                 "Trials per cell (exp1: median estimates per t; exp2: per budget; exp3: PC runs)");
  app.add_option("--tau-grid", opt.tau_grid, "Comma-separated tau values (exp2 table, exp3 grid)")
      ->delimiter(',');
  app.add_option("--L", opt.L, "Clip bound in bits");
  app.add_option("--shots", opt.shots, "Median shots per QAE estimate");
  app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--config", opt.config_path, "JSON config file with optional exp1/exp2/exp3 sections")
      ->check(CLI::ExistingFile);
  app.add_option("--synthetic-net", opt.synthetic_net, "Pinned Synthetic-12 network JSON (exp3)")
      ->check(CLI::ExistingFile);

  auto* exp1 = app.add_subcommand("exp1", "Gate-level QAE phase distributions and error decay")->fallthrough();
  auto* exp2 = app.add_subcommand("exp2", "Classical vs quantum MI estimation scaling")->fallthrough();
  exp2->add_option("--replicates", opt.replicates,
                   "Also rerun on this many independent instance draws and report medians");
  auto* exp3 = app.add_subcommand("exp3", "PC skeleton recovery with classical and quantum CI tests")->fallthrough();
  auto* all = app.add_subcommand("all", "Run exp1, exp2 and exp3")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    const auto wall_start = std::chrono::steady_clock::now();
    const json file = opt.config_path ? load_config(*opt.config_path) : json::object();
    fs::create_directories(opt.out_dir);

    const bool run1 = exp1->parsed() || all->parsed();
    const bool run2 = exp2->parsed() || all->parsed();
    const bool run3 = exp3->parsed() || all->parsed();

    json manifest{{"tool", "qkla_bench"},
                  {"schema_version", kSchemaVersion},
                  {"git_describe", QKLA_GIT_DESCRIBE},
                  {"format", opt.format},
                  {"experiments", json::array()}};

    auto record = [&](const ExperimentResult& r) {
      const auto files = write_result(r, opt);
      manifest["experiments"].push_back({{"experiment", r.experiment},
                                         {"seed", r.seed},
                                         {"config", r.config},
                                         {"runtime_seconds", r.runtime_seconds},
                                         {"files", files}});
      print_summary(r);
    };

    if (run1) record(run_exp1(build_config<Exp1Config>(file, "exp1", opt)));
    if (run2) {
      auto c = build_config<Exp2Config>(file, "exp2", opt);
      if (!opt.tau_grid.empty()) c.tau_grid = opt.tau_grid;
      record(run_exp2(c));
      if (opt.replicates > 0) record(run_exp2_replicates(c, opt.replicates));
    }
    if (run3) {
      auto c = build_config<Exp3Config>(file, "exp3", opt);
      if (!opt.tau_grid.empty()) c.tau_grid = opt.tau_grid;
      if (opt.synthetic_net) c.synthetic_net_path = *opt.synthetic_net;
      record(run_exp3(c));
    }

    manifest["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    write_file(fs::path(opt.out_dir) / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return 1;
  }
  return 0;
}

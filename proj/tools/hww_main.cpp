// Command-line driver: configure a run, compute or load the reference
// solution, and write per-step CSVs, a summary CSV, and a metadata echo.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hww/driver.hpp"
#include "hww/reference.hpp"

namespace {

// Key = value configuration file mirroring the RunConfig field names.
bool apply_config_file(const std::string& path, hww::RunConfig& config,
                       std::string& error) {
  std::ifstream in(path);
  if (!in) {
    error = "cannot open config file: " + path;
    return false;
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        error = "line " + std::to_string(line_no) + ": expected key = value";
        return false;
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "mode") {
        const auto mode = hww::mode_from_string(value);
        if (!mode) throw std::invalid_argument("unknown mode '" + value + "'");
        config.mode = *mode;
      } else if (key == "histories_per_step") config.histories_per_step = std::stoull(value);
      else if (key == "theta") config.theta = std::stod(value);
      else if (key == "rho") config.rho = std::stod(value);
      else if (key == "eps_min") config.eps_min = std::stod(value);
      else if (key == "u_ww") config.u_ww = std::stoi(value);
      else if (key == "update_fractions") {
        config.update_fractions.clear();
        std::stringstream ss(value);
        std::string tok;
        while (std::getline(ss, tok, ',')) config.update_fractions.push_back(std::stod(tok));
      }
      else if (key == "ma_base_k") config.ma_base_k = std::stoi(value);
      else if (key == "fourier_cutoff") config.fourier_cutoff = std::stoi(value);
      else if (key == "batches") config.batches = std::stoi(value);
      else if (key == "seed") config.seed = std::stoull(value);
      else if (key == "target_population") config.target_population = std::stoull(value);
      else if (key == "comb_overflow_factor") config.comb_overflow_factor = std::stod(value);
      else if (key == "source_x0") config.source.x0 = std::stod(value);
      else if (key == "source_strength") config.source.strength = std::stod(value);
      else if (key == "sigma_t") config.material.sigma_t = std::stod(value);
      else if (key == "sigma_s") config.material.sigma_s = std::stod(value);
      else if (key == "sigma_f") config.material.sigma_f = std::stod(value);
      else if (key == "nu_f") config.material.nu_f = std::stod(value);
      else if (key == "speed") config.material.speed = std::stod(value);
      else if (key == "x_min") config.x_min = std::stod(value);
      else if (key == "x_max") config.x_max = std::stod(value);
      else if (key == "cells") config.cells = std::stoi(value);
      else if (key == "t_end") config.t_end = std::stod(value);
      else if (key == "time_steps") config.time_steps = std::stoi(value);
      else if (key == "reference") config.reference = value;
      else if (key == "out_dir") config.out_dir = value;
      else if (key == "threads") config.threads = std::stoi(value);
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::exception& e) {
      error = "line " + std::to_string(line_no) + ": " + std::string(e.what());
      return false;
    }
  }
  return true;
}

std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  hww::RunConfig config = hww::RunConfig::benchmark();

  // File values load first; command-line flags override them below.
  if (const std::string config_path = find_config_arg(argc, argv);
      !config_path.empty()) {
    std::string error;
    if (!apply_config_file(config_path, config, error)) {
      std::cerr << "error: " << error << "\n";
      return 1;
    }
  }

  CLI::App app{
      "Time-dependent slab-geometry Monte Carlo transport with hybrid "
      "weight windows"};

  std::string config_path_opt;
  std::string mode_name = to_string(config.mode);
  std::string filter_name;
  bool dry_run = false;
  int ref_space_refine = 5, ref_time_refine = 20, ref_sn_order = 16;

  app.add_option("--config", config_path_opt, "key = value configuration file");
  app.add_option("--mode", mode_name,
                 "run mode: analog | lww | hww | hww_ma | hww_fourier")
      ->capture_default_str();
  app.add_option("--histories", config.histories_per_step,
                 "source histories per time step")
      ->capture_default_str();
  app.add_option("--seed", config.seed, "random seed")->capture_default_str();
  app.add_option("--rho", config.rho, "weight-window width parameter (>= 1)")
      ->capture_default_str();
  app.add_option("--eps-min", config.eps_min, "minimum window center in (0,1)")
      ->capture_default_str();
  app.add_option("--u-ww", config.u_ww, "mid-step window updates per step")
      ->capture_default_str();
  app.add_option("--fractions", config.update_fractions,
                 "update fractions, e.g. 0.25,0.5,0.75")
      ->delimiter(',');
  app.add_option("--theta", config.theta,
                 "time integration weight: 1 backward Euler, 0.5 Crank-Nicolson")
      ->capture_default_str();
  app.add_option("--filter", filter_name,
                 "closure filter: none | ma | fourier (switches the hww mode)");
  app.add_option("--ma-k", config.ma_base_k, "moving-average half width")
      ->capture_default_str();
  app.add_option("--fourier-cutoff", config.fourier_cutoff,
                 "Fourier low-pass cutoff index")
      ->capture_default_str();
  app.add_option("--target-pop", config.target_population,
                 "comb target population (0: histories per step)")
      ->capture_default_str();
  app.add_option("--comb-overflow", config.comb_overflow_factor,
                 "comb only when the bank exceeds this multiple of the target")
      ->capture_default_str();
  app.add_option("--batches", config.batches, "statistical batches per step")
      ->capture_default_str();
  app.add_option("--reference", config.reference,
                 "reference solution: 'auto', a file path, or '' for none")
      ->capture_default_str();
  app.add_option("--out", config.out_dir, "output directory");
  app.add_option("--threads", config.threads, "worker threads (0: runtime default)")
      ->capture_default_str();
  app.add_option("--cells", config.cells, "spatial cells")->capture_default_str();
  app.add_option("--time-steps", config.time_steps, "time steps")
      ->capture_default_str();
  app.add_option("--t-end", config.t_end, "end time [s]")->capture_default_str();
  app.add_option("--ref-refine-space", ref_space_refine,
                 "reference oracle spatial refinement")
      ->capture_default_str();
  app.add_option("--ref-refine-time", ref_time_refine,
                 "reference oracle temporal refinement")
      ->capture_default_str();
  app.add_option("--ref-sn-order", ref_sn_order, "reference quadrature order")
      ->capture_default_str();
  app.add_flag("--dry-run", dry_run, "validate the configuration and print the plan");

  CLI11_PARSE(app, argc, argv);

  // A bare --u-ww derives the evenly spaced fractions p/(u_ww+1).
  if (app.count("--u-ww") && !app.count("--fractions")) {
    config.update_fractions.clear();
    for (int p = 1; p <= config.u_ww; ++p)
      config.update_fractions.push_back(static_cast<double>(p) / (config.u_ww + 1));
  }

  if (app.count("--mode")) {
    const auto mode = hww::mode_from_string(mode_name);
    if (!mode) {
      std::cerr << "error: unknown mode '" << mode_name << "'\n";
      return 1;
    }
    config.mode = *mode;
  }
  if (app.count("--filter")) {
    if (filter_name == "none") {
      if (config.uses_hybrid_windows()) config.mode = hww::Mode::hww;
    } else if (filter_name == "ma") {
      config.mode = hww::Mode::hww_ma;
    } else if (filter_name == "fourier") {
      config.mode = hww::Mode::hww_fourier;
    } else {
      std::cerr << "error: unknown filter '" << filter_name << "'\n";
      return 1;
    }
  }

  const auto violations = hww::validate_config(config);
  if (!violations.empty()) {
    std::cerr << "invalid configuration:\n";
    for (const auto& v : violations) std::cerr << "  - " << v << "\n";
    return 1;
  }

  if (dry_run) {
    std::cout << "mode: " << to_string(config.mode) << "\n"
              << "histories per step: " << config.histories_per_step << "\n"
              << "time steps: " << config.time_steps << " (t_end " << config.t_end
              << " s)\n"
              << "mesh: " << config.cells << " cells on [" << config.x_min << ", "
              << config.x_max << "]\n"
              << "windows: rho " << config.rho << ", eps_min " << config.eps_min
              << ", updates " << config.u_ww << "\n"
              << "theta: " << config.theta << ", batches: " << config.batches
              << ", seed: " << config.seed << "\n"
              << "reference: " << (config.reference.empty() ? "(none)" : config.reference)
              << "\n"
              << "output: " << (config.out_dir.empty() ? "(none)" : config.out_dir)
              << "\n";
    return 0;
  }

  try {
    std::optional<hww::ReferenceSolution> reference;
    if (config.reference == "auto") {
      std::cerr << "computing reference solution..." << std::endl;
      reference = hww::compute_reference(config, ref_space_refine, ref_time_refine,
                                         ref_sn_order);
      if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        hww::save_reference(*reference,
                            (std::filesystem::path(config.out_dir) / "reference.csv")
                                .string());
      }
    } else if (!config.reference.empty()) {
      reference = hww::load_reference(config.reference, config.make_mesh(),
                                      config.make_time_grid());
    }

    const hww::RunRecord record =
        hww::run(config, reference ? &*reference : nullptr);

    std::cerr << "completed " << record.steps.size() << " steps in "
              << record.total_seconds << " s\n";
    if (!record.steps.empty() && reference) {
      const auto& last = record.steps.back().metrics;
      std::cerr << "final relative L2 error: " << last.rel_l2_error << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

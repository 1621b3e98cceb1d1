// Copyright 2026 The cpgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cpgate command-line driver. All command logic lives in cpgate/cli.hpp;
// this file only wires argument parsing to those functions and maps
// exceptions onto the documented exit codes.

#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "cpgate/cli.hpp"
#include "cpgate/lindblad.hpp"

namespace {

namespace cli = cpgate::cli;

using CommandFn = std::function<int(const cli::RunConfig&, std::ostream&)>;

// Flag values shared across subcommands; "unset" sentinels let a config
// file supply defaults that explicit flags then override.
struct FlagValues {
  std::string config_path;
  bool no_timestamp = false;
  int n = -1;
  int jobs = -1;
  int photon_cutoff = -1;
  std::string output;
  std::string json_output;
  bool toffoli = false;
  bool no_noise = false;
};

void add_n_flag(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--n", flags.n, "number of controlled qubits");
}

void add_output_flags(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--output", flags.output, "CSV artifact path");
  cmd->add_option("--json-output", flags.json_output, "JSON artifact path");
}

void add_sweep_flags(CLI::App* cmd, FlagValues& flags) {
  add_n_flag(cmd, flags);
  add_output_flags(cmd, flags);
  cmd->add_option("--jobs", flags.jobs, "sweep worker threads");
  cmd->add_option("--photon-cutoff", flags.photon_cutoff,
                  "cavity truncation level");
  cmd->add_flag("--no-noise", flags.no_noise,
                "drop the decoherence channels (coherent run)");
}

/// Builds the effective RunConfig: config file first, flags override.
cli::RunConfig build_config(const FlagValues& flags, const CLI::App* cmd) {
  cli::RunConfig cfg;
  if (!flags.config_path.empty())
    cfg = cli::parse_config_file(flags.config_path);
  cfg.no_timestamp = flags.no_timestamp;

  const auto given = [&](const std::string& name) {
    return cmd->get_option_no_throw(name) != nullptr &&
           cmd->count(name) > 0;
  };
  if (given("--n")) {
    if (flags.n < 2 || flags.n > 12)
      throw cli::ConfigError("--n must be in [2, 12]");
    cfg.n = flags.n;
  }
  if (given("--jobs")) {
    if (flags.jobs < 1) throw cli::ConfigError("--jobs must be >= 1");
    cfg.jobs = flags.jobs;
  }
  if (given("--photon-cutoff")) {
    if (flags.photon_cutoff < 1 || flags.photon_cutoff > 4)
      throw cli::ConfigError("--photon-cutoff must be in [1, 4]");
    cfg.photon_cutoff = flags.photon_cutoff;
  }
  if (given("--output")) cfg.output_csv = flags.output;
  if (given("--json-output")) cfg.output_json = flags.json_output;
  if (given("--toffoli")) cfg.toffoli = flags.toffoli;
  if (given("--no-noise") && flags.no_noise) cfg.include_noise = false;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cpgate: multiplexed controlled-phase gate compiler and simulator"};
  app.require_subcommand(1);

  FlagValues flags;
  app.add_option("--config", flags.config_path, "JSON config file");
  app.add_flag("--no-timestamp", flags.no_timestamp,
               "write '0' in place of generation timestamps");

  CLI::App* verify = app.add_subcommand(
      "ideal-verify", "check the compiled gate against its truth table");
  add_n_flag(verify, flags);
  verify->add_flag("--toffoli", flags.toffoli,
                   "verify the basis-changed variant");

  CLI::App* table = app.add_subcommand(
      "truth-table", "print the exact truth table of the compiled gate");
  add_n_flag(table, flags);
  table->add_flag("--toffoli", flags.toffoli,
                  "tabulate the basis-changed variant");
  add_output_flags(table, flags);

  CLI::App* timing =
      app.add_subcommand("timing", "closed-form gate timing budget");
  add_n_flag(timing, flags);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "one master-equation run with per-segment diagnostics");
  add_sweep_flags(simulate, flags);

  CLI::App* sweep_dt = app.add_subcommand(
      "sweep-dt", "fidelity sweep over the timing-error grid");
  add_sweep_flags(sweep_dt, flags);

  CLI::App* sweep_c = app.add_subcommand(
      "sweep-c", "fidelity sweep over the coupling-ratio grid");
  add_sweep_flags(sweep_c, flags);

  CLI::App* sweep_2d = app.add_subcommand(
      "sweep-2d", "fidelity sweep over the full (timing, coupling) grid");
  add_sweep_flags(sweep_2d, flags);

  CLI::App* atom = app.add_subcommand(
      "atom-variant", "timing and truth table of the shuttled-atom variant");

  CLI::App* convergence = app.add_subcommand(
      "convergence-check",
      "compare center-point fidelity at photon cutoff vs cutoff+1");
  add_n_flag(convergence, flags);
  convergence->add_option("--photon-cutoff", flags.photon_cutoff,
                          "base cavity truncation level");

  const std::vector<std::pair<CLI::App*, CommandFn>> dispatch = {
      {verify, cli::cmd_ideal_verify},
      {table, cli::cmd_truth_table},
      {timing, cli::cmd_timing},
      {simulate, cli::cmd_simulate},
      {sweep_dt, cli::cmd_sweep_dt},
      {sweep_c, cli::cmd_sweep_c},
      {sweep_2d, cli::cmd_sweep_2d},
      {atom, cli::cmd_atom_variant},
      {convergence, cli::cmd_convergence_check},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitConfigError;
  }

  try {
    for (const auto& [cmd, fn] : dispatch) {
      if (cmd->parsed()) {
        const cli::RunConfig cfg = build_config(flags, cmd);
        return fn(cfg, std::cout);
      }
    }
    std::cerr << "error: no command selected\n";
    return cli::kExitConfigError;
  } catch (const cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitConfigError;
  } catch (const cpgate::lindblad::NumericalAbort& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return cli::kExitNumericalAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitNumericalAbort;
  }
}

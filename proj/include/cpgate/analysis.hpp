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

#pragma once

// Gate-level observables and parameter sweeps.
//
// The sweep machinery is split from the physics: a sweep walks a (dt, c)
// grid and calls an evaluator per point. The production evaluator compiles
// the schedule at coupling ratio c, perturbs every interaction segment by
// dt, integrates the master equation, and scores the final state against
// the ideal gate output. Tests inject cheap evaluators instead, so the grid
// bookkeeping, ordering, error capture, and serialization are all checked
// without paying for integrations.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cpgate/hamiltonian.hpp"
#include "cpgate/hilbert.hpp"
#include "cpgate/lindblad.hpp"
#include "cpgate/schedule.hpp"

namespace cpgate::analysis {

using hilbert::Complex;
using hilbert::DensityMatrix;
using hilbert::StateVector;
using hilbert::SystemLayout;
using hamiltonian::PhysicalParams;

namespace detail {

/// True when the basis index is a computational component: every work
/// qutrit in {0, 1}, ancilla and all cavities in the ground state.
inline bool is_computational(const hilbert::SpaceDescriptor& space,
                             long index) {
  const auto& layout = space.layout;
  for (int l = 1; l <= layout.work_qutrit_count; ++l)
    if (space.level_of(index, hilbert::SubsystemId::work(l)) > 1) return false;
  if (layout.ancilla_present &&
      space.level_of(index, hilbert::SubsystemId::ancilla()) != 0)
    return false;
  for (int l = 1; l <= layout.cavity_count; ++l)
    if (space.level_of(index, hilbert::SubsystemId::cavity(l)) != 0)
      return false;
  return true;
}

/// Uniform superposition of all 2^n computational components (any n).
inline StateVector uniform_input(const SystemLayout& layout) {
  const auto space = hilbert::build_space(layout);
  const int n = layout.work_qutrit_count;
  StateVector psi = StateVector::Zero(space.total_dim);
  std::vector<int> labels(space.subsystem_count(), 0);
  for (long mask = 0; mask < (1L << n); ++mask) {
    for (int l = 0; l < n; ++l) labels[l] = (mask >> (n - 1 - l)) & 1;
    psi += hilbert::basis_state(labels, layout);
  }
  psi /= std::sqrt(static_cast<double>(1L << n));
  return psi;
}

}  // namespace detail

/// Uniform superposition over all 2^n computational components for any
/// layout (ancilla and cavities in the ground state).
inline StateVector uniform_gate_input(const SystemLayout& layout) {
  if (layout.work_qutrit_count < 1)
    throw std::invalid_argument("uniform_gate_input: no work qutrits");
  return detail::uniform_input(layout);
}

/// The benchmark input: the uniform superposition of the eight three-qubit
/// components, ancilla and cavities in the ground state. Requires the
/// standard three-qubit layout.
inline StateVector gate_input_state(const SystemLayout& layout) {
  if (layout.work_qutrit_count != 3)
    throw std::invalid_argument(
        "gate_input_state: defined for the three-qubit layout");
  if (!layout.ancilla_present)
    throw std::invalid_argument("gate_input_state: ancilla required");
  return detail::uniform_input(layout);
}

/// What the perfect gate does to a computational-sector state: the
/// all-ones component flips sign, everything else is untouched. Errors if
/// the input has weight outside the computational sector.
inline StateVector ideal_output_state(const StateVector& input,
                                      const SystemLayout& layout) {
  const auto space = hilbert::build_space(layout);
  if (input.size() != space.total_dim)
    throw std::invalid_argument("ideal_output_state: dimension mismatch");
  StateVector out = input;
  for (long idx = 0; idx < space.total_dim; ++idx) {
    if (std::abs(input(idx)) <= 1e-12) continue;
    if (!detail::is_computational(space, idx))
      throw std::invalid_argument(
          "ideal_output_state: input has weight outside the computational "
          "sector at index " + std::to_string(idx));
    bool all_ones = true;
    for (int l = 1; l <= layout.work_qutrit_count && all_ones; ++l)
      all_ones = space.level_of(idx, hilbert::SubsystemId::work(l)) == 1;
    if (all_ones) out(idx) = -input(idx);
  }
  return out;
}

/// Fidelity between a density matrix and a pure target:
/// F = sqrt(<psi| rho |psi>). Tiny negative overlaps from roundoff clamp
/// to zero.
inline double fidelity(const DensityMatrix& rho, const StateVector& psi) {
  if (rho.rows() != psi.size() || rho.cols() != psi.size())
    throw std::invalid_argument("fidelity: dimension mismatch");
  const Complex overlap = (psi.adjoint() * (rho * psi))(0, 0);
  double p = overlap.real();
  if (p < -1e-9)
    throw std::invalid_argument("fidelity: overlap " + std::to_string(p) +
                                " is not a probability");
  p = std::min(std::max(p, 0.0), 1.0);
  return std::sqrt(p);
}

/// One row of a gate truth table.
struct TruthTableRow {
  std::vector<int> bits;   ///< input component, qubit 1 first
  Complex coefficient;     ///< amplitude on the expected output component
  double leakage = 0.0;    ///< norm of everything else in the output
};

using GateApplier = std::function<StateVector(const StateVector&)>;
using ExpectedBits = std::function<std::vector<int>(std::vector<int>)>;

/// Applies the gate to every computational basis component and reports the
/// amplitude on the expected output component plus the leftover norm. For a
/// phase gate the expected component is the input itself (default); a
/// controlled-NOT style gate passes the component permutation instead.
inline std::vector<TruthTableRow> truth_table(
    const GateApplier& apply, const SystemLayout& layout,
    const ExpectedBits& expected = {}) {
  const auto space = hilbert::build_space(layout);
  const int n = layout.work_qutrit_count;
  std::vector<TruthTableRow> rows;
  rows.reserve(1L << n);
  std::vector<int> labels(space.subsystem_count(), 0);
  for (long mask = 0; mask < (1L << n); ++mask) {
    TruthTableRow row;
    row.bits.resize(n);
    for (int l = 0; l < n; ++l) row.bits[l] = (mask >> (n - 1 - l)) & 1;

    for (int l = 0; l < n; ++l) labels[l] = row.bits[l];
    for (std::size_t k = n; k < labels.size(); ++k) labels[k] = 0;
    const StateVector input = hilbert::basis_state(labels, layout);
    const StateVector output = apply(input);

    std::vector<int> out_bits = expected ? expected(row.bits) : row.bits;
    for (int l = 0; l < n; ++l) labels[l] = out_bits[l];
    const long target = hilbert::basis_index(labels, layout);

    row.coefficient = output(target);
    StateVector rest = output;
    rest(target) = 0.0;
    row.leakage = rest.norm();
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Sweeps

/// Result of evaluating one (dt, c) grid point.
struct SweepPoint {
  double dt = 0.0;        ///< timing error (s)
  double c = 1.0;         ///< coupling ratio
  double fidelity = std::numeric_limits<double>::quiet_NaN();
  double runtime_s = 0.0;
  bool ok = false;
  std::string error;      ///< diagnostic when !ok
};

/// A full sweep: points ordered dt-major then c-minor, matching the
/// cross product of the grids.
struct SweepResult {
  std::vector<double> dt_grid;  ///< seconds
  std::vector<double> c_grid;
  std::vector<SweepPoint> points;  ///< size dt_grid.size() * c_grid.size()
  int qubit_count = 3;
  PhysicalParams params;

  const SweepPoint& at(std::size_t dt_index, std::size_t c_index) const {
    return points.at(dt_index * c_grid.size() + c_index);
  }
  /// Smallest fidelity over the evaluated points; NaN if any point failed.
  double min_fidelity() const {
    double out = std::numeric_limits<double>::infinity();
    for (const SweepPoint& p : points) {
      if (!p.ok) return std::numeric_limits<double>::quiet_NaN();
      out = std::min(out, p.fidelity);
    }
    return out;
  }
};

/// Default timing-error grid: -5 ns .. +5 ns in 1 ns steps.
inline std::vector<double> default_dt_grid() {
  std::vector<double> grid;
  for (int i = -5; i <= 5; ++i) grid.push_back(i * 1e-9);
  return grid;
}

/// Default coupling-ratio grid: 0.95 .. 1.05 in 0.01 steps (1.0 exact).
inline std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int i = 95; i <= 105; ++i) grid.push_back(i / 100.0);
  return grid;
}

using PointEvaluator = std::function<double(double dt, double c)>;

/// Walks the grid cross product, storing one point per (dt, c) pair in
/// deterministic dt-major order regardless of worker count. A throwing
/// evaluator marks its point failed and the sweep continues.
inline SweepResult run_sweep(const std::vector<double>& dt_grid,
                             const std::vector<double>& c_grid,
                             const PointEvaluator& evaluate, int jobs = 1) {
  if (dt_grid.empty() || c_grid.empty())
    throw std::invalid_argument("run_sweep: empty grid");
  if (jobs < 1) throw std::invalid_argument("run_sweep: jobs must be >= 1");

  SweepResult result;
  result.dt_grid = dt_grid;
  result.c_grid = c_grid;
  result.points.resize(dt_grid.size() * c_grid.size());
  for (std::size_t i = 0; i < dt_grid.size(); ++i)
    for (std::size_t j = 0; j < c_grid.size(); ++j) {
      SweepPoint& p = result.points[i * c_grid.size() + j];
      p.dt = dt_grid[i];
      p.c = c_grid[j];
    }

  auto run_point = [&](SweepPoint& p) {
    const auto start = std::chrono::steady_clock::now();
    try {
      p.fidelity = evaluate(p.dt, p.c);
      p.ok = true;
    } catch (const std::exception& e) {
      p.ok = false;
      p.error = e.what();
      p.fidelity = std::numeric_limits<double>::quiet_NaN();
    }
    p.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
  };

  const std::size_t total = result.points.size();
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), total);
  if (workers <= 1) {
    for (SweepPoint& p : result.points) run_point(p);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < total;
             k = next.fetch_add(1))
          run_point(result.points[k]);
      });
    for (std::thread& th : pool) th.join();
  }
  return result;
}

/// Knobs of the production evaluator.
struct GateEvaluatorConfig {
  int qubit_count = 3;
  int photon_cutoff = 1;
  bool include_noise = true;
  lindblad::IntegratorOptions integrator{};
};

/// The physical per-point evaluator: compile at ratio c, shift every
/// interaction segment by dt, integrate, and score against the ideal gate
/// output.
inline PointEvaluator make_gate_evaluator(const PhysicalParams& params,
                                          const GateEvaluatorConfig& config) {
  if (config.qubit_count < 2)
    throw std::invalid_argument("make_gate_evaluator: need >= 2 qubits");
  if (config.photon_cutoff < 1)
    throw std::invalid_argument("make_gate_evaluator: photon cutoff >= 1");
  return [params, config](double dt, double c) {
    PhysicalParams p = params;
    p.c = c;
    schedule::GateSchedule sched =
        schedule::compile_nqubit(config.qubit_count, p);
    sched.layout.photon_cutoff = config.photon_cutoff;
    if (dt != 0.0) sched = schedule::apply_time_error(sched, dt);

    const StateVector input = detail::uniform_input(sched.layout);
    const StateVector target = ideal_output_state(input, sched.layout);
    const DensityMatrix rho0 = input * input.adjoint();

    const lindblad::NoiseModel noise =
        config.include_noise ? lindblad::NoiseModel::from_params(p, sched.layout)
                             : lindblad::NoiseModel::none(sched.layout);
    const auto run =
        lindblad::integrate(rho0, sched, noise, config.integrator);
    return fidelity(run.rho, target);
  };
}

/// Timing-error sweep at nominal coupling (c = 1).
inline SweepResult sweep_dt(const PhysicalParams& params,
                            const GateEvaluatorConfig& config,
                            const std::vector<double>& dt_grid =
                                default_dt_grid(),
                            int jobs = 1) {
  SweepResult result =
      run_sweep(dt_grid, {1.0}, make_gate_evaluator(params, config), jobs);
  result.qubit_count = config.qubit_count;
  result.params = params;
  return result;
}

/// Coupling-ratio sweep at exact timing (dt = 0).
inline SweepResult sweep_c(const PhysicalParams& params,
                           const GateEvaluatorConfig& config,
                           const std::vector<double>& c_grid =
                               default_c_grid(),
                           int jobs = 1) {
  SweepResult result =
      run_sweep({0.0}, c_grid, make_gate_evaluator(params, config), jobs);
  result.qubit_count = config.qubit_count;
  result.params = params;
  return result;
}

/// Full cross-product sweep.
inline SweepResult sweep_2d(const PhysicalParams& params,
                            const GateEvaluatorConfig& config,
                            const std::vector<double>& dt_grid =
                                default_dt_grid(),
                            const std::vector<double>& c_grid =
                                default_c_grid(),
                            int jobs = 1) {
  SweepResult result = run_sweep(dt_grid, c_grid,
                                 make_gate_evaluator(params, config), jobs);
  result.qubit_count = config.qubit_count;
  result.params = params;
  return result;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::string format_number(double value, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, value);
  return buf;
}

}  // namespace detail

/// CSV rows `dt_ns,c,fidelity,runtime_s` (LF line endings, '.' decimal
/// separator). Failed points carry `nan` fidelity. `zero_runtime` blanks
/// the wall-clock column for byte-reproducible artifacts.
inline std::string to_csv(const SweepResult& result,
                          bool zero_runtime = false) {
  std::string out = "dt_ns,c,fidelity,runtime_s\n";
  for (const SweepPoint& p : result.points) {
    out += detail::format_number(p.dt * 1e9);
    out += ',';
    out += detail::format_number(p.c);
    out += ',';
    out += detail::format_number(p.fidelity);
    out += ',';
    out += detail::format_number(zero_runtime ? 0.0 : p.runtime_s, "%.6f");
    out += '\n';
  }
  return out;
}

/// JSON document with grids, per-point records, and the parameter snapshot.
inline nlohmann::json to_json(const SweepResult& result,
                              bool zero_runtime = false) {
  nlohmann::json doc;
  doc["qubit_count"] = result.qubit_count;
  doc["dt_grid_s"] = result.dt_grid;
  doc["c_grid"] = result.c_grid;
  doc["params"] = schedule::params_to_json(result.params);
  nlohmann::json points = nlohmann::json::array();
  for (const SweepPoint& p : result.points) {
    nlohmann::json row;
    row["dt_s"] = p.dt;
    row["c"] = p.c;
    if (p.ok)
      row["fidelity"] = p.fidelity;
    else
      row["fidelity"] = nullptr;
    row["runtime_s"] = zero_runtime ? 0.0 : p.runtime_s;
    row["ok"] = p.ok;
    if (!p.ok) row["error"] = p.error;
    points.push_back(std::move(row));
  }
  doc["points"] = std::move(points);
  return doc;
}

}  // namespace cpgate::analysis

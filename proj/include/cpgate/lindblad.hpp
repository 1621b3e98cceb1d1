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

// Density-matrix master equation over a compiled schedule:
//
//   d rho / dt = -i [H(t), rho]
//              + sum_cavities kappa L[a]
//              + sum_qutrits (gamma01 L[|0><1|] + gamma12 L[|1><2|]
//                             + gamma02 L[|0><2|])
//              + sum_qutrits (gamma1phi sandwich(|1><1|)
//                             + gamma2phi sandwich(|2><2|)),
//
// with L[A]rho = A rho A^dag - {A^dag A, rho}/2 and the dephasing terms in
// the projector-sandwich form (P rho P - {P, rho}/2). Rates are population
// decay rates: a level with relaxation rate gamma empties as e^{-gamma t}.
//
// The integrator is a fixed-step RK4 over the segment list, with the
// interaction-picture phases e^{i w t} evaluated on a global clock (t
// accumulates across segments; it is never reset, so crosstalk interference
// between segments is kept coherent).
//
// Performance notes (everything is single-threaded per integration):
//  * H(t) rho is accumulated in ONE sequential sweep over the rows of the
//    product: per row, every term's CSR entries contribute a scaled row of
//    rho, so the product matrix is written exactly once per evaluation.
//  * Every jump operator here has a DIAGONAL A^dag A, and the dephasing
//    projectors are diagonal, so all anticommutators and dephasing
//    sandwiches fold into one precomputed entrywise weight matrix W:
//    those contributions are simply W (*) rho per evaluation.
//  * The remaining relaxation sandwiches A rho A^dag are precomputed gather
//    lists: for A = |i><j| on one subsystem, (A rho A^dag) copies the
//    (level j, level j) block of rho into the (level i, level i) block.
//  * d rho/dt is Hermitian whenever rho is, so the evaluation fills only
//    the upper triangle (r <= c) of its output; the integrator keeps rho
//    and the stage inputs exactly Hermitian by mirroring the upper triangle
//    into the lower one with a tiled transpose after each combination. This
//    halves the dense traffic of the kernel, the gathers, and the stage
//    combinations.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpgate/hamiltonian.hpp"
#include "cpgate/hilbert.hpp"
#include "cpgate/schedule.hpp"

namespace cpgate::lindblad {

using hilbert::Complex;
using hilbert::DenseMatrix;
using hilbert::DensityMatrix;
using hilbert::SpaceDescriptor;
using hilbert::SparseOperator;
using hilbert::SubsystemId;
using hilbert::SystemLayout;
using hamiltonian::HamiltonianTerm;
using hamiltonian::PhysicalParams;

/// Raised when the integration leaves the numerically trustworthy regime
/// (trace drift beyond tolerance). Maps to a dedicated process exit code in
/// the CLI.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decoherence rates of one qutrit (1/s).
struct QutritRates {
  double gamma01 = 0.0;   ///< |1> -> |0> relaxation
  double gamma12 = 0.0;   ///< |2> -> |1> relaxation
  double gamma02 = 0.0;   ///< |2> -> |0> relaxation
  double gamma1phi = 0.0; ///< |1> dephasing
  double gamma2phi = 0.0; ///< |2> dephasing
};

/// All dissipative channels of a layout: per-work-qutrit and ancilla rates
/// plus per-cavity photon decay.
struct NoiseModel {
  std::vector<QutritRates> work_rates;  ///< size = work_qutrit_count
  QutritRates ancilla_rates;
  std::vector<double> cavity_kappa;     ///< size = cavity_count

  /// Uniform rates from the parameter bundle (the reference model).
  static NoiseModel from_params(const PhysicalParams& p,
                                const SystemLayout& layout) {
    NoiseModel noise;
    QutritRates rates;
    rates.gamma01 = p.gamma01;
    rates.gamma12 = p.gamma12;
    rates.gamma02 = p.gamma02;
    rates.gamma1phi = p.gamma1phi;
    rates.gamma2phi = p.gamma2phi;
    noise.work_rates.assign(layout.work_qutrit_count, rates);
    noise.ancilla_rates = layout.ancilla_present ? rates : QutritRates{};
    noise.cavity_kappa.assign(layout.cavity_count, p.kappa);
    return noise;
  }

  /// Fully coherent model (every rate zero).
  static NoiseModel none(const SystemLayout& layout) {
    NoiseModel noise;
    noise.work_rates.assign(layout.work_qutrit_count, QutritRates{});
    noise.cavity_kappa.assign(layout.cavity_count, 0.0);
    return noise;
  }
};

inline void validate_noise(const NoiseModel& noise) {
  auto check = [](const QutritRates& r) {
    if (r.gamma01 < 0.0 || r.gamma12 < 0.0 || r.gamma02 < 0.0 ||
        r.gamma1phi < 0.0 || r.gamma2phi < 0.0)
      throw std::invalid_argument("negative qutrit decoherence rate");
  };
  for (const QutritRates& r : noise.work_rates) check(r);
  check(noise.ancilla_rates);
  for (double kappa : noise.cavity_kappa)
    if (kappa < 0.0) throw std::invalid_argument("negative cavity decay rate");
}

/// Fixed-step RK4 controls.
struct IntegratorOptions {
  /// Phase advance (rad) of the fastest rotating term per step.
  double max_phase_step = hamiltonian::kTwoPi / 20.0;
  /// Lower bound on the resolution of every segment.
  int min_steps_per_segment = 100;
  /// |trace(rho) - 1| beyond which the run aborts.
  double trace_abort_tol = 1e-6;
  /// Evolve under the modified Hamiltonians (sidebands + crosstalk). With
  /// false, the ideal resonant Hamiltonians are used (dissipators still act).
  bool use_modified_hamiltonians = true;
  /// Record one diagnostics row per segment.
  bool collect_snapshots = false;
  /// Called with the state after each segment (regardless of
  /// collect_snapshots); lets callers derive observables without storing
  /// every intermediate density matrix.
  std::function<void(const schedule::ScheduleSegment&, double t_end,
                     const DensityMatrix&)>
      segment_observer;
};

inline void validate_options(const IntegratorOptions& opts) {
  if (opts.max_phase_step <= 0.0)
    throw std::invalid_argument("max_phase_step must be > 0");
  if (opts.min_steps_per_segment < 1)
    throw std::invalid_argument("min_steps_per_segment must be >= 1");
  if (opts.trace_abort_tol <= 0.0)
    throw std::invalid_argument("trace_abort_tol must be > 0");
}

/// Reference single-channel dissipator: A rho A^dag - {A^dag A, rho}/2.
/// Direct formula, used as the oracle for the folded fast path.
inline DenseMatrix dissipator(const SparseOperator& op,
                              const DensityMatrix& rho) {
  if (op.rows() != rho.rows() || op.cols() != rho.cols())
    throw std::invalid_argument("dissipator: dimension mismatch");
  const SparseOperator op_dag = SparseOperator(op.adjoint());
  const SparseOperator op_dag_op = SparseOperator(op_dag * op);
  DenseMatrix sandwich = op * DenseMatrix(rho * op_dag);
  DenseMatrix anti = op_dag_op * rho;
  anti += rho * op_dag_op;
  return sandwich - 0.5 * anti;
}

namespace detail {

using RealMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One contiguous index block of a relaxation gather. Because basis levels
/// vary with a fixed stride, the source indices of a single-subsystem jump
/// operator form maximal runs of consecutive integers, each mapping to an
/// equally long destination run; within a run the operator weight is
/// constant.
struct GatherRun {
  long src = 0;
  long dst = 0;
  long len = 0;
  double weight = 1.0;
};

/// Relaxation sandwich A rho A^dag for a single-subsystem lowering
/// operator: out[dst x dst] += rate * w_r * w_c * rho[src x src], blocked
/// over run pairs.
struct GatherChannel {
  double rate = 0.0;
  std::vector<GatherRun> runs;
};

/// Decomposes {indices with `from` at `pos`} into contiguous runs mapping
/// onto the same indices with `to` at `pos`.
inline std::vector<GatherRun> level_runs(const SpaceDescriptor& space, int pos,
                                         int from, int to, double weight) {
  std::vector<GatherRun> runs;
  for (long idx = 0; idx < space.total_dim; ++idx) {
    if (space.level_at(idx, pos) != from) continue;
    if (!runs.empty() && runs.back().src + runs.back().len == idx &&
        runs.back().weight == weight) {
      ++runs.back().len;
    } else {
      runs.push_back({idx, space.with_level(idx, pos, to), 1, weight});
    }
  }
  return runs;
}

/// Everything precomputed to evaluate d rho/dt inside one segment.
class SegmentGenerator {
 public:
  SegmentGenerator(const schedule::ScheduleSegment& segment,
                   const PhysicalParams& params, const SpaceDescriptor& space,
                   const NoiseModel& noise, bool modified)
      : dim_(space.total_dim) {
    // Merge terms sharing one rotation frequency into a single operator so
    // each evaluation pays one phase exponential per distinct frequency.
    for (const HamiltonianTerm& term :
         schedule::terms_for_segment(segment, params, space.layout,
                                     modified)) {
      bool merged = false;
      for (HamiltonianTerm& have : terms_) {
        if (have.omega == term.omega) {
          have.op = SparseOperator(have.op + term.op);
          merged = true;
          break;
        }
      }
      if (!merged) terms_.push_back(term);
    }
    for (HamiltonianTerm& term : terms_) term.op.makeCompressed();

    // Fold anticommutators (all A^dag A diagonal) and dephasing sandwiches
    // (diagonal projectors) into the weight matrix W.
    Eigen::VectorXd total_decay = Eigen::VectorXd::Zero(dim_);
    std::vector<std::pair<double, Eigen::VectorXd>> dephasing;

    auto add_qutrit = [&](const QutritRates& rates, SubsystemId id) {
      const int pos = space.position(id);
      Eigen::VectorXd level1 = Eigen::VectorXd::Zero(dim_);
      Eigen::VectorXd level2 = Eigen::VectorXd::Zero(dim_);
      for (long idx = 0; idx < dim_; ++idx) {
        const int level = space.level_at(idx, pos);
        if (level == 1) level1(idx) = 1.0;
        if (level == 2) level2(idx) = 1.0;
      }
      // A^dag A of |i><j| is |j><j|.
      total_decay += rates.gamma01 * level1;
      total_decay += (rates.gamma12 + rates.gamma02) * level2;
      total_decay += rates.gamma1phi * level1;
      total_decay += rates.gamma2phi * level2;
      if (rates.gamma1phi > 0.0) dephasing.push_back({rates.gamma1phi, level1});
      if (rates.gamma2phi > 0.0) dephasing.push_back({rates.gamma2phi, level2});

      auto add_gather = [&](double rate, int from, int to) {
        if (rate <= 0.0) return;
        GatherChannel ch;
        ch.rate = rate;
        ch.runs = level_runs(space, pos, from, to, 1.0);
        gathers_.push_back(std::move(ch));
      };
      add_gather(rates.gamma01, 1, 0);
      add_gather(rates.gamma12, 2, 1);
      add_gather(rates.gamma02, 2, 0);
    };

    for (int l = 1; l <= space.layout.work_qutrit_count; ++l)
      add_qutrit(noise.work_rates.at(l - 1), SubsystemId::work(l));
    if (space.layout.ancilla_present)
      add_qutrit(noise.ancilla_rates, SubsystemId::ancilla());

    for (int l = 1; l <= space.layout.cavity_count; ++l) {
      const double kappa = noise.cavity_kappa.at(l - 1);
      if (kappa <= 0.0) continue;
      const int pos = space.position(SubsystemId::cavity(l));
      // a^dag a is the photon number; a gathers level k -> k-1 with weight
      // sqrt(k), one run set per source level.
      GatherChannel ch;
      ch.rate = kappa;
      for (int k = 1; k <= space.layout.photon_cutoff; ++k) {
        for (long idx = 0; idx < dim_; ++idx)
          if (space.level_at(idx, pos) == k) total_decay(idx) += kappa * k;
        auto runs = level_runs(space, pos, k, k - 1,
                               std::sqrt(static_cast<double>(k)));
        ch.runs.insert(ch.runs.end(), runs.begin(), runs.end());
      }
      gathers_.push_back(std::move(ch));
    }

    has_weights_ = total_decay.maxCoeff() > 0.0 || !dephasing.empty();
    if (has_weights_) {
      weights_ = RealMatrix::Zero(dim_, dim_);
      weights_.noalias() -=
          0.5 * (total_decay * Eigen::RowVectorXd::Ones(dim_));
      weights_.noalias() -=
          0.5 * (Eigen::VectorXd::Ones(dim_) * total_decay.transpose());
      for (const auto& [rate, projector] : dephasing)
        weights_.noalias() += rate * (projector * projector.transpose());
    }
  }

  long dim() const { return dim_; }

  /// True when the segment contributes nothing (no Hamiltonian terms, no
  /// active channel): the state is constant over it.
  bool is_trivial() const {
    return terms_.empty() && !has_weights_ && gathers_.empty();
  }

  /// Fills the UPPER TRIANGLE (r <= c) of out with d rho / dt at absolute
  /// time t; entries below the diagonal are left untouched (the result is
  /// Hermitian for Hermitian rho, so out(c, r) is implied as conj). `rho`
  /// must be a full matrix; `h_rho` is caller-owned scratch of the same
  /// shape.
  void rhs(double t, const DensityMatrix& rho, DensityMatrix& out,
           DenseMatrix& h_rho) const {
    if (!terms_.empty()) {
      // h_rho = H(t) rho in one sequential sweep: row r of the product is
      // the phase-scaled sum of rho rows selected by each term's CSR row r.
      // Every term here has few entries per row, so the row accumulator
      // stays cache-hot while the full product is written exactly once.
      struct TermView {
        const SparseOperator::StorageIndex* outer;
        const SparseOperator::StorageIndex* inner;
        const Complex* values;
        Complex phase;
      };
      std::vector<TermView> views;
      views.reserve(terms_.size());
      for (const HamiltonianTerm& term : terms_) {
        const Complex phase =
            term.omega == 0.0 ? Complex(1.0, 0.0)
                              : std::exp(Complex(0.0, term.omega * t));
        views.push_back({term.op.outerIndexPtr(), term.op.innerIndexPtr(),
                         term.op.valuePtr(), phase});
      }
      const Complex* r = rho.data();
      Complex* m = h_rho.data();
      for (long row = 0; row < dim_; ++row) {
        Complex* mrow = m + row * dim_;
        bool first = true;
        for (const TermView& view : views) {
          for (auto idx = view.outer[row]; idx < view.outer[row + 1]; ++idx) {
            const Complex v = view.phase * view.values[idx];
            const double vr = v.real(), vi = v.imag();
            const Complex* src = r + static_cast<long>(view.inner[idx]) * dim_;
            if (first) {
              for (long c = 0; c < dim_; ++c) {
                const double sr = src[c].real(), si = src[c].imag();
                mrow[c] = Complex(vr * sr - vi * si, vr * si + vi * sr);
              }
              first = false;
            } else {
              for (long c = 0; c < dim_; ++c) {
                const double sr = src[c].real(), si = src[c].imag();
                mrow[c] += Complex(vr * sr - vi * si, vr * si + vi * sr);
              }
            }
          }
        }
        if (first) std::fill(mrow, mrow + dim_, Complex(0.0, 0.0));
      }

      // Fused tiled pass over the upper-triangle tiles for
      //   out = -i (M - M^dag) + W (*) rho,  M = h_rho.
      // Per tile pair, the transposed tile of M is first copied into a
      // contiguous buffer so the inner loop runs on unit-stride data; the
      // triangle restriction reads every element of M exactly once.
      const Complex* o_r = rho.data();
      Complex* o = out.data();
      const double* w = has_weights_ ? weights_.data() : nullptr;
      constexpr long kTile = 64;
      Complex mt[kTile * kTile];
      for (long i0 = 0; i0 < dim_; i0 += kTile) {
        const long i1 = std::min(i0 + kTile, dim_);
        for (long j0 = i0; j0 < dim_; j0 += kTile) {
          const long j1 = std::min(j0 + kTile, dim_);
          // mt[(row - i0)*kTile + (col - j0)] = M(col, row): read the
          // (j, i) tile row-contiguously, scatter into the small buffer.
          for (long col = j0; col < j1; ++col) {
            const Complex* msrc = m + col * dim_ + i0;
            Complex* mdst = mt + (col - j0);
            for (long row = i0; row < i1; ++row)
              mdst[(row - i0) * kTile] = msrc[row - i0];
          }
          for (long row = i0; row < i1; ++row) {
            const long c0 = std::max(j0, row);
            const Complex* mrow = m + row * dim_;
            const Complex* brow = mt + (row - i0) * kTile - j0;
            Complex* orow = o + row * dim_;
            if (w) {
              const Complex* rrow = o_r + row * dim_;
              const double* wrow = w + row * dim_;
              for (long col = c0; col < j1; ++col) {
                const Complex a = mrow[col];
                const Complex b = brow[col];
                orow[col] = Complex(a.imag() + b.imag(),
                                    b.real() - a.real()) +
                            wrow[col] * rrow[col];
              }
            } else {
              for (long col = c0; col < j1; ++col) {
                const Complex a = mrow[col];
                const Complex b = brow[col];
                orow[col] =
                    Complex(a.imag() + b.imag(), b.real() - a.real());
              }
            }
          }
        }
      }
    } else if (has_weights_) {
      const Complex* r = rho.data();
      const double* w = weights_.data();
      Complex* o = out.data();
      for (long row = 0; row < dim_; ++row) {
        const long base = row * dim_;
        for (long c = row; c < dim_; ++c) o[base + c] = w[base + c] * r[base + c];
      }
    } else {
      out.setZero();
    }

    // Relaxation gathers, restricted to destination blocks on or above the
    // diagonal. Run pairs (i, j) and (j, i) land on mirrored blocks, so per
    // unordered pair only the upper one is accumulated; rho is read as a
    // full matrix (sources need not lie in the upper triangle).
    for (const GatherChannel& ch : gathers_) {
      const std::size_t n_runs = ch.runs.size();
      for (std::size_t i = 0; i < n_runs; ++i) {
        for (std::size_t j = i; j < n_runs; ++j) {
          const GatherRun& a = ch.runs[i];
          const GatherRun& b = ch.runs[j];
          const double f = ch.rate * a.weight * b.weight;
          if (i == j) {
            // Diagonal block: keep rows from their own diagonal rightward.
            for (long p = 0; p < a.len; ++p) {
              Complex* orow = out.data() + (a.dst + p) * dim_ + a.dst;
              const Complex* rrow =
                  rho.data() + (a.src + p) * dim_ + a.src;
              for (long q = p; q < a.len; ++q) orow[q] += f * rrow[q];
            }
          } else {
            // Runs are disjoint and sorted, so exactly one ordering of the
            // pair gives a block strictly above the diagonal.
            const GatherRun& lo = a.dst < b.dst ? a : b;
            const GatherRun& hi = a.dst < b.dst ? b : a;
            out.block(lo.dst, hi.dst, lo.len, hi.len).noalias() +=
                f * rho.block(lo.src, hi.src, lo.len, hi.len);
          }
        }
      }
    }
  }

  /// Largest rotation frequency among the active Hamiltonian terms.
  double max_frequency() const {
    double w = 0.0;
    for (const HamiltonianTerm& term : terms_)
      w = std::max(w, std::abs(term.omega));
    return w;
  }

 private:
  long dim_;
  std::vector<HamiltonianTerm> terms_;
  RealMatrix weights_;
  bool has_weights_ = false;
  std::vector<GatherChannel> gathers_;
};

}  // namespace detail

/// One evaluation of the master-equation right-hand side for a segment at
/// absolute time t. Reference entry point; the integrator precomputes the
/// per-segment machinery once instead.
inline DensityMatrix lindblad_rhs(const DensityMatrix& rho, double t,
                                  const schedule::ScheduleSegment& segment,
                                  const NoiseModel& noise,
                                  const PhysicalParams& params,
                                  const SystemLayout& layout,
                                  bool modified = true) {
  const SpaceDescriptor space = hilbert::build_space(layout);
  if (rho.rows() != space.total_dim || rho.cols() != space.total_dim)
    throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  validate_noise(noise);
  detail::SegmentGenerator gen(segment, params, space, noise, modified);
  const long dim = space.total_dim;
  DensityMatrix out(dim, dim);
  DenseMatrix scratch(dim, dim);
  gen.rhs(t, rho, out, scratch);
  // The generator fills the upper triangle; complete the Hermitian result.
  for (long r = 0; r < dim; ++r)
    for (long c = r + 1; c < dim; ++c) out(c, r) = std::conj(out(r, c));
  return out;
}

/// Per-segment integration diagnostics.
struct SegmentSnapshot {
  std::string label;
  double t_end = 0.0;        ///< absolute time at segment end (s)
  double trace_error = 0.0;  ///< |trace(rho) - 1|
  double purity = 0.0;       ///< trace(rho^2)
};

struct IntegrationResult {
  DensityMatrix rho;
  double max_trace_error = 0.0;
  long total_steps = 0;
  std::vector<SegmentSnapshot> snapshots;
};

/// Integrates the master equation over a full schedule with fixed-step RK4.
/// The step within each segment is
///   h = duration / max(min_steps_per_segment,
///                      ceil(duration * w_fast / max_phase_step))
/// with w_fast the fastest rotating term of that segment's Hamiltonian.
/// Aborts with NumericalAbort when |trace - 1| exceeds the tolerance.
inline IntegrationResult integrate(const DensityMatrix& rho0,
                                   const schedule::GateSchedule& sched,
                                   const NoiseModel& noise,
                                   const IntegratorOptions& opts = {}) {
  validate_options(opts);
  validate_noise(noise);
  const SpaceDescriptor space = hilbert::build_space(sched.layout);
  const long dim = space.total_dim;
  if (rho0.rows() != dim || rho0.cols() != dim)
    throw std::invalid_argument("integrate: state dimension mismatch");
  {
    const auto check = hilbert::check_density_matrix(rho0);
    if (check.trace_error > 1e-8 || check.hermiticity_error > 1e-9)
      throw std::invalid_argument("integrate: input is not a density matrix");
  }
  if (static_cast<int>(noise.work_rates.size()) !=
          sched.layout.work_qutrit_count ||
      static_cast<int>(noise.cavity_kappa.size()) != sched.layout.cavity_count)
    throw std::invalid_argument("integrate: noise model does not fit layout");

  IntegrationResult result;
  // Start from the exactly Hermitian part of the input; every later update
  // writes mirrored row/column pairs, so rho stays exactly Hermitian.
  result.rho = 0.5 * (rho0 + DensityMatrix(rho0.adjoint()));

  DensityMatrix k(dim, dim);
  DensityMatrix acc(dim, dim);
  DensityMatrix stage(dim, dim);
  DenseMatrix scratch(dim, dim);

  double t = 0.0;
  for (const schedule::ScheduleSegment& segment : sched.segments) {
    if (segment.duration == 0.0) continue;
    const detail::SegmentGenerator gen(segment, sched.params, space, noise,
                                       opts.use_modified_hamiltonians);
    if (gen.is_trivial()) {
      t += segment.duration;
      if (opts.collect_snapshots) {
        SegmentSnapshot snap;
        snap.label = segment.label;
        snap.t_end = t;
        snap.trace_error = std::abs(hilbert::trace(result.rho) -
                                    Complex(1.0, 0.0));
        snap.purity = result.rho.cwiseAbs2().sum();
        result.snapshots.push_back(std::move(snap));
      }
      if (opts.segment_observer) opts.segment_observer(segment, t, result.rho);
      continue;
    }

    long steps = opts.min_steps_per_segment;
    const double w_fast = gen.max_frequency();
    if (w_fast > 0.0) {
      const long by_phase = static_cast<long>(
          std::ceil(segment.duration * w_fast / opts.max_phase_step));
      steps = std::max(steps, by_phase);
    }
    const double h = segment.duration / static_cast<double>(steps);

    // The right-hand side fills upper triangles only, so the stage
    // combinations sweep the contiguous ranges [r, dim) of each row; a
    // separate tiled pass then mirrors the upper triangle into the lower
    // one to hand the next evaluation a full (exactly Hermitian) matrix.
    // Tiling turns the transpose's column walk into contiguous row writes
    // staged through a small cache-resident buffer.
    Complex* rho_c = result.rho.data();
    Complex* k_c = k.data();
    Complex* acc_c = acc.data();
    Complex* stage_c = stage.data();
    const double h2 = 0.5 * h;
    const double h6 = h / 6.0;
    constexpr long kTile = 64;
    const auto mirror_lower = [dim](Complex* a) {
      Complex buf[kTile * kTile];
      for (long i0 = 0; i0 < dim; i0 += kTile) {
        const long i1 = std::min(i0 + kTile, dim);
        for (long r = i0; r < i1; ++r)
          for (long c = r + 1; c < i1; ++c)
            a[c * dim + r] = std::conj(a[r * dim + c]);
        for (long j0 = i0 + kTile; j0 < dim; j0 += kTile) {
          const long j1 = std::min(j0 + kTile, dim);
          for (long r = i0; r < i1; ++r) {
            const Complex* src = a + r * dim + j0;
            Complex* dst = buf + (r - i0);
            for (long c = 0; c < j1 - j0; ++c)
              dst[c * kTile] = std::conj(src[c]);
          }
          for (long r = j0; r < j1; ++r) {
            const Complex* src = buf + (r - j0) * kTile;
            Complex* dst = a + r * dim + i0;
            for (long c = 0; c < i1 - i0; ++c) dst[c] = src[c];
          }
        }
      }
    };
    const auto stage_pass = [&](double weight, bool accumulate) {
      for (long r = 0; r < dim; ++r) {
        const long base = r * dim;
        if (accumulate) {
          for (long c = r; c < dim; ++c) {
            const Complex kv = k_c[base + c];
            acc_c[base + c] += 2.0 * kv;
            stage_c[base + c] = rho_c[base + c] + weight * kv;
          }
        } else {
          for (long c = r; c < dim; ++c) {
            const Complex kv = k_c[base + c];
            acc_c[base + c] = kv;
            stage_c[base + c] = rho_c[base + c] + weight * kv;
          }
        }
      }
      mirror_lower(stage_c);
    };
    for (long step = 0; step < steps; ++step) {
      const double t0 = t + h * static_cast<double>(step);
      gen.rhs(t0, result.rho, k, scratch);
      stage_pass(h2, false);
      gen.rhs(t0 + h2, stage, k, scratch);
      stage_pass(h2, true);
      gen.rhs(t0 + h2, stage, k, scratch);
      stage_pass(h, true);
      gen.rhs(t0 + h, stage, k, scratch);
      for (long r = 0; r < dim; ++r) {
        const long base = r * dim;
        for (long c = r; c < dim; ++c)
          rho_c[base + c] += h6 * (acc_c[base + c] + k_c[base + c]);
      }
      mirror_lower(rho_c);
    }
    result.total_steps += steps;
    t += segment.duration;

    // rho is exactly Hermitian by construction; audit the trace.
    const double trace_error =
        std::abs(hilbert::trace(result.rho) - Complex(1.0, 0.0));
    result.max_trace_error = std::max(result.max_trace_error, trace_error);
    if (trace_error > opts.trace_abort_tol)
      throw NumericalAbort("trace drift " + std::to_string(trace_error) +
                           " after segment '" + segment.label + "'");

    if (opts.collect_snapshots) {
      SegmentSnapshot snap;
      snap.label = segment.label;
      snap.t_end = t;
      snap.trace_error = trace_error;
      snap.purity = result.rho.cwiseAbs2().sum();
      result.snapshots.push_back(std::move(snap));
    }
    if (opts.segment_observer) opts.segment_observer(segment, t, result.rho);
  }
  return result;
}

}  // namespace cpgate::lindblad

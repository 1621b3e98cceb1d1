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

// Exact closed-form evolution of the protocol, applied per basis component:
//
//  * pulse_map    — the driven |1>-|2> rotation of one work qutrit;
//  * jc_map       — the resonant ancilla-cavity excitation exchange;
//  * tc_map       — the collective qutrit+ancilla-cavity exchange at mu = g,
//                   including the parked-|2> components which see a pure
//                   ancilla-cavity exchange (the qutrit coupling cannot act
//                   on |2>);
//  * hadamard_map — the exact |0>-|1> Hadamard used by the Toffoli wrapper;
//
// plus an independent dense matrix-exponential propagator used as the oracle
// against which the closed forms are checked, and the schedule walker that
// routes every segment through the right map.
//
// The closed forms are valid on the sectors the protocol actually populates
// (vacuum plus at most one shared excitation per exchange). A component
// outside the modeled sector with non-negligible amplitude signals a
// mis-compiled schedule and raises an error rather than being silently
// dropped.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "cpgate/hamiltonian.hpp"
#include "cpgate/hilbert.hpp"
#include "cpgate/schedule.hpp"

namespace cpgate::ideal_dynamics {

using hilbert::Complex;
using hilbert::DenseMatrix;
using hilbert::SpaceDescriptor;
using hilbert::SparseOperator;
using hilbert::StateVector;
using hilbert::SubsystemId;

/// Amplitude below which a component outside a map's modeled sector is
/// treated as numerical noise instead of a schedule bug.
inline constexpr double kSectorTol = 1e-12;

/// Largest dimension the dense matrix-exponential oracle will accept.
inline constexpr long kPropagatorDimLimit = 3000;

namespace detail {

[[noreturn]] inline void sector_violation(const std::string& map,
                                          long index, double magnitude) {
  throw std::domain_error(map + ": basis component " + std::to_string(index) +
                          " with amplitude magnitude " +
                          std::to_string(magnitude) +
                          " lies outside the modeled sector (schedule bug?)");
}

}  // namespace detail

/// Driven rotation of one work qutrit's |1>,|2> pair by angle theta = Omega t
/// with drive phase phi:
///   |1> -> cos(theta)|1> - i e^{-i phi} sin(theta)|2>
///   |2> -> -i e^{i phi} sin(theta)|1> + cos(theta)|2>
/// |0> components are untouched.
inline StateVector pulse_map(const StateVector& state, int l, double theta,
                             double phi, const SpaceDescriptor& space) {
  if (theta < 0.0) throw std::invalid_argument("pulse_map: negative angle");
  const int pos = space.position(SubsystemId::work(l));
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const Complex from1_to2 = Complex(0.0, -1.0) * std::exp(Complex(0.0, -phi)) * s;
  const Complex from2_to1 = Complex(0.0, -1.0) * std::exp(Complex(0.0, phi)) * s;

  StateVector out = StateVector::Zero(state.size());
  for (long idx = 0; idx < state.size(); ++idx) {
    const Complex a = state(idx);
    if (a == Complex(0.0, 0.0)) continue;
    switch (space.level_at(idx, pos)) {
      case 0:
        out(idx) += a;
        break;
      case 1:
        out(idx) += c * a;
        out(space.with_level(idx, pos, 2)) += from1_to2 * a;
        break;
      default:
        out(idx) += c * a;
        out(space.with_level(idx, pos, 1)) += from2_to1 * a;
        break;
    }
  }
  return out;
}

/// Exact |0>-|1> Hadamard on work qutrit l (|2> untouched):
///   |0> -> (|0>+|1>)/sqrt(2),  |1> -> (|0>-|1>)/sqrt(2).
inline StateVector hadamard_map(const StateVector& state, int l,
                                const SpaceDescriptor& space) {
  const int pos = space.position(SubsystemId::work(l));
  const double inv_sqrt2 = 1.0 / hamiltonian::kSqrt2;
  StateVector out = StateVector::Zero(state.size());
  for (long idx = 0; idx < state.size(); ++idx) {
    const Complex a = state(idx);
    if (a == Complex(0.0, 0.0)) continue;
    switch (space.level_at(idx, pos)) {
      case 0:
        out(idx) += inv_sqrt2 * a;
        out(space.with_level(idx, pos, 1)) += inv_sqrt2 * a;
        break;
      case 1:
        out(space.with_level(idx, pos, 0)) += inv_sqrt2 * a;
        out(idx) -= inv_sqrt2 * a;
        break;
      default:
        out(idx) += a;
        break;
    }
  }
  return out;
}

namespace detail {

/// Scatters one component through the resonant ancilla-cavity exchange.
/// Returns false if the component lies outside span{|00>,|10>,|01>} on
/// (ancilla, cavity) — the caller decides whether that is fatal.
inline bool scatter_jc(StateVector& out, const SpaceDescriptor& space,
                       long idx, Complex a, int anc_pos, int cav_pos,
                       double gt) {
  const int anc = space.level_at(idx, anc_pos);
  const int ph = space.level_at(idx, cav_pos);
  if (anc == 0 && ph == 0) {
    out(idx) += a;
    return true;
  }
  const double c = std::cos(gt);
  const Complex is = Complex(0.0, -std::sin(gt));
  if (anc == 1 && ph == 0) {
    out(idx) += c * a;
    out(space.with_level(space.with_level(idx, anc_pos, 0), cav_pos, 1)) +=
        is * a;
    return true;
  }
  if (anc == 0 && ph == 1) {
    out(idx) += c * a;
    out(space.with_level(space.with_level(idx, anc_pos, 1), cav_pos, 0)) +=
        is * a;
    return true;
  }
  return false;
}

}  // namespace detail

/// Resonant ancilla-cavity exchange by angle gt = g_l * t on cavity l:
///   |0>_a|0>_c fixed;
///   |1>_a|0>_c -> cos(gt)|1,0> - i sin(gt)|0,1>;
///   |0>_a|1>_c -> cos(gt)|0,1> - i sin(gt)|1,0>.
/// All other subsystems are spectators.
inline StateVector jc_map(const StateVector& state, int cavity_l, double gt,
                          const SpaceDescriptor& space) {
  const int anc_pos = space.position(SubsystemId::ancilla());
  const int cav_pos = space.position(SubsystemId::cavity(cavity_l));
  StateVector out = StateVector::Zero(state.size());
  for (long idx = 0; idx < state.size(); ++idx) {
    const Complex a = state(idx);
    if (a == Complex(0.0, 0.0)) continue;
    if (!detail::scatter_jc(out, space, idx, a, anc_pos, cav_pos, gt)) {
      if (std::abs(a) > kSectorTol)
        detail::sector_violation("jc_map", idx, std::abs(a));
    }
  }
  return out;
}

/// Collective exchange of (work qutrit q, ancilla, cavity l) by angle
/// gt = g_l * t, valid at mu = g. With Theta = sqrt(2) gt, c = cos Theta,
/// s = sin Theta, the single-excitation sector maps as
///   |1,0,0> -> (1+c)/2 |1,0,0> - (1-c)/2 |0,1,0> - i s/sqrt(2) |0,0,1>
///   |0,1,0> -> -(1-c)/2 |1,0,0> + (1+c)/2 |0,1,0> - i s/sqrt(2) |0,0,1>
///   |0,0,1> -> -i s/sqrt(2) (|1,0,0> + |0,1,0>) + c |0,0,1>
/// and the vacuum is fixed. Components with the qutrit parked in |2> see the
/// pure ancilla-cavity exchange with angle gt: the qutrit coupling acts only
/// on the |0>,|1> pair, so |2> decouples it but leaves the ancilla coupling
/// fully active (e.g. a parked qutrit accumulates the 2 pi / g ancilla
/// exposure of its operation as an identity, not as a frozen state).
inline StateVector tc_map_on(const StateVector& state, int qutrit_q,
                             int cavity_l, double gt,
                             const SpaceDescriptor& space) {
  const int q_pos = space.position(SubsystemId::work(qutrit_q));
  const int anc_pos = space.position(SubsystemId::ancilla());
  const int cav_pos = space.position(SubsystemId::cavity(cavity_l));

  const double theta = hamiltonian::kSqrt2 * gt;
  const double c = std::cos(theta);
  const double plus = 0.5 * (1.0 + c);
  const double minus = 0.5 * (1.0 - c);
  const Complex is = Complex(0.0, -std::sin(theta) / hamiltonian::kSqrt2);

  StateVector out = StateVector::Zero(state.size());
  for (long idx = 0; idx < state.size(); ++idx) {
    const Complex a = state(idx);
    if (a == Complex(0.0, 0.0)) continue;
    const int q = space.level_at(idx, q_pos);
    const int anc = space.level_at(idx, anc_pos);
    const int ph = space.level_at(idx, cav_pos);

    if (q == 2) {  // parked: pure ancilla-cavity exchange
      if (!detail::scatter_jc(out, space, idx, a, anc_pos, cav_pos, gt)) {
        if (std::abs(a) > kSectorTol)
          detail::sector_violation("tc_map(parked)", idx, std::abs(a));
      }
      continue;
    }

    const int excitation = (q == 1 ? 1 : 0) + (anc == 1 ? 1 : 0) + ph;
    const bool in_sector = (anc != 2) && (ph <= 1) && (excitation <= 1);
    if (!in_sector) {
      if (std::abs(a) > kSectorTol)
        detail::sector_violation("tc_map", idx, std::abs(a));
      continue;
    }
    if (excitation == 0) {
      out(idx) += a;
      continue;
    }

    const long i_q = space.with_level(
        space.with_level(space.with_level(idx, q_pos, 1), anc_pos, 0), cav_pos,
        0);
    const long i_a = space.with_level(
        space.with_level(space.with_level(idx, q_pos, 0), anc_pos, 1), cav_pos,
        0);
    const long i_c = space.with_level(
        space.with_level(space.with_level(idx, q_pos, 0), anc_pos, 0), cav_pos,
        1);
    if (q == 1) {
      out(i_q) += plus * a;
      out(i_a) -= minus * a;
      out(i_c) += is * a;
    } else if (anc == 1) {
      out(i_q) -= minus * a;
      out(i_a) += plus * a;
      out(i_c) += is * a;
    } else {  // ph == 1
      out(i_q) += is * a;
      out(i_a) += is * a;
      out(i_c) += std::cos(theta) * a;
    }
  }
  return out;
}

/// The standard pairing: work qutrit l exchanges with its own cavity l.
inline StateVector tc_map(const StateVector& state, int cavity_l, double gt,
                          const SpaceDescriptor& space) {
  return tc_map_on(state, cavity_l, cavity_l, gt, space);
}

/// Dense U = exp(-i H t) via eigendecomposition; the independent oracle for
/// the closed-form maps and for zero-dissipation integration checks.
inline DenseMatrix exact_propagator(const SparseOperator& h, double t) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("exact_propagator: non-square operator");
  if (h.rows() > kPropagatorDimLimit)
    throw std::invalid_argument(
        "exact_propagator: dimension exceeds dense feasibility guard");
  DenseMatrix hd(h);
  const double scale = std::max(1.0, hd.cwiseAbs().maxCoeff());
  if ((hd - DenseMatrix(hd.adjoint())).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw std::invalid_argument("exact_propagator: operator is not Hermitian");

  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hd);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("exact_propagator: eigendecomposition failed");
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (long i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * t));
  DenseMatrix u = es.eigenvectors() * phases.asDiagonal() *
                  es.eigenvectors().adjoint();

  const DenseMatrix defect =
      DenseMatrix(u.adjoint() * u) -
      DenseMatrix::Identity(u.rows(), u.cols());
  if (defect.cwiseAbs().maxCoeff() > 1e-9)
    throw std::runtime_error("exact_propagator: propagator is not unitary");
  return u;
}

/// Runs a compiled schedule on a state by routing every segment through its
/// closed-form map. Overhead segments are the identity. Requires the
/// schedule's collective segments to be compiled at mu = g (coupling ratio
/// c = 1), the regime in which the closed forms hold.
inline StateVector apply_schedule_ideal(const schedule::GateSchedule& sched,
                                        const StateVector& input) {
  const SpaceDescriptor space = hilbert::build_space(sched.layout);
  if (input.size() != space.total_dim)
    throw std::invalid_argument(
        "apply_schedule_ideal: state dimension does not match layout");

  StateVector state = input;
  for (const schedule::ScheduleSegment& seg : sched.segments) {
    switch (seg.segment_class) {
      case schedule::SegmentClass::kPulse:
        if (seg.hadamard_qutrit != 0) {
          state = hadamard_map(state, seg.hadamard_qutrit, space);
        } else {
          for (const schedule::PulseDrive& drive : seg.pulses)
            state = pulse_map(state, drive.qutrit, drive.omega * seg.duration,
                              drive.phi, space);
        }
        break;
      case schedule::SegmentClass::kTwoQutritResonant: {
        if (std::abs(sched.params.c - 1.0) > 1e-12)
          throw std::invalid_argument(
              "apply_schedule_ideal: closed forms require coupling ratio "
              "c = 1");
        const double gt = sched.params.g_of(seg.cavity) * seg.duration;
        state = tc_map_on(state, seg.resonant_qutrit, seg.cavity, gt, space);
        break;
      }
      case schedule::SegmentClass::kAncillaOnlyResonant: {
        const double gt = sched.params.g_of(seg.cavity) * seg.duration;
        state = jc_map(state, seg.cavity, gt, space);
        break;
      }
      case schedule::SegmentClass::kAdjust:
      case schedule::SegmentClass::kTransport:
        break;
    }
  }
  return state;
}

}  // namespace cpgate::ideal_dynamics

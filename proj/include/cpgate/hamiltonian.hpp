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

// Interaction-picture Hamiltonians for the cavity-mediated controlled-phase
// protocol, in two flavors per resonant configuration:
//
//  * ideal    — only the intended resonant couplings (time-independent);
//  * modified — additionally the detuned sideband couplings (the drive
//               leaking onto the |0>-|1> transition, the cavities leaking
//               onto the |1>-|2> transitions) and the inter-cavity photon
//               crosstalk, all carrying interaction-picture phases e^{i w t}.
//
// Every Hamiltonian is represented as a list of (frequency, operator) terms,
//     H(t) = sum_m  e^{i w_m t} * op_m,
// with Hermiticity guaranteed by paired (-w, op^dagger) entries; static
// Hermitian terms use w = 0. hbar is set to 1 throughout: all operator
// entries are angular frequencies (rad/s).

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpgate/hilbert.hpp"

namespace cpgate::hamiltonian {

using hilbert::Complex;
using hilbert::SparseOperator;
using hilbert::SubsystemId;
using hilbert::SystemLayout;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt2 = std::numbers::sqrt2;

/// value quoted as (frequency / 2 pi) in MHz  ->  angular frequency in rad/s
inline double angular_from_mhz(double mhz) { return kTwoPi * mhz * 1e6; }

/// inverse rate quoted in microseconds -> rate in 1/s; 0 disables the channel
inline double rate_from_inverse_us(double inverse_us) {
  if (inverse_us < 0.0)
    throw std::invalid_argument("inverse rate must be >= 0");
  return inverse_us == 0.0 ? 0.0 : 1.0 / (inverse_us * 1e-6);
}

/// All couplings, detunings, decoherence rates and error knobs.
///
/// The default-constructed value is the reference operating point used
/// throughout the test suite: g/2pi = mu/2pi = 10 MHz, Omega/2pi = 15 MHz,
/// anharmonicities 2pi*600 MHz, cavity frequencies 2pi*(5,6,7) GHz, crosstalk
/// ratio 0.1, qutrit lifetimes 10-25 us, dephasing times 15 us, cavity
/// lifetime 10 us, level-adjust time 1 ns.
struct PhysicalParams {
  // -- coherent drives and couplings (rad/s) --------------------------------
  double omega = angular_from_mhz(15.0);  ///< Rabi frequency of the |1>-|2> drive
  double omega_tilde_factor = 1.0 / kSqrt2;  ///< unwanted |0>-|1> drive = factor * omega
  double g = angular_from_mhz(10.0);  ///< ancilla-cavity coupling baseline g_l
  std::vector<double> g_per_cavity{};  ///< optional per-cavity override of g_l
  double c = 1.0;                      ///< coupling ratio: mu_l = c * g_l
  double g_tilde_factor = kSqrt2;   ///< unwanted ancilla sideband = factor * g_l
  double mu_tilde_factor = kSqrt2;  ///< unwanted qutrit sideband = factor * mu_l

  // -- detunings of the unwanted sidebands (rad/s) --------------------------
  double delta_omega = angular_from_mhz(600.0);    ///< qutrit-l anharmonicity
  double delta_omega_a = angular_from_mhz(600.0);  ///< ancilla anharmonicity
  double delta_omega_tilde = angular_from_mhz(600.0);  ///< pulsed-qutrit anharmonicity

  // -- cavity mode frequencies (rad/s) and photon crosstalk -----------------
  std::vector<double> omega_c = {kTwoPi * 5e9, kTwoPi * 6e9, kTwoPi * 7e9};
  double crosstalk_ratio = 0.1;  ///< g_lk = crosstalk_ratio * g

  // -- decoherence rates (1/s), uniform over qutrits / cavities -------------
  double gamma01 = rate_from_inverse_us(20.0);    ///< |1> -> |0| relaxation
  double gamma12 = rate_from_inverse_us(10.0);    ///< |2> -> |1> relaxation
  double gamma02 = rate_from_inverse_us(25.0);    ///< |2> -> |0> relaxation
  double gamma1phi = rate_from_inverse_us(15.0);  ///< |1> dephasing
  double gamma2phi = rate_from_inverse_us(15.0);  ///< |2> dephasing
  double kappa = rate_from_inverse_us(10.0);      ///< cavity photon decay

  // -- schedule overheads and error knobs ------------------------------------
  double tau_a = 1e-9;     ///< time to retune one qutrit's level spacings (s)
  double tau_m = 1e-6;     ///< atom transport time, single-cavity variant (s)
  double dt_error = 0.0;   ///< timing error added to every interaction segment (s)

  // -- derived accessors -----------------------------------------------------
  double g_of(int cavity_l) const {
    if (cavity_l >= 1 && cavity_l <= static_cast<int>(g_per_cavity.size()))
      return g_per_cavity[cavity_l - 1];
    return g;
  }
  double mu_of(int cavity_l) const { return c * g_of(cavity_l); }
  double g_tilde_of(int cavity_l) const { return g_tilde_factor * g_of(cavity_l); }
  double mu_tilde_of(int cavity_l) const { return mu_tilde_factor * mu_of(cavity_l); }
  double omega_tilde() const { return omega_tilde_factor * omega; }
  /// Cavity frequency; beyond the stored list the 1 GHz spacing pattern
  /// continues (cavity l at 2 pi (4 + l) GHz) so larger layouts stay valid.
  double omega_c_of(int cavity_l) const {
    if (cavity_l >= 1 && cavity_l <= static_cast<int>(omega_c.size()))
      return omega_c[cavity_l - 1];
    return kTwoPi * (4.0 + cavity_l) * 1e9;
  }
  double g_crosstalk() const { return crosstalk_ratio * g; }
  /// Inter-cavity detuning Delta_lk = w_ck - w_cl.
  double delta_lk(int l, int k) const { return omega_c_of(k) - omega_c_of(l); }

  /// The operating point of the single-cavity atom variant: g = Omega =
  /// 2 pi * 50 kHz, transport time 1 us, no crosstalk (one cavity).
  static PhysicalParams atom_defaults() {
    PhysicalParams p;
    p.omega = angular_from_mhz(0.05);
    p.g = angular_from_mhz(0.05);
    p.crosstalk_ratio = 0.0;
    p.omega_c = {kTwoPi * 5e9};
    return p;
  }
};

/// Validates rate/coupling signs; throws std::invalid_argument naming the
/// offending field.
inline void validate(const PhysicalParams& p) {
  auto require = [](bool ok, const char* field) {
    if (!ok)
      throw std::invalid_argument(std::string("invalid PhysicalParams field: ") +
                                  field);
  };
  require(p.omega > 0.0, "omega");
  require(p.g > 0.0, "g");
  for (double gl : p.g_per_cavity) require(gl > 0.0, "g_per_cavity");
  require(p.c > 0.0, "c");
  require(p.omega_tilde_factor >= 0.0, "omega_tilde_factor");
  require(p.g_tilde_factor >= 0.0, "g_tilde_factor");
  require(p.mu_tilde_factor >= 0.0, "mu_tilde_factor");
  require(p.delta_omega > 0.0, "delta_omega");
  require(p.delta_omega_a > 0.0, "delta_omega_a");
  require(p.delta_omega_tilde > 0.0, "delta_omega_tilde");
  require(p.crosstalk_ratio >= 0.0, "crosstalk_ratio");
  require(p.gamma01 >= 0.0, "gamma01");
  require(p.gamma12 >= 0.0, "gamma12");
  require(p.gamma02 >= 0.0, "gamma02");
  require(p.gamma1phi >= 0.0, "gamma1phi");
  require(p.gamma2phi >= 0.0, "gamma2phi");
  require(p.kappa >= 0.0, "kappa");
  require(p.tau_a >= 0.0, "tau_a");
  require(p.tau_m >= 0.0, "tau_m");
}

/// Which resonant configuration governs a schedule segment.
enum class HamiltonianKind {
  kPulseIdeal,
  kQutritCavityIdeal,
  kTwoQutritCavityIdeal,
  kPulseModified,
  kQutritCavityModified,
  kTwoQutritCavityModified,
  kCrosstalkOnly,
  kZero,
};

inline HamiltonianKind to_modified(HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::kPulseIdeal:
      return HamiltonianKind::kPulseModified;
    case HamiltonianKind::kQutritCavityIdeal:
      return HamiltonianKind::kQutritCavityModified;
    case HamiltonianKind::kTwoQutritCavityIdeal:
      return HamiltonianKind::kTwoQutritCavityModified;
    default:
      return kind;
  }
}

/// One rotating term of a Hamiltonian: contributes e^{i omega t} * op.
struct HamiltonianTerm {
  double omega = 0.0;   ///< rotation frequency (rad/s); 0 for static terms
  SparseOperator op;    ///< operator on the full composite space
};

/// Evaluates sum_m e^{i w_m t} op_m at one instant.
inline SparseOperator assemble_at(const std::vector<HamiltonianTerm>& terms,
                                  double t, long dim) {
  std::vector<hilbert::Triplet> triplets;
  for (const HamiltonianTerm& term : terms) {
    const Complex phase = std::exp(Complex(0.0, term.omega * t));
    for (int r = 0; r < term.op.outerSize(); ++r)
      for (SparseOperator::InnerIterator it(term.op, r); it; ++it)
        triplets.emplace_back(it.row(), it.col(), phase * it.value());
  }
  SparseOperator out(dim, dim);
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

namespace detail {

/// op + op^dagger as one sparse operator.
inline SparseOperator plus_adjoint(const SparseOperator& op) {
  SparseOperator sum = op + SparseOperator(op.adjoint());
  sum.makeCompressed();
  return sum;
}

/// Appends the rotating pair  e^{i w t} op + e^{-i w t} op^dagger.
inline void append_rotating_pair(std::vector<HamiltonianTerm>& terms,
                                 double omega, const SparseOperator& op) {
  terms.push_back({omega, op});
  terms.push_back({-omega, SparseOperator(op.adjoint())});
}

inline void require_work_qutrit(int l, const SystemLayout& layout,
                                bool pulsed_only) {
  const int lo = pulsed_only ? 2 : 1;
  if (l < lo || l > layout.work_qutrit_count)
    throw std::invalid_argument("invalid work qutrit index " +
                                std::to_string(l));
}

inline void require_cavity(int l, const SystemLayout& layout) {
  if (l < 1 || l > layout.cavity_count)
    throw std::invalid_argument("invalid cavity index " + std::to_string(l));
}

}  // namespace detail

/// Inter-cavity photon-hopping crosstalk terms:
///   sum_{l<k} g_lk ( e^{i Delta_lk t} a_l a_k^dagger + h.c. ),
/// with Delta_lk = w_ck - w_cl. Empty when fewer than two cavities or when
/// the crosstalk ratio is zero.
inline std::vector<HamiltonianTerm> crosstalk_terms(const PhysicalParams& p,
                                                    const SystemLayout& layout) {
  std::vector<HamiltonianTerm> terms;
  const double g_lk = p.g_crosstalk();
  if (g_lk == 0.0 || layout.cavity_count < 2) return terms;
  const SparseOperator a_local = hilbert::annihilation_op(layout.photon_cutoff);
  for (int l = 1; l <= layout.cavity_count; ++l) {
    for (int k = l + 1; k <= layout.cavity_count; ++k) {
      const SparseOperator a_l =
          hilbert::embed(a_local, SubsystemId::cavity(l), layout);
      const SparseOperator a_k_dag = SparseOperator(
          hilbert::embed(a_local, SubsystemId::cavity(k), layout).adjoint());
      SparseOperator hop = SparseOperator(g_lk * (a_l * a_k_dag));
      hop.makeCompressed();
      detail::append_rotating_pair(terms, p.delta_lk(l, k), hop);
    }
  }
  return terms;
}

/// Terms of the classical drive on work qutrit l with phase phi:
/// resonant |1>-|2> part, plus (modified) the detuned |0>-|1> sideband.
inline std::vector<HamiltonianTerm> pulse_terms(int l, double phi,
                                                bool modified,
                                                const PhysicalParams& p,
                                                const SystemLayout& layout) {
  detail::require_work_qutrit(l, layout, /*pulsed_only=*/true);
  std::vector<HamiltonianTerm> terms;
  const Complex e_iphi = std::exp(Complex(0.0, phi));

  SparseOperator drive = hilbert::embed(hilbert::transition_op(1, 2),
                                        SubsystemId::work(l), layout);
  terms.push_back({0.0, detail::plus_adjoint(SparseOperator(
                            (p.omega * e_iphi) * drive))});

  if (modified && p.omega_tilde() != 0.0) {
    SparseOperator sideband = hilbert::embed(hilbert::transition_op(0, 1),
                                             SubsystemId::work(l), layout);
    detail::append_rotating_pair(
        terms, -p.delta_omega_tilde,
        SparseOperator((p.omega_tilde() * e_iphi) * sideband));
  }
  return terms;
}

/// Terms of the ancilla-only resonant exchange with cavity l: the resonant
/// ancilla |0>-|1> coupling, plus (modified) the detuned ancilla |1>-|2>
/// sideband.
inline std::vector<HamiltonianTerm> qutrit_cavity_terms(
    int l, bool modified, const PhysicalParams& p, const SystemLayout& layout) {
  detail::require_cavity(l, layout);
  std::vector<HamiltonianTerm> terms;
  const SparseOperator a_dag = SparseOperator(
      hilbert::embed(hilbert::annihilation_op(layout.photon_cutoff),
                     SubsystemId::cavity(l), layout)
          .adjoint());

  const SparseOperator anc01 = hilbert::embed(
      hilbert::transition_op(0, 1), SubsystemId::ancilla(), layout);
  terms.push_back({0.0, detail::plus_adjoint(SparseOperator(
                            p.g_of(l) * (a_dag * anc01)))});

  if (modified && p.g_tilde_of(l) != 0.0) {
    const SparseOperator anc12 = hilbert::embed(
        hilbert::transition_op(1, 2), SubsystemId::ancilla(), layout);
    detail::append_rotating_pair(
        terms, p.delta_omega_a,
        SparseOperator(p.g_tilde_of(l) * (a_dag * anc12)));
  }
  return terms;
}

/// Terms of the collective resonant exchange of cavity l with its resident
/// qutrit and the ancilla, plus (modified) the two detuned |1>-|2> sidebands.
inline std::vector<HamiltonianTerm> two_qutrit_cavity_terms(
    int l, bool modified, const PhysicalParams& p, const SystemLayout& layout) {
  detail::require_cavity(l, layout);
  detail::require_work_qutrit(l, layout, /*pulsed_only=*/false);
  std::vector<HamiltonianTerm> terms;
  const SparseOperator a_dag = SparseOperator(
      hilbert::embed(hilbert::annihilation_op(layout.photon_cutoff),
                     SubsystemId::cavity(l), layout)
          .adjoint());

  const SparseOperator qutrit01 = hilbert::embed(
      hilbert::transition_op(0, 1), SubsystemId::work(l), layout);
  const SparseOperator anc01 = hilbert::embed(
      hilbert::transition_op(0, 1), SubsystemId::ancilla(), layout);
  SparseOperator resonant =
      SparseOperator(p.mu_of(l) * (a_dag * qutrit01)) +
      SparseOperator(p.g_of(l) * (a_dag * anc01));
  terms.push_back({0.0, detail::plus_adjoint(resonant)});

  if (modified) {
    if (p.mu_tilde_of(l) != 0.0) {
      const SparseOperator qutrit12 = hilbert::embed(
          hilbert::transition_op(1, 2), SubsystemId::work(l), layout);
      detail::append_rotating_pair(
          terms, p.delta_omega,
          SparseOperator(p.mu_tilde_of(l) * (a_dag * qutrit12)));
    }
    if (p.g_tilde_of(l) != 0.0) {
      const SparseOperator anc12 = hilbert::embed(
          hilbert::transition_op(1, 2), SubsystemId::ancilla(), layout);
      detail::append_rotating_pair(
          terms, p.delta_omega_a,
          SparseOperator(p.g_tilde_of(l) * (a_dag * anc12)));
    }
  }
  return terms;
}

// ---------------------------------------------------------------------------
// Point-evaluation factories. The ideal ones are time-independent; the
// modified ones take the absolute protocol time and include the crosstalk.
// ---------------------------------------------------------------------------

inline SparseOperator h_pulse_ideal(int l, double phi, const PhysicalParams& p,
                                    const SystemLayout& layout) {
  const long dim = hilbert::build_space(layout).total_dim;
  return assemble_at(pulse_terms(l, phi, /*modified=*/false, p, layout), 0.0,
                     dim);
}

inline SparseOperator h_qutrit_cavity_ideal(int l, const PhysicalParams& p,
                                            const SystemLayout& layout) {
  const long dim = hilbert::build_space(layout).total_dim;
  return assemble_at(qutrit_cavity_terms(l, /*modified=*/false, p, layout),
                     0.0, dim);
}

inline SparseOperator h_two_qutrit_cavity_ideal(int l, const PhysicalParams& p,
                                                const SystemLayout& layout) {
  const long dim = hilbert::build_space(layout).total_dim;
  return assemble_at(two_qutrit_cavity_terms(l, /*modified=*/false, p, layout),
                     0.0, dim);
}

inline SparseOperator h_crosstalk(double t, const PhysicalParams& p,
                                  const SystemLayout& layout) {
  const long dim = hilbert::build_space(layout).total_dim;
  return assemble_at(crosstalk_terms(p, layout), t, dim);
}

inline SparseOperator h_pulse_modified(int l, double t, double phi,
                                       const PhysicalParams& p,
                                       const SystemLayout& layout) {
  auto terms = pulse_terms(l, phi, /*modified=*/true, p, layout);
  auto cross = crosstalk_terms(p, layout);
  terms.insert(terms.end(), cross.begin(), cross.end());
  return assemble_at(terms, t, hilbert::build_space(layout).total_dim);
}

inline SparseOperator h_qutrit_cavity_modified(int l, double t,
                                               const PhysicalParams& p,
                                               const SystemLayout& layout) {
  auto terms = qutrit_cavity_terms(l, /*modified=*/true, p, layout);
  auto cross = crosstalk_terms(p, layout);
  terms.insert(terms.end(), cross.begin(), cross.end());
  return assemble_at(terms, t, hilbert::build_space(layout).total_dim);
}

inline SparseOperator h_two_qutrit_cavity_modified(int l, double t,
                                                   const PhysicalParams& p,
                                                   const SystemLayout& layout) {
  auto terms = two_qutrit_cavity_terms(l, /*modified=*/true, p, layout);
  auto cross = crosstalk_terms(p, layout);
  terms.insert(terms.end(), cross.begin(), cross.end());
  return assemble_at(terms, t, hilbert::build_space(layout).total_dim);
}

// ---------------------------------------------------------------------------
// Feasibility arithmetic
// ---------------------------------------------------------------------------

/// Capacitive crosstalk estimate: g_lk = g * C_l / (sum C + C_a), one value
/// per cavity l.
inline std::vector<double> estimate_crosstalk(
    const std::vector<double>& cavity_capacitances, double ancilla_capacitance,
    double g) {
  if (ancilla_capacitance <= 0.0)
    throw std::invalid_argument("ancilla capacitance must be > 0");
  double c_sigma = ancilla_capacitance;
  for (double c_l : cavity_capacitances) {
    if (c_l <= 0.0) throw std::invalid_argument("capacitances must be > 0");
    c_sigma += c_l;
  }
  std::vector<double> estimates;
  estimates.reserve(cavity_capacitances.size());
  for (double c_l : cavity_capacitances) estimates.push_back(g * c_l / c_sigma);
  return estimates;
}

/// Photon lifetime of a cavity mode: kappa^{-1} = Q / w_c (seconds).
inline double cavity_lifetime(double quality_factor, double omega_cavity) {
  if (quality_factor <= 0.0 || omega_cavity <= 0.0)
    throw std::invalid_argument("quality factor and frequency must be > 0");
  return quality_factor / omega_cavity;
}

}  // namespace cpgate::hamiltonian

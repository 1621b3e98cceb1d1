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

// Compilation of the controlled-phase protocols into explicit timed segment
// lists:
//
//  * the three-qubit eight-step sequence,
//  * the general n-qubit sequence of 2n+2 labeled operations,
//  * the Toffoli wrapper (Hadamard conjugation of the target),
//  * the single-cavity variant where atoms are physically transported,
//
// plus the closed-form timing budget and the uniform interaction-time error
// knob. Level-adjust (and transport) overheads are materialized as explicit
// zero-coupling segments so the dissipative engine can apply decoherence
// during them.

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpgate/hamiltonian.hpp"
#include "cpgate/hilbert.hpp"

namespace cpgate::schedule {

using hamiltonian::HamiltonianKind;
using hamiltonian::HamiltonianTerm;
using hamiltonian::PhysicalParams;
using hamiltonian::kPi;
using hamiltonian::kSqrt2;
using hilbert::SystemLayout;

/// What kind of control configuration a segment realizes.
enum class SegmentClass {
  kPulse,                ///< classical drive on one or more work qutrits
  kTwoQutritResonant,    ///< qutrit l and ancilla both resonant with cavity l
  kAncillaOnlyResonant,  ///< only the ancilla resonant with cavity l
  kAdjust,               ///< level-spacing retuning; no engineered coupling
  kTransport,            ///< atom transport (single-cavity variant)
};

/// One active classical drive during a Pulse segment.
struct PulseDrive {
  int qutrit = 0;     ///< driven work qutrit (1-based)
  double omega = 0.0; ///< Rabi frequency (rad/s)
  double phi = 0.0;   ///< drive phase (rad)
  bool operator==(const PulseDrive&) const = default;
};

/// One contiguous stretch of the protocol with a fixed control configuration.
struct ScheduleSegment {
  std::string label;
  double duration = 0.0;  ///< seconds
  SegmentClass segment_class = SegmentClass::kAdjust;
  HamiltonianKind hamiltonian_kind = HamiltonianKind::kCrosstalkOnly;
  int cavity = 0;           ///< resonant cavity (1-based; 0 = none)
  int resonant_qutrit = 0;  ///< work qutrit coupled in kTwoQutritResonant
  int operation = 0;        ///< which labeled protocol operation this belongs
                            ///< to (0 for Adjust/Transport overhead)
  int hadamard_qutrit = 0;  ///< nonzero: exact |0>-|1> Hadamard on that qutrit
  std::vector<PulseDrive> pulses;  ///< active drives (Pulse segments)
  bool operator==(const ScheduleSegment&) const = default;
};

/// A compiled protocol: an ordered segment list plus the layout and the
/// parameter snapshot it was compiled against.
struct GateSchedule {
  int qubit_count = 0;
  SystemLayout layout;
  PhysicalParams params;
  std::vector<ScheduleSegment> segments;

  double total_duration() const {
    double sum = 0.0;
    for (const ScheduleSegment& s : segments) sum += s.duration;
    return sum;
  }

  /// Number of distinct labeled protocol operations (overhead segments have
  /// operation index 0 and are excluded).
  int labeled_operation_count() const {
    std::set<int> ops;
    for (const ScheduleSegment& s : segments)
      if (s.operation > 0) ops.insert(s.operation);
    return static_cast<int>(ops.size());
  }

  /// Number of interaction sub-segments (everything except overhead).
  int interaction_segment_count() const {
    int count = 0;
    for (const ScheduleSegment& s : segments)
      if (s.segment_class != SegmentClass::kAdjust &&
          s.segment_class != SegmentClass::kTransport)
        ++count;
    return count;
  }
};

namespace detail {

inline bool is_overhead(const ScheduleSegment& s) {
  return s.segment_class == SegmentClass::kAdjust ||
         s.segment_class == SegmentClass::kTransport;
}

/// True when nothing changes across the boundary: two consecutive
/// ancilla-only sub-segments on the same cavity belong to adjacent operations
/// but share one uninterrupted control configuration.
inline bool is_null_boundary(const ScheduleSegment& prev,
                             const ScheduleSegment& next) {
  return prev.segment_class == SegmentClass::kAncillaOnlyResonant &&
         next.segment_class == SegmentClass::kAncillaOnlyResonant &&
         prev.cavity == next.cavity;
}

/// Number of level-adjust slots at the boundary between two interaction
/// sub-segments. Turning the opening drive off is free (the first boundary
/// costs nothing), a null boundary costs nothing, every other boundary costs
/// one slot, and moving the ancilla's resonance from one cavity to another
/// costs one extra. This reproduces the closed-form overhead count 6n-5.
inline int adjust_slots(const ScheduleSegment& prev,
                        const ScheduleSegment& next) {
  if (is_null_boundary(prev, next)) return 0;
  if (prev.segment_class == SegmentClass::kPulse && prev.operation == 1)
    return 0;
  int slots = 1;
  if (prev.cavity != 0 && next.cavity != 0 && prev.cavity != next.cavity)
    ++slots;
  return slots;
}

inline ScheduleSegment make_adjust(double tau_a) {
  ScheduleSegment s;
  s.label = "adjust";
  s.duration = tau_a;
  s.segment_class = SegmentClass::kAdjust;
  s.hamiltonian_kind = HamiltonianKind::kCrosstalkOnly;
  return s;
}

inline ScheduleSegment make_transport(double tau_m) {
  ScheduleSegment s;
  s.label = "transport";
  s.duration = tau_m;
  s.segment_class = SegmentClass::kTransport;
  s.hamiltonian_kind = HamiltonianKind::kZero;
  return s;
}

/// Interleaves Adjust segments between interaction sub-segments.
inline std::vector<ScheduleSegment> with_adjusts(
    const std::vector<ScheduleSegment>& interaction, double tau_a) {
  std::vector<ScheduleSegment> out;
  for (std::size_t i = 0; i < interaction.size(); ++i) {
    out.push_back(interaction[i]);
    if (i + 1 < interaction.size()) {
      const int slots = adjust_slots(interaction[i], interaction[i + 1]);
      for (int k = 0; k < slots; ++k) out.push_back(make_adjust(tau_a));
    }
  }
  return out;
}

/// Interleaves Transport segments: one at every non-null boundary.
inline std::vector<ScheduleSegment> with_transports(
    const std::vector<ScheduleSegment>& interaction, double tau_m) {
  std::vector<ScheduleSegment> out;
  for (std::size_t i = 0; i < interaction.size(); ++i) {
    out.push_back(interaction[i]);
    if (i + 1 < interaction.size() &&
        !is_null_boundary(interaction[i], interaction[i + 1]))
      out.push_back(make_transport(tau_m));
  }
  return out;
}

inline ScheduleSegment make_pulse(const std::string& label, int operation,
                                  double duration, double phi,
                                  const PhysicalParams& p, int first_qutrit,
                                  int last_qutrit) {
  ScheduleSegment s;
  s.label = label;
  s.duration = duration;
  s.segment_class = SegmentClass::kPulse;
  s.hamiltonian_kind = HamiltonianKind::kPulseIdeal;
  s.operation = operation;
  for (int l = first_qutrit; l <= last_qutrit; ++l)
    s.pulses.push_back({l, p.omega, phi});
  return s;
}

inline ScheduleSegment make_tc(const std::string& label, int operation,
                               int cavity, int qutrit, double duration) {
  ScheduleSegment s;
  s.label = label;
  s.duration = duration;
  s.segment_class = SegmentClass::kTwoQutritResonant;
  s.hamiltonian_kind = HamiltonianKind::kTwoQutritCavityIdeal;
  s.cavity = cavity;
  s.resonant_qutrit = qutrit;
  s.operation = operation;
  return s;
}

inline ScheduleSegment make_jc(const std::string& label, int operation,
                               int cavity, double duration) {
  ScheduleSegment s;
  s.label = label;
  s.duration = duration;
  s.segment_class = SegmentClass::kAncillaOnlyResonant;
  s.hamiltonian_kind = HamiltonianKind::kQutritCavityIdeal;
  s.cavity = cavity;
  s.operation = operation;
  return s;
}

}  // namespace detail

/// Closed-form total gate time for the n-qubit protocol:
///   tau = pi/Omega + sqrt(2) pi / g_1 + sum_{j=3}^{n} 4 pi / g_{j-1}
///       + 3 pi / g_n + (6n - 5) tau_a .
inline double timing_budget(int n, const PhysicalParams& p) {
  if (n < 2) throw std::invalid_argument("timing_budget requires n >= 2");
  double tau = kPi / p.omega + kSqrt2 * kPi / p.g_of(1) + 3.0 * kPi / p.g_of(n);
  for (int j = 3; j <= n; ++j) tau += 4.0 * kPi / p.g_of(j - 1);
  tau += (6.0 * n - 5.0) * p.tau_a;
  return tau;
}

/// Compiles the n-qubit controlled-phase protocol (n >= 2): parking pulse,
/// collective/ancilla-only exchange ladder down the cavity chain and back,
/// unparking pulse — 2n+2 labeled operations with 6n-5 level-adjust slots.
inline GateSchedule compile_nqubit(int n, const PhysicalParams& p) {
  if (n < 2) throw std::invalid_argument("compile_nqubit requires n >= 2");
  hamiltonian::validate(p);

  GateSchedule sched;
  sched.qubit_count = n;
  sched.layout.work_qutrit_count = n;
  sched.layout.ancilla_present = true;
  sched.layout.cavity_count = n;
  sched.layout.photon_cutoff = 1;
  sched.params = p;

  auto tc_time = [&p](int l) { return kPi / (kSqrt2 * p.g_of(l)); };
  auto u_label = [](int k, const char* part) {
    return "U" + std::to_string(k) + "/" + part;
  };

  std::vector<ScheduleSegment> segs;
  segs.push_back(detail::make_pulse(u_label(1, "pulse"), 1,
                                    kPi / (2.0 * p.omega), -kPi / 2.0, p, 2,
                                    n));
  segs.push_back(detail::make_tc(u_label(2, "tc"), 2, 1, 1, tc_time(1)));
  for (int l = 2; l <= n - 1; ++l) {
    segs.push_back(
        detail::make_tc(u_label(l + 1, "tc"), l + 1, l, l, tc_time(l)));
    segs.push_back(detail::make_jc(u_label(l + 1, "jc"), l + 1, l,
                                   2.0 * kPi / p.g_of(l) - tc_time(l)));
  }
  segs.push_back(
      detail::make_tc(u_label(n + 1, "tc"), n + 1, n, n, tc_time(n)));
  segs.push_back(detail::make_jc(u_label(n + 1, "jc"), n + 1, n,
                                 kPi / p.g_of(n) - tc_time(n)));
  for (int l = 1; l <= n - 1; ++l) {
    const int k = n - l + 1;  // cavity revisited on the way back
    segs.push_back(detail::make_jc(u_label(n + 1 + l, "jc"), n + 1 + l, k,
                                   2.0 * kPi / p.g_of(k) - tc_time(k)));
    segs.push_back(
        detail::make_tc(u_label(n + 1 + l, "tc"), n + 1 + l, k, k, tc_time(k)));
  }
  segs.push_back(
      detail::make_tc(u_label(2 * n + 1, "tc"), 2 * n + 1, 1, 1, tc_time(1)));
  segs.push_back(detail::make_pulse(u_label(2 * n + 2, "pulse"), 2 * n + 2,
                                    kPi / (2.0 * p.omega), kPi / 2.0, p, 2, n));

  sched.segments = detail::with_adjusts(segs, p.tau_a);
  return sched;
}

/// The canonical three-qubit sequence, emitted step by step. Structurally
/// identical to compile_nqubit(3) (same durations, classes and cavities);
/// kept as an independent code path so the two can cross-check each other.
inline GateSchedule compile_3qubit(const PhysicalParams& p) {
  hamiltonian::validate(p);

  GateSchedule sched;
  sched.qubit_count = 3;
  sched.layout.work_qutrit_count = 3;
  sched.layout.ancilla_present = true;
  sched.layout.cavity_count = 3;
  sched.layout.photon_cutoff = 1;
  sched.params = p;

  const double tc1 = kPi / (kSqrt2 * p.g_of(1));
  const double tc2 = kPi / (kSqrt2 * p.g_of(2));
  const double tc3 = kPi / (kSqrt2 * p.g_of(3));

  std::vector<ScheduleSegment> segs;
  // Step 1: park |1> -> |2> on qutrits 2 and 3.
  segs.push_back(detail::make_pulse("Step1/pulse", 1, kPi / (2.0 * p.omega),
                                    -kPi / 2.0, p, 2, 3));
  // Step 2: move qutrit 1's excitation onto the ancilla via cavity 1.
  segs.push_back(detail::make_tc("Step2/tc", 2, 1, 1, tc1));
  // Step 3: total ancilla exposure 2 pi / g_2 on cavity 2.
  segs.push_back(detail::make_tc("Step3/tc", 3, 2, 2, tc2));
  segs.push_back(
      detail::make_jc("Step3/jc", 3, 2, 2.0 * kPi / p.g_of(2) - tc2));
  // Step 4: total ancilla exposure pi / g_3 on cavity 3.
  segs.push_back(detail::make_tc("Step4/tc", 4, 3, 3, tc3));
  segs.push_back(detail::make_jc("Step4/jc", 4, 3, kPi / p.g_of(3) - tc3));
  // Step 5: completes cavity 3 to 2 pi / g_3 and takes the excitation back.
  segs.push_back(
      detail::make_jc("Step5/jc", 5, 3, 2.0 * kPi / p.g_of(3) - tc3));
  segs.push_back(detail::make_tc("Step5/tc", 5, 3, 3, tc3));
  // Step 6: same on cavity 2.
  segs.push_back(
      detail::make_jc("Step6/jc", 6, 2, 2.0 * kPi / p.g_of(2) - tc2));
  segs.push_back(detail::make_tc("Step6/tc", 6, 2, 2, tc2));
  // Step 7: return the excitation to qutrit 1.
  segs.push_back(detail::make_tc("Step7/tc", 7, 1, 1, tc1));
  // Step 8: unpark |2> -> |1| on qutrits 2 and 3.
  segs.push_back(detail::make_pulse("Step8/pulse", 8, kPi / (2.0 * p.omega),
                                    kPi / 2.0, p, 2, 3));

  sched.segments = detail::with_adjusts(segs, p.tau_a);
  return sched;
}

/// Wraps the n-qubit controlled-phase gate in exact Hadamard segments on the
/// last qubit: 2n+4 labeled operations realizing the n-qubit Toffoli.
///
/// The Hadamard is applied as an exact map by the ideal engine; it is not
/// realizable as a single resonant |0>-|1> rotation (a rotation has unit
/// determinant, the Hadamard does not), so the dissipative engine rejects
/// these segments. The nominal duration is that of a quarter rotation.
inline GateSchedule compile_toffoli(int n, const PhysicalParams& p) {
  GateSchedule sched = compile_nqubit(n, p);
  for (ScheduleSegment& s : sched.segments)
    if (s.operation > 0) ++s.operation;

  ScheduleSegment h;
  h.duration = kPi / (4.0 * p.omega);
  h.segment_class = SegmentClass::kPulse;
  h.hamiltonian_kind = HamiltonianKind::kPulseIdeal;
  h.hadamard_qutrit = n;

  ScheduleSegment h_pre = h;
  h_pre.label = "H/pre";
  h_pre.operation = 1;
  ScheduleSegment h_post = h;
  h_post.label = "H/post";
  h_post.operation = 2 * n + 4;

  sched.segments.insert(sched.segments.begin(), h_pre);
  sched.segments.push_back(h_post);
  return sched;
}

/// The single-cavity variant: same logical three-qubit sequence, but every
/// exchange happens in one cavity and the qutrits are physically moved in and
/// out, costing one Transport slot of tau_m at each reconfiguration (10 in
/// total). Total duration: pi/Omega + (sqrt(2)+7) pi/g + 10 tau_m.
inline GateSchedule compile_atom_single_cavity(const PhysicalParams& p) {
  hamiltonian::validate(p);

  GateSchedule sched;
  sched.qubit_count = 3;
  sched.layout.work_qutrit_count = 3;
  sched.layout.ancilla_present = true;
  sched.layout.cavity_count = 1;
  sched.layout.photon_cutoff = 1;
  sched.params = p;

  const double tc = kPi / (kSqrt2 * p.g);
  std::vector<ScheduleSegment> segs;
  segs.push_back(detail::make_pulse("Step1/pulse", 1, kPi / (2.0 * p.omega),
                                    -kPi / 2.0, p, 2, 3));
  segs.push_back(detail::make_tc("Step2/tc", 2, 1, 1, tc));
  segs.push_back(detail::make_tc("Step3/tc", 3, 1, 2, tc));
  segs.push_back(detail::make_jc("Step3/jc", 3, 1, 2.0 * kPi / p.g - tc));
  segs.push_back(detail::make_tc("Step4/tc", 4, 1, 3, tc));
  segs.push_back(detail::make_jc("Step4/jc", 4, 1, kPi / p.g - tc));
  segs.push_back(detail::make_jc("Step5/jc", 5, 1, 2.0 * kPi / p.g - tc));
  segs.push_back(detail::make_tc("Step5/tc", 5, 1, 3, tc));
  segs.push_back(detail::make_jc("Step6/jc", 6, 1, 2.0 * kPi / p.g - tc));
  segs.push_back(detail::make_tc("Step6/tc", 6, 1, 2, tc));
  segs.push_back(detail::make_tc("Step7/tc", 7, 1, 1, tc));
  segs.push_back(detail::make_pulse("Step8/pulse", 8, kPi / (2.0 * p.omega),
                                    kPi / 2.0, p, 2, 3));

  sched.segments = detail::with_transports(segs, p.tau_m);
  return sched;
}

/// Closed-form duration of the single-cavity variant.
inline double atom_timing_budget(const PhysicalParams& p) {
  return kPi / p.omega + (kSqrt2 + 7.0) * kPi / p.g + 10.0 * p.tau_m;
}

/// Adds dt to the duration of every interaction sub-segment (Pulse and both
/// resonant classes); overhead segments are untouched. Throws if any duration
/// would become nonpositive.
inline GateSchedule apply_time_error(const GateSchedule& schedule, double dt) {
  GateSchedule out = schedule;
  for (ScheduleSegment& s : out.segments) {
    if (detail::is_overhead(s)) continue;
    s.duration += dt;
    if (s.duration <= 0.0)
      throw std::invalid_argument(
          "time error makes segment '" + s.label + "' nonpositive");
  }
  return out;
}

/// Structural well-formedness: class/kind pairing, index ranges, durations.
inline void validate_schedule(const GateSchedule& schedule) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::logic_error("malformed schedule: " + what);
  };
  require(schedule.qubit_count >= 2, "qubit_count");
  for (const ScheduleSegment& s : schedule.segments) {
    switch (s.segment_class) {
      case SegmentClass::kPulse:
        require(s.hamiltonian_kind == HamiltonianKind::kPulseIdeal,
                s.label + " kind");
        require(s.duration > 0.0, s.label + " duration");
        require(!s.pulses.empty() || s.hadamard_qutrit != 0,
                s.label + " drives");
        break;
      case SegmentClass::kTwoQutritResonant:
        require(s.hamiltonian_kind == HamiltonianKind::kTwoQutritCavityIdeal,
                s.label + " kind");
        require(s.duration > 0.0, s.label + " duration");
        require(s.cavity >= 1 && s.cavity <= schedule.layout.cavity_count,
                s.label + " cavity");
        require(s.resonant_qutrit >= 1 &&
                    s.resonant_qutrit <= schedule.layout.work_qutrit_count,
                s.label + " resonant qutrit");
        break;
      case SegmentClass::kAncillaOnlyResonant:
        require(s.hamiltonian_kind == HamiltonianKind::kQutritCavityIdeal,
                s.label + " kind");
        require(s.duration > 0.0, s.label + " duration");
        require(s.cavity >= 1 && s.cavity <= schedule.layout.cavity_count,
                s.label + " cavity");
        break;
      case SegmentClass::kAdjust:
        require(s.hamiltonian_kind == HamiltonianKind::kCrosstalkOnly,
                s.label + " kind");
        require(s.duration >= 0.0, s.label + " duration");
        break;
      case SegmentClass::kTransport:
        require(s.hamiltonian_kind == HamiltonianKind::kZero,
                s.label + " kind");
        require(s.duration >= 0.0, s.label + " duration");
        break;
    }
  }
}

/// Hamiltonian term list realizing one segment. `modified` switches on the
/// detuned sidebands and the inter-cavity crosstalk; the ideal flavor of an
/// overhead segment is an empty list (free evolution).
inline std::vector<HamiltonianTerm> terms_for_segment(
    const ScheduleSegment& segment, const PhysicalParams& p,
    const SystemLayout& layout, bool modified) {
  std::vector<HamiltonianTerm> terms;
  switch (segment.segment_class) {
    case SegmentClass::kPulse: {
      if (segment.hadamard_qutrit != 0)
        throw std::invalid_argument(
            "Hadamard segments have no drive realization");
      for (const PulseDrive& drive : segment.pulses) {
        auto t = hamiltonian::pulse_terms(drive.qutrit, drive.phi, modified, p,
                                          layout);
        terms.insert(terms.end(), t.begin(), t.end());
      }
      break;
    }
    case SegmentClass::kTwoQutritResonant: {
      if (segment.resonant_qutrit != segment.cavity)
        throw std::invalid_argument(
            "numerical model requires qutrit l resonant with cavity l");
      auto t = hamiltonian::two_qutrit_cavity_terms(segment.cavity, modified,
                                                    p, layout);
      terms.insert(terms.end(), t.begin(), t.end());
      break;
    }
    case SegmentClass::kAncillaOnlyResonant: {
      auto t =
          hamiltonian::qutrit_cavity_terms(segment.cavity, modified, p, layout);
      terms.insert(terms.end(), t.begin(), t.end());
      break;
    }
    case SegmentClass::kAdjust:
    case SegmentClass::kTransport:
      break;
  }
  if (modified && segment.segment_class != SegmentClass::kTransport) {
    auto cross = hamiltonian::crosstalk_terms(p, layout);
    terms.insert(terms.end(), cross.begin(), cross.end());
  }
  return terms;
}

// ---------------------------------------------------------------------------
// JSON serialization (audit/replay). Round-trips are lossless: doubles are
// emitted with shortest-round-trip precision by the JSON library.
// ---------------------------------------------------------------------------

inline const char* to_string(SegmentClass c) {
  switch (c) {
    case SegmentClass::kPulse: return "pulse";
    case SegmentClass::kTwoQutritResonant: return "two_qutrit_resonant";
    case SegmentClass::kAncillaOnlyResonant: return "ancilla_only_resonant";
    case SegmentClass::kAdjust: return "adjust";
    case SegmentClass::kTransport: return "transport";
  }
  throw std::logic_error("unreachable segment class");
}

inline SegmentClass segment_class_from_string(const std::string& s) {
  if (s == "pulse") return SegmentClass::kPulse;
  if (s == "two_qutrit_resonant") return SegmentClass::kTwoQutritResonant;
  if (s == "ancilla_only_resonant") return SegmentClass::kAncillaOnlyResonant;
  if (s == "adjust") return SegmentClass::kAdjust;
  if (s == "transport") return SegmentClass::kTransport;
  throw std::invalid_argument("unknown segment class: " + s);
}

inline const char* to_string(HamiltonianKind k) {
  switch (k) {
    case HamiltonianKind::kPulseIdeal: return "pulse_ideal";
    case HamiltonianKind::kQutritCavityIdeal: return "qutrit_cavity_ideal";
    case HamiltonianKind::kTwoQutritCavityIdeal:
      return "two_qutrit_cavity_ideal";
    case HamiltonianKind::kPulseModified: return "pulse_modified";
    case HamiltonianKind::kQutritCavityModified:
      return "qutrit_cavity_modified";
    case HamiltonianKind::kTwoQutritCavityModified:
      return "two_qutrit_cavity_modified";
    case HamiltonianKind::kCrosstalkOnly: return "crosstalk_only";
    case HamiltonianKind::kZero: return "zero";
  }
  throw std::logic_error("unreachable hamiltonian kind");
}

inline HamiltonianKind kind_from_string(const std::string& s) {
  if (s == "pulse_ideal") return HamiltonianKind::kPulseIdeal;
  if (s == "qutrit_cavity_ideal") return HamiltonianKind::kQutritCavityIdeal;
  if (s == "two_qutrit_cavity_ideal")
    return HamiltonianKind::kTwoQutritCavityIdeal;
  if (s == "pulse_modified") return HamiltonianKind::kPulseModified;
  if (s == "qutrit_cavity_modified")
    return HamiltonianKind::kQutritCavityModified;
  if (s == "two_qutrit_cavity_modified")
    return HamiltonianKind::kTwoQutritCavityModified;
  if (s == "crosstalk_only") return HamiltonianKind::kCrosstalkOnly;
  if (s == "zero") return HamiltonianKind::kZero;
  throw std::invalid_argument("unknown hamiltonian kind: " + s);
}

inline nlohmann::json params_to_json(const PhysicalParams& p) {
  return nlohmann::json{{"omega", p.omega},
                        {"omega_tilde_factor", p.omega_tilde_factor},
                        {"g", p.g},
                        {"g_per_cavity", p.g_per_cavity},
                        {"c", p.c},
                        {"g_tilde_factor", p.g_tilde_factor},
                        {"mu_tilde_factor", p.mu_tilde_factor},
                        {"delta_omega", p.delta_omega},
                        {"delta_omega_a", p.delta_omega_a},
                        {"delta_omega_tilde", p.delta_omega_tilde},
                        {"omega_c", p.omega_c},
                        {"crosstalk_ratio", p.crosstalk_ratio},
                        {"gamma01", p.gamma01},
                        {"gamma12", p.gamma12},
                        {"gamma02", p.gamma02},
                        {"gamma1phi", p.gamma1phi},
                        {"gamma2phi", p.gamma2phi},
                        {"kappa", p.kappa},
                        {"tau_a", p.tau_a},
                        {"tau_m", p.tau_m},
                        {"dt_error", p.dt_error}};
}

inline PhysicalParams params_from_json(const nlohmann::json& j) {
  PhysicalParams p;
  j.at("omega").get_to(p.omega);
  j.at("omega_tilde_factor").get_to(p.omega_tilde_factor);
  j.at("g").get_to(p.g);
  j.at("g_per_cavity").get_to(p.g_per_cavity);
  j.at("c").get_to(p.c);
  j.at("g_tilde_factor").get_to(p.g_tilde_factor);
  j.at("mu_tilde_factor").get_to(p.mu_tilde_factor);
  j.at("delta_omega").get_to(p.delta_omega);
  j.at("delta_omega_a").get_to(p.delta_omega_a);
  j.at("delta_omega_tilde").get_to(p.delta_omega_tilde);
  j.at("omega_c").get_to(p.omega_c);
  j.at("crosstalk_ratio").get_to(p.crosstalk_ratio);
  j.at("gamma01").get_to(p.gamma01);
  j.at("gamma12").get_to(p.gamma12);
  j.at("gamma02").get_to(p.gamma02);
  j.at("gamma1phi").get_to(p.gamma1phi);
  j.at("gamma2phi").get_to(p.gamma2phi);
  j.at("kappa").get_to(p.kappa);
  j.at("tau_a").get_to(p.tau_a);
  j.at("tau_m").get_to(p.tau_m);
  j.at("dt_error").get_to(p.dt_error);
  return p;
}

inline nlohmann::json schedule_to_json(const GateSchedule& schedule) {
  nlohmann::json segments = nlohmann::json::array();
  for (const ScheduleSegment& s : schedule.segments) {
    nlohmann::json pulses = nlohmann::json::array();
    for (const PulseDrive& d : s.pulses)
      pulses.push_back({{"qutrit", d.qutrit}, {"omega", d.omega},
                        {"phi", d.phi}});
    segments.push_back({{"label", s.label},
                        {"duration", s.duration},
                        {"class", to_string(s.segment_class)},
                        {"kind", to_string(s.hamiltonian_kind)},
                        {"cavity", s.cavity},
                        {"resonant_qutrit", s.resonant_qutrit},
                        {"operation", s.operation},
                        {"hadamard_qutrit", s.hadamard_qutrit},
                        {"pulses", pulses}});
  }
  return nlohmann::json{
      {"qubit_count", schedule.qubit_count},
      {"layout",
       {{"work_qutrit_count", schedule.layout.work_qutrit_count},
        {"ancilla_present", schedule.layout.ancilla_present},
        {"cavity_count", schedule.layout.cavity_count},
        {"photon_cutoff", schedule.layout.photon_cutoff}}},
      {"params", params_to_json(schedule.params)},
      {"segments", segments}};
}

inline GateSchedule schedule_from_json(const nlohmann::json& j) {
  GateSchedule schedule;
  j.at("qubit_count").get_to(schedule.qubit_count);
  const auto& layout = j.at("layout");
  layout.at("work_qutrit_count").get_to(schedule.layout.work_qutrit_count);
  layout.at("ancilla_present").get_to(schedule.layout.ancilla_present);
  layout.at("cavity_count").get_to(schedule.layout.cavity_count);
  layout.at("photon_cutoff").get_to(schedule.layout.photon_cutoff);
  schedule.params = params_from_json(j.at("params"));
  for (const auto& js : j.at("segments")) {
    ScheduleSegment s;
    js.at("label").get_to(s.label);
    js.at("duration").get_to(s.duration);
    s.segment_class =
        segment_class_from_string(js.at("class").get<std::string>());
    s.hamiltonian_kind = kind_from_string(js.at("kind").get<std::string>());
    js.at("cavity").get_to(s.cavity);
    js.at("resonant_qutrit").get_to(s.resonant_qutrit);
    js.at("operation").get_to(s.operation);
    js.at("hadamard_qutrit").get_to(s.hadamard_qutrit);
    for (const auto& jd : js.at("pulses")) {
      PulseDrive d;
      jd.at("qutrit").get_to(d.qutrit);
      jd.at("omega").get_to(d.omega);
      jd.at("phi").get_to(d.phi);
      s.pulses.push_back(d);
    }
    schedule.segments.push_back(std::move(s));
  }
  return schedule;
}

inline std::string serialize_schedule(const GateSchedule& schedule) {
  return schedule_to_json(schedule).dump(2);
}

inline GateSchedule deserialize_schedule(const std::string& text) {
  return schedule_from_json(nlohmann::json::parse(text));
}

}  // namespace cpgate::schedule

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

#include "cpgate/schedule.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <map>
#include <vector>

#include "cpgate/ideal_dynamics.hpp"

namespace {

namespace hb = cpgate::hilbert;
namespace ham = cpgate::hamiltonian;
namespace sch = cpgate::schedule;
namespace idyn = cpgate::ideal_dynamics;

using ham::PhysicalParams;
using ham::kPi;
using ham::kSqrt2;
using hb::Complex;
using hb::StateVector;
using sch::GateSchedule;
using sch::ScheduleSegment;
using sch::SegmentClass;

int adjust_count(const GateSchedule& s) {
  int count = 0;
  for (const ScheduleSegment& seg : s.segments)
    if (seg.segment_class == SegmentClass::kAdjust) ++count;
  return count;
}

int transport_count(const GateSchedule& s) {
  int count = 0;
  for (const ScheduleSegment& seg : s.segments)
    if (seg.segment_class == SegmentClass::kTransport) ++count;
  return count;
}

/// Computational-basis input: qubit values on the work qutrits, ancilla in
/// |0>, cavities in vacuum.
StateVector basis_input(const std::vector<int>& bits,
                        const hb::SystemLayout& layout) {
  std::vector<int> labels = bits;
  labels.push_back(0);  // ancilla
  for (int l = 0; l < layout.cavity_count; ++l) labels.push_back(0);
  return hb::basis_state(labels, layout);
}

/// Checks the controlled-phase truth table: -1 on all-ones, +1 elsewhere,
/// ancilla and cavities returned exactly to vacuum.
void check_phase_gate_truth_table(const GateSchedule& sched, double tol) {
  const int n = sched.qubit_count;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> bits(n);
    for (int b = 0; b < n; ++b) bits[b] = (mask >> (n - 1 - b)) & 1;
    const StateVector input = basis_input(bits, sched.layout);
    const StateVector output = idyn::apply_schedule_ideal(sched, input);
    const double sign = (mask == (1 << n) - 1) ? -1.0 : 1.0;
    INFO("input mask " << mask);
    CHECK((output - sign * input).cwiseAbs().maxCoeff() < tol);
  }
}

}  // namespace

TEST_CASE("n-qubit compilation: operation and overhead counts") {
  const PhysicalParams p;
  for (int n = 2; n <= 10; ++n) {
    const GateSchedule s = sch::compile_nqubit(n, p);
    INFO("n = " << n);
    CHECK(s.labeled_operation_count() == 2 * n + 2);
    CHECK(adjust_count(s) == 6 * n - 5);
    CHECK(s.interaction_segment_count() == 4 * n);
    CHECK_NOTHROW(sch::validate_schedule(s));
  }
  CHECK_THROWS_AS(sch::compile_nqubit(1, p), std::invalid_argument);
}

TEST_CASE("timing budget equals the compiled sum and the closed form") {
  const PhysicalParams p;
  for (int n = 2; n <= 10; ++n) {
    const GateSchedule s = sch::compile_nqubit(n, p);
    const double budget = sch::timing_budget(n, p);
    INFO("n = " << n);
    CHECK(s.total_duration() == Catch::Approx(budget).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sch::timing_budget(1, p), std::invalid_argument);

  // tau_a = 0, n = 2: pi/Omega + sqrt(2) pi/g1 + 3 pi/g2.
  PhysicalParams no_adjust = p;
  no_adjust.tau_a = 0.0;
  CHECK(sch::timing_budget(2, no_adjust) ==
        Catch::Approx(kPi / p.omega + kSqrt2 * kPi / p.g + 3.0 * kPi / p.g)
            .epsilon(1e-12));
}

TEST_CASE("reference operating point takes about half a microsecond") {
  const PhysicalParams p;
  const double tau = sch::timing_budget(3, p);
  // pi/Omega + sqrt(2) pi/g + 4 pi/g + 3 pi/g + 13 ns at
  // g/2pi = 10 MHz, Omega/2pi = 15 MHz.
  CHECK(tau == Catch::Approx(467.05e-9).epsilon(1e-3));
  CHECK(tau >= 0.44e-6);
  CHECK(tau <= 0.52e-6);
}

TEST_CASE("tenfold couplings bring the gate to about 50 ns") {
  PhysicalParams fast;
  fast.g = ham::angular_from_mhz(100.0);
  fast.omega = ham::angular_from_mhz(150.0);
  fast.tau_a = 0.0;  // negligible next to the 10x faster interactions
  const double tau = sch::timing_budget(3, fast);
  CHECK(tau == Catch::Approx(45.40e-9).epsilon(1e-3));
  CHECK(tau >= 45e-9);
  CHECK(tau <= 55e-9);
}

TEST_CASE("three-qubit compiler matches the generic one structurally") {
  const PhysicalParams p;
  const GateSchedule a = sch::compile_3qubit(p);
  const GateSchedule b = sch::compile_nqubit(3, p);
  REQUIRE(a.segments.size() == b.segments.size());
  for (std::size_t i = 0; i < a.segments.size(); ++i) {
    INFO("segment " << i << " (" << a.segments[i].label << " vs "
                    << b.segments[i].label << ")");
    CHECK(a.segments[i].duration == b.segments[i].duration);
    CHECK(a.segments[i].segment_class == b.segments[i].segment_class);
    CHECK(a.segments[i].cavity == b.segments[i].cavity);
    CHECK(a.segments[i].resonant_qutrit == b.segments[i].resonant_qutrit);
    CHECK(a.segments[i].operation == b.segments[i].operation);
    CHECK(a.segments[i].pulses == b.segments[i].pulses);
  }
  CHECK(adjust_count(a) == 13);
}

TEST_CASE("middle operations expose the ancilla for full and half periods") {
  const PhysicalParams p;
  const GateSchedule s = sch::compile_3qubit(p);

  std::map<int, double> op_cavity_exposure;  // operation -> summed duration
  for (const ScheduleSegment& seg : s.segments)
    if (seg.cavity != 0) op_cavity_exposure[seg.operation] += seg.duration;

  // Step 3: total 2 pi / g_2; Step 4: total pi / g_3; Step 5: 2 pi / g_3;
  // Step 6: 2 pi / g_2; Steps 2 and 7: the half-swap pi / (sqrt(2) g_1).
  CHECK(op_cavity_exposure[3] ==
        Catch::Approx(2.0 * kPi / p.g_of(2)).epsilon(1e-12));
  CHECK(op_cavity_exposure[4] == Catch::Approx(kPi / p.g_of(3)).epsilon(1e-12));
  CHECK(op_cavity_exposure[5] ==
        Catch::Approx(2.0 * kPi / p.g_of(3)).epsilon(1e-12));
  CHECK(op_cavity_exposure[6] ==
        Catch::Approx(2.0 * kPi / p.g_of(2)).epsilon(1e-12));
  CHECK(op_cavity_exposure[2] ==
        Catch::Approx(kPi / (kSqrt2 * p.g_of(1))).epsilon(1e-12));
  CHECK(op_cavity_exposure[7] ==
        Catch::Approx(kPi / (kSqrt2 * p.g_of(1))).epsilon(1e-12));
}

TEST_CASE("cavity visits are palindromic") {
  const PhysicalParams p;
  for (int n : {2, 3, 5, 8}) {
    const GateSchedule s = sch::compile_nqubit(n, p);
    std::map<int, int> op_cavity;
    for (const ScheduleSegment& seg : s.segments)
      if (seg.cavity != 0) op_cavity[seg.operation] = seg.cavity;
    // Operation l+1 (forward ladder, cavity l) and operation 2n+2-l (return
    // ladder) visit the same cavity: index pairs summing to 2n+3.
    for (int l = 1; l <= n; ++l) {
      INFO("n = " << n << ", l = " << l);
      CHECK(op_cavity[l + 1] == l);
      CHECK(op_cavity[2 * n + 2 - l] == l);
    }
  }
}

TEST_CASE("per-cavity couplings shape the individual durations") {
  PhysicalParams p;
  p.g_per_cavity = {ham::angular_from_mhz(10.0), ham::angular_from_mhz(20.0),
                    ham::angular_from_mhz(5.0)};
  const GateSchedule s = sch::compile_nqubit(3, p);
  for (const ScheduleSegment& seg : s.segments) {
    if (seg.segment_class == SegmentClass::kTwoQutritResonant) {
      CHECK(seg.duration ==
            Catch::Approx(kPi / (kSqrt2 * p.g_of(seg.cavity))).epsilon(1e-12));
    }
  }
  CHECK(s.total_duration() ==
        Catch::Approx(sch::timing_budget(3, p)).epsilon(1e-12));
}

TEST_CASE("truth tables for two to five qubits are exact") {
  const PhysicalParams p;
  for (int n = 2; n <= 5; ++n) {
    INFO("n = " << n);
    check_phase_gate_truth_table(sch::compile_nqubit(n, p), 1e-10);
  }
  // The dedicated three-qubit compiler produces the same gate.
  check_phase_gate_truth_table(sch::compile_3qubit(p), 1e-10);
}

TEST_CASE("intermediate state after the second operation matches the trace") {
  const PhysicalParams p;
  const GateSchedule full = sch::compile_3qubit(p);

  // Truncate right after Step2/tc.
  GateSchedule prefix = full;
  prefix.segments.clear();
  for (const ScheduleSegment& seg : full.segments) {
    prefix.segments.push_back(seg);
    if (seg.label == "Step2/tc") break;
  }

  // Input |100>: the excitation of qutrit 1 moves onto the ancilla with a
  // sign flip: -|000>|1>_a|vacuum>.
  const StateVector input = basis_input({1, 0, 0}, full.layout);
  const StateVector after = idyn::apply_schedule_ideal(prefix, input);
  const StateVector expected =
      -hb::basis_state({0, 0, 0, 1, 0, 0, 0}, full.layout);
  CHECK((after - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("time error stretches exactly the interaction sub-segments") {
  const PhysicalParams p;
  const GateSchedule base = sch::compile_3qubit(p);
  const double dt = 5e-9;

  const GateSchedule shifted = sch::apply_time_error(base, dt);
  REQUIRE(shifted.segments.size() == base.segments.size());
  int stretched = 0;
  for (std::size_t i = 0; i < base.segments.size(); ++i) {
    const double delta =
        shifted.segments[i].duration - base.segments[i].duration;
    if (base.segments[i].segment_class == SegmentClass::kAdjust) {
      CHECK(delta == 0.0);
    } else {
      CHECK(delta == Catch::Approx(dt).epsilon(1e-12));
      ++stretched;
    }
  }
  CHECK(stretched == 12);  // 4n interaction sub-segments at n = 3
  CHECK(shifted.total_duration() ==
        Catch::Approx(base.total_duration() + 12 * dt).epsilon(1e-12));

  // Zero error: unchanged.
  const GateSchedule same = sch::apply_time_error(base, 0.0);
  for (std::size_t i = 0; i < base.segments.size(); ++i)
    CHECK(same.segments[i].duration == base.segments[i].duration);

  // An error that wipes out a segment is rejected.
  CHECK_THROWS_AS(sch::apply_time_error(base, -1.0), std::invalid_argument);
}

TEST_CASE("Toffoli wrapper adds two Hadamard operations") {
  const PhysicalParams p;
  for (int n : {2, 3, 6, 10}) {
    const GateSchedule s = sch::compile_toffoli(n, p);
    INFO("n = " << n);
    CHECK(s.labeled_operation_count() == 2 * n + 4);
    CHECK(s.segments.front().hadamard_qutrit == n);
    CHECK(s.segments.back().hadamard_qutrit == n);
    CHECK(adjust_count(s) == 6 * n - 5);
    CHECK_NOTHROW(sch::validate_schedule(s));
  }
  CHECK_THROWS_AS(sch::compile_toffoli(1, p), std::invalid_argument);
}

TEST_CASE("Toffoli truth table flips the target under all-ones controls") {
  const PhysicalParams p;
  const int n = 3;
  const GateSchedule s = sch::compile_toffoli(n, p);

  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> bits(n);
    for (int b = 0; b < n; ++b) bits[b] = (mask >> (n - 1 - b)) & 1;
    const StateVector input = basis_input(bits, s.layout);
    const StateVector output = idyn::apply_schedule_ideal(s, input);

    std::vector<int> expected_bits = bits;
    if (bits[0] == 1 && bits[1] == 1) expected_bits[2] = 1 - bits[2];
    const StateVector expected = basis_input(expected_bits, s.layout);
    INFO("input mask " << mask);
    CHECK((output - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("single-cavity variant: transports, duration, truth table") {
  const PhysicalParams atom = PhysicalParams::atom_defaults();
  const GateSchedule s = sch::compile_atom_single_cavity(atom);

  CHECK(s.layout.cavity_count == 1);
  CHECK(s.labeled_operation_count() == 8);
  CHECK(transport_count(s) == 10);
  CHECK(adjust_count(s) == 0);
  CHECK_NOTHROW(sch::validate_schedule(s));

  const double budget = sch::atom_timing_budget(atom);
  CHECK(s.total_duration() == Catch::Approx(budget).epsilon(1e-12));
  CHECK(budget == Catch::Approx(kPi / atom.omega +
                                (kSqrt2 + 7.0) * kPi / atom.g +
                                10.0 * atom.tau_m)
                      .epsilon(1e-12));
  // ~104 us at g = Omega = 2 pi * 50 kHz, tau_m = 1 us.
  CHECK(budget == Catch::Approx(104e-6).epsilon(0.01));
  CHECK(budget == Catch::Approx(104.14e-6).epsilon(1e-3));

  check_phase_gate_truth_table(s, 1e-10);
}

TEST_CASE("schedules serialize to JSON and back losslessly") {
  const PhysicalParams p;
  for (const GateSchedule& original :
       {sch::compile_nqubit(3, p), sch::compile_toffoli(2, p),
        sch::compile_atom_single_cavity(PhysicalParams::atom_defaults())}) {
    const std::string text = sch::serialize_schedule(original);
    const GateSchedule restored = sch::deserialize_schedule(text);

    CHECK(restored.qubit_count == original.qubit_count);
    CHECK(restored.layout == original.layout);
    REQUIRE(restored.segments.size() == original.segments.size());
    for (std::size_t i = 0; i < original.segments.size(); ++i)
      CHECK(restored.segments[i] == original.segments[i]);
    // Second pass is byte-identical: the round trip is a fixed point.
    CHECK(sch::serialize_schedule(restored) == text);
  }
}

TEST_CASE("schedule validation catches corrupted segments") {
  const PhysicalParams p;
  GateSchedule s = sch::compile_nqubit(2, p);

  GateSchedule bad_kind = s;
  bad_kind.segments[1].hamiltonian_kind =
      ham::HamiltonianKind::kQutritCavityIdeal;  // tc segment, wrong kind
  CHECK_THROWS_AS(sch::validate_schedule(bad_kind), std::logic_error);

  GateSchedule bad_duration = s;
  bad_duration.segments[0].duration = -1e-9;
  CHECK_THROWS_AS(sch::validate_schedule(bad_duration), std::logic_error);

  GateSchedule bad_cavity = s;
  for (ScheduleSegment& seg : bad_cavity.segments)
    if (seg.cavity != 0) {
      seg.cavity = 9;
      break;
    }
  CHECK_THROWS_AS(sch::validate_schedule(bad_cavity), std::logic_error);
}

TEST_CASE("terms_for_segment realizes each configuration") {
  const PhysicalParams p;
  const GateSchedule s = sch::compile_nqubit(3, p);

  const ScheduleSegment* pulse = nullptr;
  const ScheduleSegment* tc = nullptr;
  const ScheduleSegment* jc = nullptr;
  const ScheduleSegment* adjust = nullptr;
  for (const ScheduleSegment& seg : s.segments) {
    if (!pulse && seg.segment_class == SegmentClass::kPulse) pulse = &seg;
    if (!tc && seg.segment_class == SegmentClass::kTwoQutritResonant)
      tc = &seg;
    if (!jc && seg.segment_class == SegmentClass::kAncillaOnlyResonant)
      jc = &seg;
    if (!adjust && seg.segment_class == SegmentClass::kAdjust) adjust = &seg;
  }
  REQUIRE((pulse && tc && jc && adjust));

  // Ideal flavors: static resonant terms only; adjust has no Hamiltonian.
  CHECK(sch::terms_for_segment(*pulse, p, s.layout, false).size() == 2);
  CHECK(sch::terms_for_segment(*tc, p, s.layout, false).size() == 1);
  CHECK(sch::terms_for_segment(*jc, p, s.layout, false).size() == 1);
  CHECK(sch::terms_for_segment(*adjust, p, s.layout, false).empty());

  // Modified flavors: sidebands plus 6 crosstalk terms (3 cavity pairs).
  CHECK(sch::terms_for_segment(*pulse, p, s.layout, true).size() ==
        2 * 3 + 6);  // two driven qutrits, (static + two sideband) terms each
  CHECK(sch::terms_for_segment(*tc, p, s.layout, true).size() == 1 + 4 + 6);
  CHECK(sch::terms_for_segment(*jc, p, s.layout, true).size() == 1 + 2 + 6);
  CHECK(sch::terms_for_segment(*adjust, p, s.layout, true).size() == 6);

  // Hadamard segments have no drive realization.
  const GateSchedule toffoli = sch::compile_toffoli(2, p);
  CHECK_THROWS_AS(
      sch::terms_for_segment(toffoli.segments.front(), p, toffoli.layout,
                             false),
      std::invalid_argument);

  // The numerical model only covers the paired qutrit-cavity architecture.
  const GateSchedule atom =
      sch::compile_atom_single_cavity(PhysicalParams::atom_defaults());
  for (const ScheduleSegment& seg : atom.segments) {
    if (seg.segment_class == SegmentClass::kTwoQutritResonant &&
        seg.resonant_qutrit != seg.cavity) {
      CHECK_THROWS_AS(sch::terms_for_segment(seg, atom.params, atom.layout,
                                             false),
                      std::invalid_argument);
      break;
    }
  }
}

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

#include "cpgate/ideal_dynamics.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <random>

namespace {

namespace hb = cpgate::hilbert;
namespace ham = cpgate::hamiltonian;
namespace idyn = cpgate::ideal_dynamics;

using cpgate::hamiltonian::kPi;
using cpgate::hamiltonian::kSqrt2;
using hb::Complex;
using hb::DenseMatrix;
using hb::SpaceDescriptor;
using hb::StateVector;
using hb::SubsystemId;
using hb::SystemLayout;

// Two work qutrits, one cavity, at most one photon: 54 states.
SystemLayout small_layout() {
  SystemLayout layout;
  layout.work_qutrit_count = 2;
  layout.cavity_count = 1;
  layout.photon_cutoff = 1;
  return layout;
}

StateVector ket(const std::vector<int>& labels, const SystemLayout& layout) {
  return hb::basis_state(labels, layout);
}

// Random normalized state supported on the indices the predicate accepts.
StateVector random_state(const SpaceDescriptor& space,
                         const std::function<bool(long)>& keep,
                         std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  StateVector state = StateVector::Zero(space.total_dim);
  for (long idx = 0; idx < space.total_dim; ++idx)
    if (keep(idx)) state(idx) = Complex(gauss(rng), gauss(rng));
  const double norm = state.norm();
  REQUIRE(norm > 0.0);
  return state / norm;
}

bool all_indices(long) { return true; }

}  // namespace

TEST_CASE("pulse_map parks and unparks with the documented phases") {
  const SystemLayout layout = small_layout();
  const SpaceDescriptor space = hb::build_space(layout);

  // |1>_2, angle pi/2, phi = -pi/2: parks to |2>_2 with phase +1.
  const StateVector parked = idyn::pulse_map(ket({0, 1, 0, 0}, layout), 2,
                                             kPi / 2.0, -kPi / 2.0, space);
  CHECK((parked - ket({0, 2, 0, 0}, layout)).norm() < 1e-12);

  // |2>_2, angle pi/2, phi = +pi/2: unparks to |1>_2 with phase +1.
  const StateVector unparked = idyn::pulse_map(ket({0, 2, 0, 0}, layout), 2,
                                               kPi / 2.0, kPi / 2.0, space);
  CHECK((unparked - ket({0, 1, 0, 0}, layout)).norm() < 1e-12);

  // Zero angle: identity on an arbitrary superposition.
  std::mt19937 rng(11);
  const StateVector any = random_state(space, all_indices, rng);
  CHECK((idyn::pulse_map(any, 2, 0.0, 0.4, space) - any).norm() < 1e-12);

  // |0> components are untouched at any angle.
  const StateVector zero_comp = idyn::pulse_map(ket({0, 0, 1, 1}, layout), 2,
                                                0.77, 0.1, space);
  CHECK((zero_comp - ket({0, 0, 1, 1}, layout)).norm() < 1e-12);

  CHECK_THROWS_AS(idyn::pulse_map(any, 5, 0.1, 0.0, space),
                  std::invalid_argument);
  CHECK_THROWS_AS(idyn::pulse_map(any, 2, -0.1, 0.0, space),
                  std::invalid_argument);
}

TEST_CASE("pulse_map general angle matches the rotation rows") {
  const SystemLayout layout = small_layout();
  const SpaceDescriptor space = hb::build_space(layout);
  const double theta = 0.63;
  const double phi = 1.1;

  const StateVector from1 =
      idyn::pulse_map(ket({0, 1, 0, 0}, layout), 2, theta, phi, space);
  const Complex a1 = from1(hb::basis_index({0, 1, 0, 0}, layout));
  const Complex a2 = from1(hb::basis_index({0, 2, 0, 0}, layout));
  CHECK(std::abs(a1 - Complex(std::cos(theta), 0.0)) < 1e-12);
  CHECK(std::abs(a2 - Complex(0.0, -1.0) * std::exp(Complex(0.0, -phi)) *
                          std::sin(theta)) < 1e-12);

  const StateVector from2 =
      idyn::pulse_map(ket({0, 2, 0, 0}, layout), 2, theta, phi, space);
  const Complex b1 = from2(hb::basis_index({0, 1, 0, 0}, layout));
  const Complex b2 = from2(hb::basis_index({0, 2, 0, 0}, layout));
  CHECK(std::abs(b2 - Complex(std::cos(theta), 0.0)) < 1e-12);
  CHECK(std::abs(b1 - Complex(0.0, -1.0) * std::exp(Complex(0.0, phi)) *
                          std::sin(theta)) < 1e-12);
}

TEST_CASE("jc_map reproduces the exchange rows and special angles") {
  const SystemLayout layout = small_layout();
  const SpaceDescriptor space = hb::build_space(layout);
  const StateVector anc_exc = ket({0, 0, 1, 0}, layout);
  const StateVector photon = ket({0, 0, 0, 1}, layout);

  // gt = pi: sign flip.
  CHECK((idyn::jc_map(anc_exc, 1, kPi, space) + anc_exc).norm() < 1e-12);
  // gt = 2 pi: identity.
  CHECK((idyn::jc_map(anc_exc, 1, 2.0 * kPi, space) - anc_exc).norm() < 1e-12);
  // gt = pi/2: full swap into the cavity with amplitude -i.
  CHECK((idyn::jc_map(anc_exc, 1, kPi / 2.0, space) -
         Complex(0.0, -1.0) * photon)
            .norm() < 1e-12);
  // Vacuum fixed; work qutrits are spectators.
  const StateVector parked = ket({2, 2, 0, 0}, layout);
  CHECK((idyn::jc_map(parked, 1, 0.913, space) - parked).norm() < 1e-12);

  // Two excitations in the exchange: schedule bug.
  CHECK_THROWS_AS(idyn::jc_map(ket({0, 0, 1, 1}, layout), 1, 0.5, space),
                  std::domain_error);
  // Ancilla outside its |0>,|1> pair during an ancilla-only segment: bug.
  CHECK_THROWS_AS(idyn::jc_map(ket({0, 0, 2, 0}, layout), 1, 0.5, space),
                  std::domain_error);
}

TEST_CASE("tc_map reproduces the collective exchange rows") {
  const SystemLayout layout = small_layout();
  const SpaceDescriptor space = hb::build_space(layout);
  const StateVector q_exc = ket({1, 0, 0, 0}, layout);   // |1,0,0>
  const StateVector a_exc = ket({0, 0, 1, 0}, layout);   // |0,1,0>
  const StateVector photon = ket({0, 0, 0, 1}, layout);  // |0,0,1>

  // sqrt(2) g t = pi: excitation swaps between qutrit and ancilla, sign -1.
  const double gt_pi = kPi / kSqrt2;
  CHECK((idyn::tc_map(q_exc, 1, gt_pi, space) + a_exc).norm() < 1e-12);
  CHECK((idyn::tc_map(a_exc, 1, gt_pi, space) + q_exc).norm() < 1e-12);

  // sqrt(2) g t = 2 pi: identity on the sector.
  CHECK((idyn::tc_map(a_exc, 1, 2.0 * gt_pi, space) - a_exc).norm() < 1e-12);
  CHECK((idyn::tc_map(photon, 1, 2.0 * gt_pi, space) - photon).norm() < 1e-12);

  // sqrt(2) g t = pi/2 on |0,1,0>: the three-amplitude row.
  const StateVector half = idyn::tc_map(a_exc, 1, gt_pi / 2.0, space);
  CHECK(std::abs(half(hb::basis_index({0, 0, 1, 0}, layout)) -
                 Complex(0.5, 0.0)) < 1e-12);
  CHECK(std::abs(half(hb::basis_index({0, 0, 0, 1}, layout)) -
                 Complex(0.0, -kSqrt2 / 2.0)) < 1e-12);
  CHECK(std::abs(half(hb::basis_index({1, 0, 0, 0}, layout)) -
                 Complex(-0.5, 0.0)) < 1e-12);

  // Vacuum fixed.
  const StateVector vac = ket({0, 0, 0, 0}, layout);
  CHECK((idyn::tc_map(vac, 1, 0.3, space) - vac).norm() < 1e-12);

  // Photon row at sqrt(2) g t = pi: |0,0,1> -> -|0,0,1>.
  CHECK((idyn::tc_map(photon, 1, gt_pi, space) + photon).norm() < 1e-12);
}

TEST_CASE("tc_map lets parked |2> components exchange ancilla and cavity") {
  const SystemLayout layout = small_layout();
  const SpaceDescriptor space = hb::build_space(layout);

  // Parked qutrit with the ancilla excited: after total angle g t = 2 pi the
  // component returns to itself (this is how a control in |1> accumulates no
  // net phase during the middle operations).
  const StateVector parked_exc = ket({2, 0, 1, 0}, layout);
  CHECK((idyn::tc_map(parked_exc, 1, 2.0 * kPi, space) - parked_exc).norm() <
        1e-12);
  // And g t = pi flips its sign, exactly as in the ancilla-only exchange.
  CHECK((idyn::tc_map(parked_exc, 1, kPi, space) + parked_exc).norm() < 1e-12);
  // At a generic angle the component genuinely evolves (it is NOT frozen).
  const StateVector moved = idyn::tc_map(parked_exc, 1, 0.4, space);
  CHECK((moved - parked_exc).norm() > 0.1);
  CHECK(std::abs(moved.norm() - 1.0) < 1e-12);

  // Parked qutrit, empty exchange: fixed.
  const StateVector parked_idle = ket({2, 1, 0, 0}, layout);
  CHECK((idyn::tc_map(parked_idle, 1, 0.73, space) - parked_idle).norm() <
        1e-12);

  // Two excitations (qutrit and ancilla both excited): schedule bug.
  CHECK_THROWS_AS(idyn::tc_map(ket({1, 0, 1, 0}, layout), 1, 0.5, space),
                  std::domain_error);
  CHECK_THROWS_AS(idyn::tc_map(ket({1, 0, 0, 1}, layout), 1, 0.5, space),
                  std::domain_error);
  CHECK_THROWS_AS(idyn::tc_map(ket({0, 0, 2, 0}, layout), 1, 0.5, space),
                  std::domain_error);
}

TEST_CASE("all maps preserve the norm on random sector states") {
  const SystemLayout layout = small_layout();
  const SpaceDescriptor space = hb::build_space(layout);
  std::mt19937 rng(2024);

  const int anc_pos = space.position(SubsystemId::ancilla());
  const int cav_pos = space.position(SubsystemId::cavity(1));
  const int q1_pos = space.position(SubsystemId::work(1));

  auto jc_sector = [&](long idx) {
    const int anc = space.level_at(idx, anc_pos);
    const int ph = space.level_at(idx, cav_pos);
    return (anc == 0 && ph == 0) || (anc == 1 && ph == 0) ||
           (anc == 0 && ph == 1);
  };
  auto tc_sector = [&](long idx) {
    const int q = space.level_at(idx, q1_pos);
    if (q == 2) return jc_sector(idx);
    const int anc = space.level_at(idx, anc_pos);
    const int ph = space.level_at(idx, cav_pos);
    return anc != 2 && (q == 1 ? 1 : 0) + (anc == 1 ? 1 : 0) + ph <= 1;
  };

  for (int trial = 0; trial < 5; ++trial) {
    const double angle = 0.1 + 0.61 * trial;
    const StateVector any = random_state(space, all_indices, rng);
    CHECK(std::abs(idyn::pulse_map(any, 2, angle, 0.3, space).norm() - 1.0) <
          1e-10);
    CHECK(std::abs(idyn::hadamard_map(any, 2, space).norm() - 1.0) < 1e-10);

    const StateVector jc_state = random_state(space, jc_sector, rng);
    CHECK(std::abs(idyn::jc_map(jc_state, 1, angle, space).norm() - 1.0) <
          1e-10);

    const StateVector tc_state = random_state(space, tc_sector, rng);
    CHECK(std::abs(idyn::tc_map(tc_state, 1, angle, space).norm() - 1.0) <
          1e-10);
  }
}

TEST_CASE("hadamard_map is the exact qubit Hadamard") {
  const SystemLayout layout = small_layout();
  const SpaceDescriptor space = hb::build_space(layout);
  const double inv = 1.0 / kSqrt2;

  const StateVector from0 = idyn::hadamard_map(ket({0, 0, 0, 0}, layout), 1,
                                               space);
  CHECK((from0 - inv * (ket({0, 0, 0, 0}, layout) + ket({1, 0, 0, 0}, layout)))
            .norm() < 1e-12);
  const StateVector from1 = idyn::hadamard_map(ket({1, 0, 0, 0}, layout), 1,
                                               space);
  CHECK((from1 - inv * (ket({0, 0, 0, 0}, layout) - ket({1, 0, 0, 0}, layout)))
            .norm() < 1e-12);
  // Involution: H H = identity.
  CHECK((idyn::hadamard_map(from0, 1, space) - ket({0, 0, 0, 0}, layout))
            .norm() < 1e-12);
  // |2> untouched.
  const StateVector parked = ket({2, 1, 0, 0}, layout);
  CHECK((idyn::hadamard_map(parked, 1, space) - parked).norm() < 1e-12);
}

TEST_CASE("exact_propagator basics") {
  const SystemLayout layout = small_layout();
  const ham::PhysicalParams p;
  const auto h = ham::h_qutrit_cavity_ideal(1, p, layout);

  // t = 0: identity.
  const DenseMatrix u0 = idyn::exact_propagator(h, 0.0);
  CHECK((u0 - DenseMatrix::Identity(54, 54)).cwiseAbs().maxCoeff() < 1e-12);

  // Group property U(t1) U(t2) = U(t1 + t2).
  const double t1 = 3.7e-9, t2 = 11.1e-9;
  const DenseMatrix u12 = idyn::exact_propagator(h, t1 + t2);
  const DenseMatrix prod = DenseMatrix(idyn::exact_propagator(h, t1) *
                                       idyn::exact_propagator(h, t2));
  CHECK((u12 - prod).cwiseAbs().maxCoeff() < 1e-9);

  // Unitarity.
  const DenseMatrix u = idyn::exact_propagator(h, 8.3e-9);
  CHECK((DenseMatrix(u.adjoint() * u) - DenseMatrix::Identity(54, 54))
            .cwiseAbs()
            .maxCoeff() < 1e-9);

  // Non-Hermitian input rejected.
  cpgate::hilbert::SparseOperator bad(3, 3);
  bad.insert(0, 1) = Complex(1.0, 0.0);
  bad.makeCompressed();
  CHECK_THROWS_AS(idyn::exact_propagator(bad, 1.0), std::invalid_argument);

  // Dimension guard.
  cpgate::hilbert::SparseOperator huge(3001, 3001);
  CHECK_THROWS_AS(idyn::exact_propagator(huge, 1.0), std::invalid_argument);
}

TEST_CASE("closed-form maps agree with the matrix-exponential oracle") {
  const SystemLayout layout = small_layout();
  const SpaceDescriptor space = hb::build_space(layout);
  const ham::PhysicalParams p;
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> pick_t(0.0, 200e-9);

  const auto h_pulse = ham::h_pulse_ideal(2, -kPi / 2.0, p, layout);
  const auto h_jc = ham::h_qutrit_cavity_ideal(1, p, layout);
  const auto h_tc = ham::h_two_qutrit_cavity_ideal(1, p, layout);

  const int anc_pos = space.position(SubsystemId::ancilla());
  const int cav_pos = space.position(SubsystemId::cavity(1));
  const int q1_pos = space.position(SubsystemId::work(1));
  auto jc_sector = [&](long idx) {
    const int anc = space.level_at(idx, anc_pos);
    const int ph = space.level_at(idx, cav_pos);
    return anc + ph <= 1 && anc != 2;
  };
  auto tc_sector = [&](long idx) {
    const int q = space.level_at(idx, q1_pos);
    if (q == 2) return jc_sector(idx);
    const int anc = space.level_at(idx, anc_pos);
    const int ph = space.level_at(idx, cav_pos);
    return anc != 2 && (q == 1 ? 1 : 0) + (anc == 1 ? 1 : 0) + ph <= 1;
  };

  for (int trial = 0; trial < 20; ++trial) {
    const double t = pick_t(rng);

    const StateVector any = random_state(space, all_indices, rng);
    const StateVector via_map =
        idyn::pulse_map(any, 2, p.omega * t, -kPi / 2.0, space);
    const StateVector via_u = idyn::exact_propagator(h_pulse, t) * any;
    CHECK((via_map - via_u).cwiseAbs().maxCoeff() < 1e-9);

    const StateVector jc_state = random_state(space, jc_sector, rng);
    CHECK((idyn::jc_map(jc_state, 1, p.g * t, space) -
           StateVector(idyn::exact_propagator(h_jc, t) * jc_state))
              .cwiseAbs()
              .maxCoeff() < 1e-9);

    const StateVector tc_state = random_state(space, tc_sector, rng);
    CHECK((idyn::tc_map(tc_state, 1, p.g * t, space) -
           StateVector(idyn::exact_propagator(h_tc, t) * tc_state))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("oracle self-consistency on the documented exchange example") {
  const SystemLayout layout = small_layout();
  const SpaceDescriptor space = hb::build_space(layout);
  const ham::PhysicalParams p;
  const auto h_tc = ham::h_two_qutrit_cavity_ideal(1, p, layout);

  const double t = kPi / (kSqrt2 * p.g);
  const StateVector q_exc = ket({1, 0, 0, 0}, layout);
  const StateVector via_u = idyn::exact_propagator(h_tc, t) * q_exc;
  const StateVector via_map = idyn::tc_map(q_exc, 1, p.g * t, space);
  CHECK((via_u - via_map).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((via_map + ket({0, 0, 1, 0}, layout)).norm() < 1e-9);
}

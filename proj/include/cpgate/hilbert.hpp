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

// Composite tensor-product Hilbert spaces of qutrits and truncated cavity
// modes: layout bookkeeping, sparse operator construction and embedding,
// and computational basis states.
//
// The canonical subsystem ordering is fixed once and used by every module:
// work qutrits 1..n (ascending), then the ancilla qutrit, then cavities 1..k
// (ascending). A composite basis index is the row-major mixed-radix number
// over the subsystem levels in that order (work qutrit 1 is the most
// significant digit).

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpgate::hilbert {

using Complex = std::complex<double>;
using SparseOperator = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<Complex>;
using StateVector = Eigen::VectorXcd;
using DenseMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using DensityMatrix = DenseMatrix;

/// Which subsystems exist and how they are ordered.
struct SystemLayout {
  int work_qutrit_count = 3;  ///< n >= 2 logical qubits, each hosted in a qutrit
  bool ancilla_present = true;  ///< the shared coupler qutrit (always present)
  int cavity_count = 3;  ///< n for the multi-cavity gate, 1 for the
                         ///< single-cavity variant
  int photon_cutoff = 1;  ///< n_max >= 1; local cavity dimension is n_max + 1

  bool operator==(const SystemLayout&) const = default;
};

enum class SubsystemKind { kWorkQutrit, kAncilla, kCavity };

/// Names one subsystem of a layout. Work qutrits and cavities are 1-based.
struct SubsystemId {
  SubsystemKind kind = SubsystemKind::kWorkQutrit;
  int index = 1;

  static SubsystemId work(int l) { return {SubsystemKind::kWorkQutrit, l}; }
  static SubsystemId ancilla() { return {SubsystemKind::kAncilla, 0}; }
  static SubsystemId cavity(int l) { return {SubsystemKind::kCavity, l}; }

  bool operator==(const SubsystemId&) const = default;
};

/// Per-subsystem dimensions and index strides for one layout.
struct SpaceDescriptor {
  SystemLayout layout;
  std::vector<int> local_dims;  ///< canonical order
  std::vector<long> strides;    ///< row-major strides, canonical order
  long total_dim = 0;

  int subsystem_count() const { return static_cast<int>(local_dims.size()); }

  /// Position of a subsystem in the canonical ordering.
  int position(const SubsystemId& id) const {
    const int n = layout.work_qutrit_count;
    switch (id.kind) {
      case SubsystemKind::kWorkQutrit:
        if (id.index < 1 || id.index > n)
          throw std::invalid_argument("unknown work qutrit index " +
                                      std::to_string(id.index));
        return id.index - 1;
      case SubsystemKind::kAncilla:
        if (!layout.ancilla_present)
          throw std::invalid_argument("layout has no ancilla");
        return n;
      case SubsystemKind::kCavity:
        if (id.index < 1 || id.index > layout.cavity_count)
          throw std::invalid_argument("unknown cavity index " +
                                      std::to_string(id.index));
        return n + (layout.ancilla_present ? 1 : 0) + id.index - 1;
    }
    throw std::invalid_argument("unknown subsystem kind");
  }

  int local_dim(const SubsystemId& id) const {
    return local_dims[position(id)];
  }
  long stride(const SubsystemId& id) const { return strides[position(id)]; }

  /// Level of subsystem `pos` within composite basis index `index`.
  int level_at(long index, int pos) const {
    return static_cast<int>((index / strides[pos]) % local_dims[pos]);
  }
  int level_of(long index, const SubsystemId& id) const {
    return level_at(index, position(id));
  }

  /// Composite index with the level of one subsystem replaced.
  long with_level(long index, int pos, int level) const {
    return index + (level - level_at(index, pos)) * strides[pos];
  }
};

/// Builds the per-subsystem dimensions and strides for a layout.
///
/// Throws std::invalid_argument unless n >= 2, n_max >= 1 and at least one
/// cavity is present.
inline SpaceDescriptor build_space(const SystemLayout& layout) {
  if (layout.work_qutrit_count < 2)
    throw std::invalid_argument("work_qutrit_count must be >= 2, got " +
                                std::to_string(layout.work_qutrit_count));
  if (layout.photon_cutoff < 1)
    throw std::invalid_argument("photon_cutoff must be >= 1, got " +
                                std::to_string(layout.photon_cutoff));
  if (layout.cavity_count < 1)
    throw std::invalid_argument("cavity_count must be >= 1, got " +
                                std::to_string(layout.cavity_count));

  SpaceDescriptor space;
  space.layout = layout;
  for (int l = 0; l < layout.work_qutrit_count; ++l)
    space.local_dims.push_back(3);
  if (layout.ancilla_present) space.local_dims.push_back(3);
  for (int l = 0; l < layout.cavity_count; ++l)
    space.local_dims.push_back(layout.photon_cutoff + 1);

  space.strides.assign(space.local_dims.size(), 1);
  for (int k = static_cast<int>(space.local_dims.size()) - 2; k >= 0; --k)
    space.strides[k] = space.strides[k + 1] * space.local_dims[k + 1];
  space.total_dim = space.strides[0] * space.local_dims[0];
  return space;
}

/// Local 3x3 transition operator |i><j| on a qutrit.
inline SparseOperator transition_op(int i, int j) {
  if (i < 0 || i > 2 || j < 0 || j > 2)
    throw std::invalid_argument("qutrit levels must lie in {0,1,2}");
  SparseOperator op(3, 3);
  op.insert(i, j) = Complex(1.0, 0.0);
  op.makeCompressed();
  return op;
}

/// Local annihilation operator a on a cavity truncated at n_max photons:
/// entries (k-1, k) = sqrt(k) for k = 1..n_max.
inline SparseOperator annihilation_op(int n_max) {
  if (n_max < 1)
    throw std::invalid_argument("photon cutoff must be >= 1, got " +
                                std::to_string(n_max));
  SparseOperator op(n_max + 1, n_max + 1);
  for (int k = 1; k <= n_max; ++k)
    op.insert(k - 1, k) = Complex(std::sqrt(static_cast<double>(k)), 0.0);
  op.makeCompressed();
  return op;
}

/// Kronecker-embeds a local operator into the full composite space with
/// identity on every other subsystem.
inline SparseOperator embed(const SparseOperator& local, const SubsystemId& id,
                            const SystemLayout& layout) {
  const SpaceDescriptor space = build_space(layout);
  const int pos = space.position(id);
  const int d = space.local_dims[pos];
  if (local.rows() != d || local.cols() != d)
    throw std::invalid_argument(
        "local operator dimension " + std::to_string(local.rows()) +
        " does not match subsystem dimension " + std::to_string(d));

  const long stride = space.strides[pos];
  const long block = stride * d;          // span of one full local cycle
  const long outer = space.total_dim / block;

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(local.nonZeros()) *
                   static_cast<size_t>(space.total_dim / d));
  for (int r = 0; r < local.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(local, r); it; ++it) {
      for (long o = 0; o < outer; ++o) {
        const long row_base = o * block + it.row() * stride;
        const long col_base = o * block + it.col() * stride;
        for (long inner = 0; inner < stride; ++inner)
          triplets.emplace_back(row_base + inner, col_base + inner, it.value());
      }
    }
  }
  SparseOperator full(space.total_dim, space.total_dim);
  full.setFromTriplets(triplets.begin(), triplets.end());
  full.makeCompressed();
  return full;
}

/// Composite basis index for per-subsystem levels given in canonical order.
inline long basis_index(const std::vector<int>& labels,
                        const SystemLayout& layout) {
  const SpaceDescriptor space = build_space(layout);
  if (static_cast<int>(labels.size()) != space.subsystem_count())
    throw std::invalid_argument(
        "expected " + std::to_string(space.subsystem_count()) +
        " labels, got " + std::to_string(labels.size()));
  long index = 0;
  for (size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] < 0 || labels[k] >= space.local_dims[k])
      throw std::invalid_argument("label " + std::to_string(labels[k]) +
                                  " out of range for subsystem " +
                                  std::to_string(k));
    index += labels[k] * space.strides[k];
  }
  return index;
}

/// Unit basis vector for per-subsystem levels given in canonical order.
inline StateVector basis_state(const std::vector<int>& labels,
                               const SystemLayout& layout) {
  const SpaceDescriptor space = build_space(layout);
  StateVector state = StateVector::Zero(space.total_dim);
  state[basis_index(labels, layout)] = Complex(1.0, 0.0);
  return state;
}

/// Entrywise Hermiticity check: max |H - H^dagger| < tol.
inline bool is_hermitian(const SparseOperator& op, double tol = 1e-12) {
  if (op.rows() != op.cols()) return false;
  SparseOperator diff = SparseOperator(op.adjoint()) - op;
  for (int r = 0; r < diff.outerSize(); ++r)
    for (SparseOperator::InnerIterator it(diff, r); it; ++it)
      if (std::abs(it.value()) > tol) return false;
  return true;
}

/// Trace of a dense matrix.
inline Complex trace(const DenseMatrix& m) { return m.trace(); }

/// Density-matrix sanity checks (trace 1, Hermitian, PSD within tolerance).
struct DensityCheck {
  double trace_error = 0.0;      ///< |trace - 1|
  double hermiticity_error = 0.0;  ///< max |rho - rho^dagger|
  double min_eigenvalue = 0.0;
};

/// Evaluates the DensityMatrix invariants. Eigenvalue check is O(dim^3); call
/// on demand, not per integration step.
inline DensityCheck check_density_matrix(const DensityMatrix& rho,
                                         bool with_eigenvalues = false) {
  DensityCheck out;
  out.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  out.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (with_eigenvalues) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        Eigen::MatrixXcd(0.5 * (rho + rho.adjoint())),
        Eigen::EigenvaluesOnly);
    out.min_eigenvalue = solver.eigenvalues().minCoeff();
  }
  return out;
}

}  // namespace cpgate::hilbert

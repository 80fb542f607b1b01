#include "qkla/statevector.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace qkla::sv {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void validate_qubits(std::size_t num_qubits, std::span<const std::size_t> a,
                     std::span<const std::size_t> b = {}) {
  std::vector<bool> used(num_qubits, false);
  auto check = [&](std::size_t q) {
    if (q >= num_qubits) {
      throw SimulatorError("qubit index " + std::to_string(q) + " out of range for " +
                           std::to_string(num_qubits) + " qubits");
    }
    if (used[q]) throw SimulatorError("duplicate qubit index " + std::to_string(q));
    used[q] = true;
  };
  for (std::size_t q : a) check(q);
  for (std::size_t q : b) check(q);
}

// offsets[j] is the full-register bit pattern of local index j.
std::vector<std::size_t> local_offsets(std::span<const std::size_t> targets) {
  const std::size_t local_dim = std::size_t{1} << targets.size();
  std::vector<std::size_t> offsets(local_dim, 0);
  for (std::size_t j = 0; j < local_dim; ++j) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if ((j >> i) & 1U) offsets[j] |= std::size_t{1} << targets[i];
    }
  }
  return offsets;
}

std::size_t mask_of(std::span<const std::size_t> qubits) {
  std::size_t mask = 0;
  for (std::size_t q : qubits) mask |= std::size_t{1} << q;
  return mask;
}

void apply_impl(QuantumState& state, const UnitaryMatrix& u, std::span<const std::size_t> targets,
                std::span<const std::size_t> controls) {
  if (targets.empty()) throw SimulatorError("no target qubits");
  validate_qubits(state.num_qubits(), targets, controls);
  if (u.dim() != (std::size_t{1} << targets.size())) {
    throw SimulatorError("unitary dimension " + std::to_string(u.dim()) + " does not match " +
                         std::to_string(targets.size()) + " target qubits");
  }

  const auto offsets = local_offsets(targets);
  const std::size_t target_mask = mask_of(targets);
  const std::size_t control_mask = mask_of(controls);
  const auto local_dim = static_cast<Eigen::Index>(offsets.size());

  Eigen::VectorXcd& amps = state.amplitudes();
  Eigen::VectorXcd local(local_dim);
  Eigen::VectorXcd out(local_dim);
  const Eigen::MatrixXcd& m = u.matrix();

  for (std::size_t base = 0; base < state.dim(); ++base) {
    if ((base & target_mask) != 0 || (base & control_mask) != control_mask) continue;
    for (Eigen::Index j = 0; j < local_dim; ++j) local(j) = amps(static_cast<Eigen::Index>(base | offsets[j]));
    out.noalias() = m * local;
    for (Eigen::Index j = 0; j < local_dim; ++j) amps(static_cast<Eigen::Index>(base | offsets[j])) = out(j);
  }
}

}  // namespace

UnitaryMatrix::UnitaryMatrix(Eigen::MatrixXcd entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols()) throw SimulatorError("unitary must be square");
  if (!is_power_of_two(static_cast<std::size_t>(m_.rows()))) {
    throw SimulatorError("unitary dimension must be a power of two");
  }
}

UnitaryMatrix UnitaryMatrix::identity(std::size_t dim) {
  return UnitaryMatrix(Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim),
                                                  static_cast<Eigen::Index>(dim)));
}

std::size_t UnitaryMatrix::num_qubits() const {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < dim()) ++n;
  return n;
}

double UnitaryMatrix::unitarity_error() const {
  const Eigen::MatrixXcd prod = m_ * m_.adjoint();
  return (prod - Eigen::MatrixXcd::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff();
}

UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  if (a.dim() != b.dim()) throw SimulatorError("dimension mismatch in unitary product");
  return UnitaryMatrix(a.m_ * b.m_);
}

UnitaryMatrix pauli_x() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix hadamard() {
  const double s = 1.0 / std::numbers::sqrt2;
  Eigen::MatrixXcd m(2, 2);
  m << s, s, s, -s;
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix ry(double phi) {
  const double c = std::cos(phi / 2.0);
  const double s = std::sin(phi / 2.0);
  Eigen::MatrixXcd m(2, 2);
  m << c, -s, s, c;
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix phase_gate(double phi) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
  m(1, 1) = std::polar(1.0, phi);
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix swap_gate() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 2) = 1;
  m(2, 1) = 1;
  m(3, 3) = 1;
  return UnitaryMatrix(std::move(m));
}

// ---------------------------------------------------------------------------

QuantumState::QuantumState(std::size_t num_qubits, std::vector<Register> registers)
    : num_qubits_(num_qubits),
      amps_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << num_qubits))),
      registers_(std::move(registers)) {
  if (num_qubits > 24) throw SimulatorError("too many qubits for a dense state");
  amps_(0) = 1.0;
  for (const Register& r : registers_) {
    if (r.first + r.width > num_qubits_) throw SimulatorError("register '" + r.name + "' out of range");
  }
}

QuantumState::QuantumState(std::size_t num_qubits, Eigen::VectorXcd amplitudes,
                           std::vector<Register> registers)
    : QuantumState(num_qubits, std::move(registers)) {
  if (static_cast<std::size_t>(amplitudes.size()) != (std::size_t{1} << num_qubits)) {
    throw SimulatorError("amplitude vector length must be 2^num_qubits");
  }
  amps_ = std::move(amplitudes);
}

QuantumState QuantumState::basis(std::size_t num_qubits, std::size_t index) {
  QuantumState s(num_qubits);
  if (index >= s.dim()) throw SimulatorError("basis index out of range");
  s.amps_(0) = 0.0;
  s.amps_(static_cast<Eigen::Index>(index)) = 1.0;
  return s;
}

std::vector<std::size_t> QuantumState::qubits(const std::string& name) const {
  for (const Register& r : registers_) {
    if (r.name == name) return qubit_range(r.first, r.width);
  }
  throw SimulatorError("no register named '" + name + "'");
}

// ---------------------------------------------------------------------------

void apply_unitary(QuantumState& state, const UnitaryMatrix& u,
                   std::span<const std::size_t> targets) {
  apply_impl(state, u, targets, {});
}

void apply_controlled_unitary(QuantumState& state, const UnitaryMatrix& u,
                              std::span<const std::size_t> targets,
                              std::span<const std::size_t> controls) {
  apply_impl(state, u, targets, controls);
}

namespace {

void qft_impl(QuantumState& state, std::span<const std::size_t> qubits, double sign) {
  if (qubits.empty()) throw SimulatorError("QFT needs at least one qubit");
  validate_qubits(state.num_qubits(), qubits);
  const std::size_t t = qubits.size();
  const UnitaryMatrix h = hadamard();
  const UnitaryMatrix sw = swap_gate();

  auto rotations = [&](std::size_t i) {
    for (std::size_t k = i; k-- > 0;) {
      const double angle = sign * std::numbers::pi / static_cast<double>(std::size_t{1} << (i - k));
      const std::array<std::size_t, 1> target{qubits[i]};
      const std::array<std::size_t, 1> control{qubits[k]};
      apply_controlled_unitary(state, phase_gate(angle), target, control);
    }
  };
  auto swaps = [&] {
    for (std::size_t i = 0; i < t / 2; ++i) {
      const std::array<std::size_t, 2> pair{qubits[i], qubits[t - 1 - i]};
      apply_unitary(state, sw, pair);
    }
  };

  if (sign > 0) {
    for (std::size_t i = t; i-- > 0;) {
      const std::array<std::size_t, 1> target{qubits[i]};
      apply_unitary(state, h, target);
      rotations(i);
    }
    swaps();
  } else {
    // Reverse gate order with conjugated phases.
    swaps();
    for (std::size_t i = 0; i < t; ++i) {
      rotations(i);
      const std::array<std::size_t, 1> target{qubits[i]};
      apply_unitary(state, h, target);
    }
  }
}

}  // namespace

void qft(QuantumState& state, std::span<const std::size_t> qubits) { qft_impl(state, qubits, +1.0); }

void inverse_qft(QuantumState& state, std::span<const std::size_t> qubits) {
  qft_impl(state, qubits, -1.0);
}

dist::DiscreteDistribution measurement_distribution(const QuantumState& state,
                                                    std::span<const std::size_t> qubits) {
  if (qubits.empty()) throw SimulatorError("no qubits to measure");
  validate_qubits(state.num_qubits(), qubits);
  std::vector<double> probs(std::size_t{1} << qubits.size(), 0.0);
  const Eigen::VectorXcd& amps = state.amplitudes();
  for (std::size_t index = 0; index < state.dim(); ++index) {
    std::size_t outcome = 0;
    for (std::size_t i = 0; i < qubits.size(); ++i) outcome |= ((index >> qubits[i]) & 1U) << i;
    probs[outcome] += std::norm(amps(static_cast<Eigen::Index>(index)));
  }
  return dist::DiscreteDistribution(std::move(probs));
}

UnitaryMatrix embed(const UnitaryMatrix& u, std::span<const std::size_t> targets,
                    std::size_t num_qubits) {
  validate_qubits(num_qubits, targets);
  if (u.dim() != (std::size_t{1} << targets.size())) {
    throw SimulatorError("unitary dimension does not match target count");
  }
  const std::size_t dim = std::size_t{1} << num_qubits;
  const auto offsets = local_offsets(targets);
  const std::size_t target_mask = mask_of(targets);

  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                 static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    const std::size_t rest = col & ~target_mask;
    std::size_t local = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) local |= ((col >> targets[i]) & 1U) << i;
    for (std::size_t j = 0; j < offsets.size(); ++j) {
      full(static_cast<Eigen::Index>(rest | offsets[j]), static_cast<Eigen::Index>(col)) =
          u(j, local);
    }
  }
  return UnitaryMatrix(std::move(full));
}

std::vector<std::size_t> qubit_range(std::size_t first, std::size_t count) {
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
  return out;
}

}  // namespace qkla::sv

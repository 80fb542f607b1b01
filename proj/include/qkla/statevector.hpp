#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qkla/distributions.hpp"

// Dense state-vector simulation. Qubit q is bit q of the basis-state index
// (little-endian).
namespace qkla::sv {

using cplx = std::complex<double>;

class SimulatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Square complex matrix acting on 2^k amplitudes. Unitarity is not checked
/// on construction; call is_unitary() where it matters.
class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;
  explicit UnitaryMatrix(Eigen::MatrixXcd entries);

  static UnitaryMatrix identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t num_qubits() const;
  const Eigen::MatrixXcd& matrix() const { return m_; }
  cplx operator()(std::size_t row, std::size_t col) const { return m_(row, col); }

  UnitaryMatrix adjoint() const { return UnitaryMatrix(m_.adjoint()); }

  /// Max-abs deviation of U U^dagger from the identity.
  double unitarity_error() const;
  bool is_unitary(double tol = 1e-10) const { return unitarity_error() <= tol; }

  /// Matrix product: (a * b) applies b first.
  friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b);

 private:
  Eigen::MatrixXcd m_;
};

// Common gates.
UnitaryMatrix pauli_x();
UnitaryMatrix hadamard();
/// R_y(phi)|0> = cos(phi/2)|0> + sin(phi/2)|1>.
UnitaryMatrix ry(double phi);
/// diag(1, e^{i phi}).
UnitaryMatrix phase_gate(double phi);
UnitaryMatrix swap_gate();

/// Named contiguous range of qubits.
struct Register {
  std::string name;
  std::size_t first = 0;
  std::size_t width = 0;
};

class QuantumState {
 public:
  /// |0...0> on num_qubits qubits.
  explicit QuantumState(std::size_t num_qubits, std::vector<Register> registers = {});
  QuantumState(std::size_t num_qubits, Eigen::VectorXcd amplitudes,
               std::vector<Register> registers = {});

  static QuantumState basis(std::size_t num_qubits, std::size_t index);

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::VectorXcd& amplitudes() { return amps_; }
  cplx operator[](std::size_t index) const { return amps_(static_cast<Eigen::Index>(index)); }

  const std::vector<Register>& registers() const { return registers_; }
  /// Qubit indices of a named register, least significant first.
  std::vector<std::size_t> qubits(const std::string& name) const;

  double norm() const { return amps_.norm(); }

 private:
  std::size_t num_qubits_;
  Eigen::VectorXcd amps_;
  std::vector<Register> registers_;
};

/// Applies u to the ordered target qubits; targets[i] is bit i of u's local
/// index. Throws on dimension mismatch and bad qubit indices.
void apply_unitary(QuantumState& state, const UnitaryMatrix& u,
                   std::span<const std::size_t> targets);

/// As apply_unitary, restricted to basis states where every control is |1>.
void apply_controlled_unitary(QuantumState& state, const UnitaryMatrix& u,
                              std::span<const std::size_t> targets,
                              std::span<const std::size_t> controls);

/// QFT on the given qubits (first = least significant):
/// |j> -> M^{-1/2} sum_m e^{2 pi i j m / M} |m>, built from Hadamards,
/// controlled phases and a final bit-reversal.
void qft(QuantumState& state, std::span<const std::size_t> qubits);
/// The adjoint of qft().
void inverse_qft(QuantumState& state, std::span<const std::size_t> qubits);

/// Exact Born marginal over the listed qubits (qubits[i] is bit i of the
/// outcome index).
dist::DiscreteDistribution measurement_distribution(const QuantumState& state,
                                                    std::span<const std::size_t> qubits);

/// Full-register matrix of u acting on `targets` of an n-qubit system.
UnitaryMatrix embed(const UnitaryMatrix& u, std::span<const std::size_t> targets,
                    std::size_t num_qubits);

/// Contiguous qubit list [first, first + count).
std::vector<std::size_t> qubit_range(std::size_t first, std::size_t count);

}  // namespace qkla::sv

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qkla/distributions.hpp"
#include "qkla/rng.hpp"
#include "qkla/statevector.hpp"

// Gate-level QKLA: the amplitude-encoding unitary A, its Grover iterate and
// the canonical QAE circuit on top of the state-vector simulator.
namespace qkla::circuit {

/// Largest total register (system plus phase qubits) we agree to simulate.
inline constexpr std::size_t kMaxQubits = 20;

/// Signed fixed point over [-L, L) with 2^b levels of width 2L/2^b.
/// Code v stands for -L + v * 2L/2^b; encode rounds to the nearest level and
/// saturates, so +L maps to the top code L - step.
class FixedPointCodec {
 public:
  FixedPointCodec(double L, int bits);

  double L() const { return L_; }
  int bits() const { return bits_; }
  std::size_t levels() const { return std::size_t{1} << bits_; }
  double step() const { return 2.0 * L_ / static_cast<double>(levels()); }

  std::size_t encode(double value) const;
  double decode(std::size_t code) const;
  double quantize(double value) const { return decode(encode(value)); }

 private:
  double L_;
  int bits_;
};

/// Sample register [0, nq), arithmetic register [nq, nq + b), one ancilla.
struct RegisterLayout {
  std::size_t sample_qubits = 0;
  std::size_t arith_qubits = 0;

  std::size_t arith_first() const { return sample_qubits; }
  std::size_t ancilla() const { return sample_qubits + arith_qubits; }
  std::size_t num_qubits() const { return sample_qubits + arith_qubits + 1; }
  std::vector<sv::Register> registers() const;
};

struct QklaCircuit {
  sv::UnitaryMatrix prep_oracle;          // on the sample register
  sv::UnitaryMatrix log_oracle;           // on sample + arith
  sv::UnitaryMatrix controlled_rotation;  // on arith + ancilla
  sv::UnitaryMatrix a_operator;           // full system
  sv::UnitaryMatrix grover;               // full system
  RegisterLayout layout;
  FixedPointCodec codec{1.0, 1};
  /// sum_x p(x) decode(encode(l_L(x))): the clipped KL the circuit encodes.
  double quantized_target = 0.0;
};

/// Unitary whose first column is (sqrt p(x))_x, completed by Gram-Schmidt
/// against e_0, e_1, ... (dependent vectors skipped).
sv::UnitaryMatrix build_prep_oracle(const dist::DiscreteDistribution& p);

/// |w>|r> -> |w>|r XOR code(l_L(w))>, local index w + 2^nq r.
sv::UnitaryMatrix build_log_oracle(const dist::DiscreteDistribution& p,
                                   const dist::DiscreteDistribution& q,
                                   const FixedPointCodec& codec);

/// For each arith code v: R_y(2 arcsin sqrt g) on the ancilla with
/// g = clamp((decode(v) + L) / 2L, 0, 1). Local index v + 2^b anc.
sv::UnitaryMatrix build_controlled_rotation(const FixedPointCodec& codec);

/// A = log^dagger . R . log . (prep (x) I), embedded on the full system.
/// Fills every field except grover and quantized_target.
QklaCircuit assemble_a_operator(const sv::UnitaryMatrix& prep, const sv::UnitaryMatrix& log_oracle,
                                const sv::UnitaryMatrix& rotation, const FixedPointCodec& codec);

/// G = -A S_0 A^dagger S_chi, S_chi flipping the sign of states with the
/// `good_qubit` set and S_0 = I - 2|0><0|.
sv::UnitaryMatrix build_grover(const sv::UnitaryMatrix& a_operator, std::size_t good_qubit);
sv::UnitaryMatrix build_grover(const QklaCircuit& circuit);

/// Full construction for the pair (p, q).
QklaCircuit build_qkla_circuit(const dist::DiscreteDistribution& p,
                               const dist::DiscreteDistribution& q, const FixedPointCodec& codec);

/// Codec-quantized clipped KL computed directly from the code table.
double quantized_clipped_kl(const dist::DiscreteDistribution& p,
                            const dist::DiscreteDistribution& q, const FixedPointCodec& codec);

/// State A|0> on the system qubits.
sv::QuantumState prepare_state(const QklaCircuit& circuit);
/// Probability that the ancilla reads 1 in A|0>.
double encoded_amplitude(const QklaCircuit& circuit);
/// Probability mass of A|0> on basis states whose arith register is nonzero.
double arith_residual(const QklaCircuit& circuit);

/// Canonical QAE with t phase qubits: H^t, controlled G^(2^j) from phase
/// qubit j, inverse QFT; returns the exact phase-register law.
dist::DiscreteDistribution run_canonical_qae(const sv::UnitaryMatrix& a_operator,
                                             std::size_t good_qubit, std::size_t t);
dist::DiscreteDistribution run_canonical_qae(const QklaCircuit& circuit, std::size_t t);

/// Draws k outcomes from `phase_law`, takes the lower median of the
/// sin^2(pi m / M) values and maps it to 2L a_hat - L.
double estimate_from_distribution(const dist::DiscreteDistribution& phase_law, std::size_t k,
                                  double L, Rng& rng);

/// run_canonical_qae followed by estimate_from_distribution.
double qkla_full_estimate(const QklaCircuit& circuit, std::size_t t, std::size_t k, Rng& rng);

/// Inverse-CDF draw from a probability vector.
std::size_t sample_index(std::span<const double> probs, Rng& rng);

}  // namespace qkla::circuit

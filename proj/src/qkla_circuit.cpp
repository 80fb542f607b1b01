#include "qkla/qkla_circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "qkla/qae_model.hpp"

namespace qkla::circuit {

namespace {

std::size_t log2_exact(std::size_t n, const char* what) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw sv::SimulatorError(std::string(what) + ": size " + std::to_string(n) +
                             " is not a power of two");
  }
  std::size_t k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

}  // namespace

FixedPointCodec::FixedPointCodec(double L, int bits) : L_(L), bits_(bits) {
  if (!(L > 0.0)) throw sv::SimulatorError("codec clip bound must be positive");
  if (bits < 1 || bits > 16) throw sv::SimulatorError("codec width must be in [1, 16]");
}

std::size_t FixedPointCodec::encode(double value) const {
  const double level = std::round((value + L_) / step());
  const double top = static_cast<double>(levels() - 1);
  return static_cast<std::size_t>(std::clamp(level, 0.0, top));
}

double FixedPointCodec::decode(std::size_t code) const {
  if (code >= levels()) throw sv::SimulatorError("code out of range");
  return -L_ + static_cast<double>(code) * step();
}

std::vector<sv::Register> RegisterLayout::registers() const {
  return {{"sample", 0, sample_qubits}, {"arith", arith_first(), arith_qubits}, {"ancilla", ancilla(), 1}};
}

// ---------------------------------------------------------------------------

sv::UnitaryMatrix build_prep_oracle(const dist::DiscreteDistribution& p) {
  const std::size_t n = p.size();
  log2_exact(n, "preparation oracle");
  const auto dim = static_cast<Eigen::Index>(n);

  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index x = 0; x < dim; ++x) basis(x, 0) = std::sqrt(p[static_cast<std::size_t>(x)]);
  basis.col(0).normalize();

  Eigen::Index filled = 1;
  for (Eigen::Index i = 0; i < dim && filled < dim; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, i);
    // Two passes of classical Gram-Schmidt keep the columns orthogonal to
    // machine precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < filled; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    }
    const double norm = v.norm();
    if (norm < 1e-9) continue;
    basis.col(filled++) = v / norm;
  }
  return sv::UnitaryMatrix(basis.cast<sv::cplx>());
}

sv::UnitaryMatrix build_log_oracle(const dist::DiscreteDistribution& p,
                                   const dist::DiscreteDistribution& q,
                                   const FixedPointCodec& codec) {
  if (p.size() != q.size()) throw sv::SimulatorError("log oracle: alphabet mismatch");
  const std::size_t nq = log2_exact(p.size(), "log oracle");
  const std::size_t levels = codec.levels();
  const dist::ClipParams clip(codec.L(), codec.bits());

  std::vector<std::size_t> codes(p.size());
  for (std::size_t w = 0; w < p.size(); ++w) codes[w] = codec.encode(dist::clipped_log_ratio(p, q, w, clip));

  const std::size_t dim = p.size() * levels;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < levels; ++r) {
    for (std::size_t w = 0; w < p.size(); ++w) {
      const std::size_t in = w + (r << nq);
      const std::size_t out = w + ((r ^ codes[w]) << nq);
      m(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)) = 1.0;
    }
  }
  return sv::UnitaryMatrix(std::move(m));
}

sv::UnitaryMatrix build_controlled_rotation(const FixedPointCodec& codec) {
  const std::size_t levels = codec.levels();
  const auto dim = static_cast<Eigen::Index>(2 * levels);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t v = 0; v < levels; ++v) {
    const double g = std::clamp((codec.decode(v) + codec.L()) / (2.0 * codec.L()), 0.0, 1.0);
    const sv::UnitaryMatrix r = sv::ry(2.0 * std::asin(std::sqrt(g)));
    const auto i0 = static_cast<Eigen::Index>(v);
    const auto i1 = static_cast<Eigen::Index>(v + levels);
    m(i0, i0) = r(0, 0);
    m(i0, i1) = r(0, 1);
    m(i1, i0) = r(1, 0);
    m(i1, i1) = r(1, 1);
  }
  return sv::UnitaryMatrix(std::move(m));
}

QklaCircuit assemble_a_operator(const sv::UnitaryMatrix& prep, const sv::UnitaryMatrix& log_oracle,
                                const sv::UnitaryMatrix& rotation, const FixedPointCodec& codec) {
  RegisterLayout layout;
  layout.sample_qubits = prep.num_qubits();
  layout.arith_qubits = static_cast<std::size_t>(codec.bits());
  if (rotation.num_qubits() != layout.arith_qubits + 1) {
    throw sv::SimulatorError("rotation does not act on arith + ancilla");
  }
  if (log_oracle.num_qubits() != layout.sample_qubits + layout.arith_qubits) {
    throw sv::SimulatorError("log oracle does not act on sample + arith");
  }
  const std::size_t n = layout.num_qubits();
  if (n > kMaxQubits) throw sv::SimulatorError("system register exceeds the simulator budget");

  const auto sample = sv::qubit_range(0, layout.sample_qubits);
  const auto sample_arith = sv::qubit_range(0, layout.sample_qubits + layout.arith_qubits);
  const auto arith_anc = sv::qubit_range(layout.arith_first(), layout.arith_qubits + 1);

  const sv::UnitaryMatrix P = sv::embed(prep, sample, n);
  const sv::UnitaryMatrix O = sv::embed(log_oracle, sample_arith, n);
  const sv::UnitaryMatrix R = sv::embed(rotation, arith_anc, n);

  QklaCircuit c;
  c.prep_oracle = prep;
  c.log_oracle = log_oracle;
  c.controlled_rotation = rotation;
  c.a_operator = O.adjoint() * R * O * P;
  c.layout = layout;
  c.codec = codec;
  return c;
}

sv::UnitaryMatrix build_grover(const sv::UnitaryMatrix& a_operator, std::size_t good_qubit) {
  const std::size_t n = a_operator.num_qubits();
  if (good_qubit >= n) throw sv::SimulatorError("good qubit out of range");
  const Eigen::MatrixXcd& A = a_operator.matrix();
  // -A S_0 A^dagger = 2 psi psi^dagger - I with psi = A|0>.
  const Eigen::VectorXcd psi = A.col(0);
  Eigen::MatrixXcd reflect = 2.0 * psi * psi.adjoint();
  reflect.diagonal().array() -= 1.0;
  // Right-multiplying by S_chi negates the columns of good basis states.
  for (Eigen::Index col = 0; col < reflect.cols(); ++col) {
    if ((static_cast<std::size_t>(col) >> good_qubit) & 1U) reflect.col(col) *= -1.0;
  }
  return sv::UnitaryMatrix(std::move(reflect));
}

sv::UnitaryMatrix build_grover(const QklaCircuit& circuit) {
  return build_grover(circuit.a_operator, circuit.layout.ancilla());
}

double quantized_clipped_kl(const dist::DiscreteDistribution& p,
                            const dist::DiscreteDistribution& q, const FixedPointCodec& codec) {
  const dist::ClipParams clip(codec.L(), codec.bits());
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] > 0.0) total += p[x] * codec.quantize(dist::clipped_log_ratio(p, q, x, clip));
  }
  return total;
}

QklaCircuit build_qkla_circuit(const dist::DiscreteDistribution& p,
                               const dist::DiscreteDistribution& q, const FixedPointCodec& codec) {
  QklaCircuit c = assemble_a_operator(build_prep_oracle(p), build_log_oracle(p, q, codec),
                                      build_controlled_rotation(codec), codec);
  c.grover = build_grover(c);
  c.quantized_target = quantized_clipped_kl(p, q, codec);
  return c;
}

sv::QuantumState prepare_state(const QklaCircuit& circuit) {
  const std::size_t n = circuit.layout.num_qubits();
  sv::QuantumState state(n, circuit.layout.registers());
  sv::apply_unitary(state, circuit.a_operator, sv::qubit_range(0, n));
  return state;
}

double encoded_amplitude(const QklaCircuit& circuit) {
  const sv::QuantumState state = prepare_state(circuit);
  const std::array<std::size_t, 1> anc{circuit.layout.ancilla()};
  return sv::measurement_distribution(state, anc)[1];
}

double arith_residual(const QklaCircuit& circuit) {
  const sv::QuantumState state = prepare_state(circuit);
  const auto arith = state.qubits("arith");
  const auto law = sv::measurement_distribution(state, arith);
  // Summed directly rather than as 1 - law[0] so tiny residuals are not
  // swamped by rounding of the dominant cell.
  double mass = 0.0;
  for (std::size_t v = 1; v < law.size(); ++v) mass += law[v];
  return mass;
}

// ---------------------------------------------------------------------------

namespace {

dist::DiscreteDistribution run_qae(const sv::UnitaryMatrix& a_operator, const sv::UnitaryMatrix& grover,
                                   std::size_t t) {
  if (t < 1) throw sv::SimulatorError("QAE needs at least one phase qubit");
  const std::size_t n_sys = a_operator.num_qubits();
  if (n_sys + t > kMaxQubits) {
    throw sv::SimulatorError("QAE register of " + std::to_string(n_sys + t) +
                             " qubits exceeds the budget of " + std::to_string(kMaxQubits));
  }
  const auto system = sv::qubit_range(0, n_sys);
  const auto phase = sv::qubit_range(n_sys, t);

  sv::QuantumState state(n_sys + t, {{"system", 0, n_sys}, {"phase", n_sys, t}});
  sv::apply_unitary(state, a_operator, system);
  const sv::UnitaryMatrix h = sv::hadamard();
  for (std::size_t q : phase) {
    const std::array<std::size_t, 1> target{q};
    sv::apply_unitary(state, h, target);
  }

  sv::UnitaryMatrix power = grover;
  for (std::size_t j = 0; j < t; ++j) {
    const std::array<std::size_t, 1> control{phase[j]};
    sv::apply_controlled_unitary(state, power, system, control);
    if (j + 1 < t) power = power * power;
  }
  sv::inverse_qft(state, phase);
  return sv::measurement_distribution(state, phase);
}

}  // namespace

dist::DiscreteDistribution run_canonical_qae(const sv::UnitaryMatrix& a_operator,
                                             std::size_t good_qubit, std::size_t t) {
  return run_qae(a_operator, build_grover(a_operator, good_qubit), t);
}

dist::DiscreteDistribution run_canonical_qae(const QklaCircuit& circuit, std::size_t t) {
  return run_qae(circuit.a_operator, circuit.grover, t);
}

std::size_t sample_index(std::span<const double> probs, Rng& rng) {
  if (probs.empty()) throw sv::SimulatorError("cannot sample from an empty law");
  const double u = uniform01(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  // Rounding left a sliver above the total; return the last positive cell.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return probs.size() - 1;
}

double estimate_from_distribution(const dist::DiscreteDistribution& phase_law, std::size_t k,
                                  double L, Rng& rng) {
  if (k < 1) throw sv::SimulatorError("need at least one shot");
  const std::size_t M = phase_law.size();
  std::vector<double> estimates(k);
  for (std::size_t i = 0; i < k; ++i) {
    estimates[i] = qae::outcome_amplitude(sample_index(phase_law.probs(), rng), M);
  }
  return 2.0 * L * qae::lower_median(std::move(estimates)) - L;
}

double qkla_full_estimate(const QklaCircuit& circuit, std::size_t t, std::size_t k, Rng& rng) {
  return estimate_from_distribution(run_canonical_qae(circuit, t), k, circuit.codec.L(), rng);
}

}  // namespace qkla::circuit

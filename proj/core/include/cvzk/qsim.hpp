#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

#include "cvzk/bits.hpp"
#include "cvzk/labels.hpp"
#include "cvzk/rng.hpp"
#include "cvzk/xz.hpp"

namespace cvzk::qsim {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Hard cap for dense statevector work; exceeding it throws TooManyQubits.
constexpr uint32_t kMaxQubits = 12;

struct TooManyQubits : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pure state on n qubits; amplitude index bit i is qubit i's basis value.
struct StateVector {
  uint32_t n = 0;
  CVec amplitudes;

  static StateVector basis(uint32_t n, uint64_t index);
  static StateVector from_labels(const std::vector<QubitLabel>& labels);
  double norm_sq() const { return amplitudes.squaredNorm(); }
};

/// Diagonal 0/1 projectors for one Steane level: code-space membership (Pi)
/// and parity (Delta).
struct PauliProjectorSet {
  uint32_t N = 0;
  std::vector<uint8_t> pi0, pi1;      // diagonal indicators, 2^N entries
  std::vector<uint8_t> delta0, delta1;
};

PauliProjectorSet make_projectors(uint32_t N, const std::vector<BitVec>& d0,
                                  const std::vector<BitVec>& d1);

/// Lowest eigenpair of the dense Hamiltonian matrix sum_s d_s P_s.
std::pair<StateVector, double> ground_state(const xz::XZHamiltonianInstance& H);

/// Dense Hamiltonian matrix (real symmetric; X/Z terms only).
Eigen::MatrixXd hamiltonian_matrix(const xz::XZHamiltonianInstance& H);

/// Samples a joint outcome of measuring every qubit in its given basis.
BitVec sample_measurements(const StateVector& state, const std::vector<Basis>& bases,
                           Rng& rng);

/// Product-label fast path: exact per-qubit closed-form probabilities.
BitVec sample_measurements(const std::vector<QubitLabel>& labels,
                           const std::vector<Basis>& bases, Rng& rng);

/// Xi_N: N-qubit to single-qubit channel from the Pauli-tensor overlaps.
CMat xi_channel(const CMat& sigma, uint32_t N);

/// Adjoint of Xi_N: single-qubit operator to an N-qubit operator.
CMat xi_adjoint(const CMat& tau, uint32_t N);

/// Dense H^{(x)N} (entries (-1)^{x.y} / sqrt(2^N)).
Eigen::MatrixXd hadamard_tensor(uint32_t N);

/// Honest single-logical-qubit encoding at code distance N, before the
/// one-time pad and permutation are applied: code block density matrix plus
/// the trap-qubit labels (the pads and permutation cancel exactly inside M,
/// so they are carried symbolically).
struct EncodedOneQubit {
  uint32_t N = 0;
  CMat code;                          // 2^N x 2^N
  std::vector<QubitLabel> traps;      // N labels in {0,+}
  std::vector<uint32_t> permutation;  // pi over 2N positions
  BitVec pad_a, pad_b;                // 2N bits each
};

/// Logical |0>/|1>/|+>/|-> as a uniform-coefficient codeword superposition.
StateVector logical_state(QubitLabel label, uint32_t N, const std::vector<BitVec>& d0,
                          const std::vector<BitVec>& d1);

/// The decoding procedure M restricted to one logical block: un-pad,
/// un-permute, discard the trap half, then apply Xi_N.
CMat decode_M(const EncodedOneQubit& encoded);

/// Fully dense variant of M for tiny synthetic codes (2N qubits <= 12):
/// rho lives on 2N qubits, pads/permutation applied explicitly.
CMat decode_M_dense(const CMat& rho, uint32_t N, const std::vector<uint32_t>& permutation,
                    const BitVec& pad_a, const BitVec& pad_b);

/// Kronecker product with qubit-index convention: C = A (low qubits) then B.
CMat kron(const CMat& low, const CMat& high);

/// Dense composition of the encoding E on one block: X^a Z^b pi(code x traps),
/// for oracle checks against decode_M_dense.
CMat encode_block_dense(const CMat& code, const std::vector<QubitLabel>& traps,
                        const std::vector<uint32_t>& permutation, const BitVec& pad_a,
                        const BitVec& pad_b);

struct SoundnessMax {
  double p_t;
  double p_h;
  double value;
};

/// Maximizes f(pT,pH) = (1 - pT + (1-pH)(pH + sqrt(pT)))/2 over [0,1]^2.
SoundnessMax soundness_bound_max();

/// Haar-ish random pure state (Gaussian amplitudes, normalized).
StateVector random_state(uint32_t n, Rng& rng);

/// Random density matrix (normalized Ginibre G G^dagger).
CMat random_density(uint32_t n, Rng& rng);

}  // namespace cvzk::qsim

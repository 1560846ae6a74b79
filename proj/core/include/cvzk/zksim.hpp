#pragma once

#include "cvzk/protocol.hpp"

namespace cvzk::zksim {

/// Trusted coin sampling (the hybrid that replaces the coin-flip protocol).
BitVec coins(size_t len, Rng& rng);

/// State the simulator accumulates across its stages.
struct SimulatorTape {
  BitVec r;
  steane::EncodingKey key;       // honest-distributed (t, pi, a, b)
  commitment::CommitmentString z_prime;  // commits to the fixed (pi0, a0, b0)
  BitVec beta;                   // standard-basis sample of E(rho_r)
  std::vector<BitVec> xs;
  std::vector<etcff::ModVec> ys;
  std::vector<BitVec> s_i;       // Hadamard-round uniform strings
  BitVec b_prime;                // retroactive Z-pad
  BitVec h_derived;              // basis choices deduced from trapdoors
};

/// Key-kind deduction from an opened trapdoor via the Invert trichotomy.
bool derive_h_from_trapdoors(const etcff::LweParams& params, const etcff::ModMatrix& A,
                             const etcff::ModVec& v, const etcff::TrapMatrix& R);

struct SimulatedSession {
  proto::SessionOutcome outcome;
  std::vector<std::pair<bool, proto::ProtocolMessage>> transcript;
  SimulatorTape tape;
  bool q_passed = false;
};

/// Runs the full classical simulation against a verifier session (which must
/// be in trusted-coins mode). The verifier object is copied for the one
/// rewind needed to align the NP-ZK simulator with the challenge schedule.
SimulatedSession run_simulated_session(const proto::SessionConfig& config,
                                       proto::VerifierSession verifier, uint64_t seed);

}  // namespace cvzk::zksim

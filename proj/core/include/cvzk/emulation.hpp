#pragma once

#define CVZK_EMULATION_INCLUDED 1

#include <memory>
#include <optional>

#include "cvzk/protocol.hpp"
#include "cvzk/qsim.hpp"

namespace cvzk::emu {

/// Witness source for the emulated honest prover.
struct WitnessSpec {
  enum class Mode : uint8_t {
    GroundState,    // sigma from exact diagonalization (instance.n <= 10)
    ProductLabels,  // explicit per-qubit labels for one witness copy
    RhoROracle,     // rho_r built from the session's true r (harness device)
  };
  Mode mode = Mode::ProductLabels;
  std::vector<QubitLabel> labels;  // ProductLabels: instance.n entries

  static WitnessSpec ground_state() { return {Mode::GroundState, {}}; }
  static WitnessSpec product(std::vector<QubitLabel> l) {
    return {Mode::ProductLabels, std::move(l)};
  }
  static WitnessSpec rho_r_oracle() { return {Mode::RhoROracle, {}}; }
};

/// Harness-granted read access to the verifier's private tape. The honest
/// quantum prover needs no trapdoors; this handle is the classical-emulation
/// device and never crosses the wire.
class TrapdoorOracle {
 public:
  const proto::VerifierSession& session() const { return *session_; }

 private:
  explicit TrapdoorOracle(const proto::VerifierSession* s) : session_(s) {}
  const proto::VerifierSession* session_;
  friend TrapdoorOracle make_trapdoor_oracle(const proto::VerifierSession&);
};

TrapdoorOracle make_trapdoor_oracle(const proto::VerifierSession& session);

using SessionSetup = proto::SessionSetup;
using proto::make_session_setup;

/// The emulated honest prover (Protocol steps 1-3, 5, 6, 8).
class HonestProver : public proto::ProverBehavior {
 public:
  HonestProver(const proto::SessionConfig& config, const SessionSetup& setup,
               WitnessSpec witness, std::optional<TrapdoorOracle> oracle,
               uint64_t seed);
  ~HonestProver() override;

  std::vector<proto::ProtocolMessage> start() override;
  std::vector<proto::ProtocolMessage> handle(const proto::ProtocolMessage& msg) override;

 protected:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class CheatStrategy : uint8_t {
  GuessR,          // honest machinery over rho_{r-hat} for a guessed r-hat
  RandomOutcomes,  // random commitment strings and reveals
  WrongPreimage,   // honest, except one corrupted test-round preimage bit
};

std::unique_ptr<proto::ProverBehavior> make_cheat_prover(
    const proto::SessionConfig& config, const SessionSetup& setup,
    CheatStrategy strategy, std::optional<TrapdoorOracle> oracle, uint64_t seed);

}  // namespace cvzk::emu

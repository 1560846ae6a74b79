#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cvzk/bits.hpp"
#include "cvzk/commitment.hpp"
#include "cvzk/etcff.hpp"
#include "cvzk/labels.hpp"
#include "cvzk/npzk.hpp"
#include "cvzk/rng.hpp"
#include "cvzk/steane.hpp"
#include "cvzk/xz.hpp"

namespace cvzk::proto {

// ---------------------------------------------------------------------------
// Session configuration
// ---------------------------------------------------------------------------

struct SessionConfig {
  xz::XZHamiltonianInstance instance;
  uint64_t m = 1;              // Hamiltonian term checks (witness copies)
  uint32_t steane_level = 1;   // t; N = 7^t
  etcff::LweParams lwe = etcff::LweParams::micro();
  commitment::Params commit_params = commitment::Params::standard();
  uint32_t npzk_reps = npzk::kDefaultReps;
  bool npzk_debug = false;     // transparent backend (flagged non-ZK)
  bool trusted_coins = false;  // coin flip replaced by a trusted r (zk runs)
  uint32_t r_bits = xz::kDefaultRBits;
  uint64_t session_id = 0;

  uint32_t N() const {
    uint32_t n = 1;
    for (uint32_t i = 0; i < steane_level; ++i) n *= 7;
    return n;
  }
  uint32_t n_logical() const { return uint32_t(m) * instance.n(); }
  uint32_t total_qubits() const { return 2 * n_logical() * N(); }
  size_t coin_bits() const { return size_t(m) * r_bits; }
};

// ---------------------------------------------------------------------------
// Messages
// ---------------------------------------------------------------------------

enum class MsgTag : uint8_t {
  ProverKeyCommit = 1,
  CoinCommit = 2,
  ProverCoins = 3,
  EtcffKeys = 4,
  CommitStrings = 5,
  RoundChoice = 6,
  TestReveal = 7,
  HadamardReveal = 8,
  VerifierOpen = 9,
  NpzkMsg = 10,
  Abort = 11,
  Verdict = 12,
};

struct ProverKeyCommit {
  std::vector<uint8_t> z;  // serialized commitment string
};
struct CoinCommit {
  std::vector<uint8_t> c;
};
struct ProverCoins {
  BitVec r_p;
};
struct EtcffKeys {
  std::vector<std::vector<uint8_t>> keys;  // one serialized key per qubit
};
struct CommitStrings {
  std::vector<std::vector<uint8_t>> ys;  // serialized Z_q vectors
};
struct RoundChoice {
  bool hadamard = false;
};
struct RevealItem {
  bool beta = false;
  BitVec x;  // preimage bits (test) or equation bits d (Hadamard)
};
struct TestReveal {
  std::vector<RevealItem> items;
};
struct HadamardReveal {
  std::vector<RevealItem> items;
};
struct VerifierOpen {
  BitVec r_v;
  BitVec s_v;
  BitVec outcomes;  // decoded m, one bit per physical qubit
  std::vector<std::vector<uint8_t>> trapdoors;
};
enum class NpzkSub : uint8_t { Commitments = 0, Challenges = 1, Opening = 2, Debug = 3 };
struct NpzkMsg {
  NpzkSub sub = NpzkSub::Commitments;
  std::vector<std::vector<uint8_t>> payload;
};
enum class AbortReason : uint16_t {
  ProtocolViolation = 1,
  TrapdoorInvalid = 2,
  QFailed = 3,
  CoinOpeningInvalid = 4,
  MalformedMessage = 5,
};
struct Abort {
  AbortReason reason = AbortReason::ProtocolViolation;
  std::string text;
};
struct Verdict {
  bool accept = false;
};

using MsgBody = std::variant<ProverKeyCommit, CoinCommit, ProverCoins, EtcffKeys,
                             CommitStrings, RoundChoice, TestReveal, HadamardReveal,
                             VerifierOpen, NpzkMsg, Abort, Verdict>;

struct ProtocolMessage {
  uint64_t session_id = 0;
  uint32_t seq = 0;
  MsgBody body;

  MsgTag tag() const { return MsgTag(body.index() + 1); }
};

// ---------------------------------------------------------------------------
// Wire format
// ---------------------------------------------------------------------------

struct WireError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedFrame : WireError {
  using WireError::WireError;
};
struct VersionMismatch : WireError {
  using WireError::WireError;
};

constexpr uint8_t kWireVersion = 1;

std::vector<uint8_t> frame_encode(const ProtocolMessage& msg);
ProtocolMessage frame_decode(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> serialize_modvec(const etcff::ModVec& v);
etcff::ModVec deserialize_modvec(const std::vector<uint8_t>& bytes);

// ---------------------------------------------------------------------------
// Protocol predicates and derived quantities
// ---------------------------------------------------------------------------

BitVec coin_result(const BitVec& r_v, const BitVec& r_p);

/// Measured logical blocks for the coin string r: one entry per selected
/// term support, ordered by term then support order.
std::vector<npzk::MeasuredBlock> measured_blocks(const xz::XZHamiltonianInstance& H,
                                                 const BitVec& r, uint64_t m,
                                                 uint32_t r_bits);

/// Per-logical-block transversal gate layer U_r (H on X-measured blocks).
std::vector<BlockGate> compute_U_r(const xz::XZHamiltonianInstance& H, const BitVec& r,
                                   uint64_t m, uint32_t r_bits);

/// Per-physical-qubit basis choice h (1 = Hadamard) for the session.
BitVec verifier_choose_h(const BitVec& r, const SessionConfig& config);

/// Conjugates the Pauli pad (a, b) through per-block gates: identity copies,
/// Hadamard swaps.
std::pair<BitVec, BitVec> conjugate_pauli_keys(const BitVec& a, const BitVec& b,
                                               const std::vector<BlockGate>& gates,
                                               uint32_t N);

/// Extracts u (the measured blocks' outcome bits, in measured order) from the
/// full decoded outcome string.
BitVec extract_u(const BitVec& outcomes, const std::vector<npzk::MeasuredBlock>& blocks,
                 uint32_t N);

enum class PredicateFail : uint8_t {
  None = 0,
  Length,
  Codeword,
  Count,
  Trap,
};

/// R_r: codeword validity, the COUNT threshold, and trap consistency of the
/// unpadded outcome string u.
bool predicate_R_r(const std::vector<QubitLabel>& traps,
                   const std::vector<uint32_t>& perm, const BitVec& u, const BitVec& r,
                   const SessionConfig& config, const steane::CodewordSets& sets,
                   PredicateFail* why = nullptr);

/// Q: R_r after undoing the pad conjugated through U_r.
bool predicate_Q(const std::vector<QubitLabel>& traps, const std::vector<uint32_t>& perm,
                 const BitVec& a, const BitVec& b, const BitVec& r, const BitVec& u,
                 const SessionConfig& config, const steane::CodewordSets& sets,
                 PredicateFail* why = nullptr);

/// Smallest accepted COUNT (m+1 when no count is accepted).
uint64_t count_threshold(const xz::XZHamiltonianInstance& H, uint64_t m);

/// Public NP statement data shared by prover and verifier at step 8.
npzk::RelationSpec build_relation_spec(const SessionConfig& config,
                                       const steane::CodewordSets& sets,
                                       const commitment::CommitmentScheme& scheme,
                                       const std::vector<uint8_t>& tag,
                                       const commitment::CommitmentString& z,
                                       const BitVec& r, const BitVec& u);

// ---------------------------------------------------------------------------
// Verifier session
// ---------------------------------------------------------------------------

enum class Phase : uint8_t {
  AwaitKeyCommit,
  SendCoinCommit,
  AwaitCoins,
  SendKeys,
  AwaitY,
  ChooseRound,
  AwaitReveal,
  OpenAndSend,
  NpzkVerify,
  Done,
};

struct VerifierStrategy {
  enum class Kind : uint8_t {
    Honest,
    BadTrapdoor,
    MalformedKey,
    TamperOutcomes,
    BiasCoins,
  };
  Kind kind = Kind::Honest;
  uint32_t tamper_weight = 0;
};

struct SessionOutcome {
  bool done = false;
  bool accepted = false;
  bool aborted = false;
  AbortReason abort_reason = AbortReason::ProtocolViolation;
  bool hadamard_round = false;
  bool marked_reject = false;  // failed inversion during decoding
};

/// The verifier state machine. Value semantics: copying a session snapshots
/// it (the ZK simulator's rewinding uses this).
class VerifierSession {
 public:
  VerifierSession(const SessionConfig& config, uint64_t seed,
                  VerifierStrategy strategy = {});

  /// Feeds one prover message; returns the verifier's responses.
  std::vector<ProtocolMessage> step(const ProtocolMessage& msg);

  Phase phase() const { return phase_; }
  const SessionOutcome& outcome() const { return outcome_; }
  const SessionConfig& config() const { return config_; }
  const commitment::CommitmentScheme& scheme() const { return scheme_; }
  const std::vector<uint8_t>& tag() const { return tag_; }

  /// Trusted-coins variant: the harness injects r before the session starts.
  void inject_coins(const BitVec& r);

  /// Private-tape accessors used by the emulation harness (trapdoor oracle)
  /// and by tests; a real network verifier would never expose these.
  const std::vector<etcff::EtcffKeyPair>& keypairs() const { return keypairs_; }
  const BitVec& h() const { return h_; }
  const BitVec& decoded_outcomes() const { return outcomes_; }
  const BitVec& coins_r() const { return r_; }

 private:
  std::vector<ProtocolMessage> fail(AbortReason reason, const std::string& text);
  ProtocolMessage make(MsgBody body);
  std::vector<ProtocolMessage> on_key_commit(const ProverKeyCommit& m);
  std::vector<ProtocolMessage> on_coins(const ProverCoins& m);
  std::vector<ProtocolMessage> send_keys();
  std::vector<ProtocolMessage> on_commit_strings(const CommitStrings& m);
  std::vector<ProtocolMessage> on_test_reveal(const TestReveal& m);
  std::vector<ProtocolMessage> on_hadamard_reveal(const HadamardReveal& m);
  std::vector<ProtocolMessage> on_npzk(const NpzkMsg& m);

  SessionConfig config_;
  VerifierStrategy strategy_;
  Rng rng_;
  steane::CodewordSets sets_;
  commitment::CommitmentScheme scheme_;
  std::vector<uint8_t> tag_;

  Phase phase_ = Phase::AwaitKeyCommit;
  uint32_t seq_ = 0;
  uint32_t expect_seq_ = 0;
  SessionOutcome outcome_;

  commitment::CommitmentString prover_z_;
  BitVec r_v_, s_v_, r_;
  bool coins_injected_ = false;
  BitVec h_;
  std::vector<etcff::EtcffKeyPair> keypairs_;
  std::vector<etcff::ModVec> ys_;
  bool hadamard_ = false;
  BitVec outcomes_;
  std::optional<npzk::RelationCircuit> circuit_;
  std::vector<uint8_t> npzk_challenges_;
};

/// Commitment-scheme setup shared by both parties of a session; matches
/// what VerifierSession derives from the same seed.
struct SessionSetup {
  commitment::CommitmentScheme scheme;
  std::vector<uint8_t> tag;
};
SessionSetup make_session_setup(const SessionConfig& config, uint64_t seed);

/// Abstract prover side; emulation and zksim provide implementations.
class ProverBehavior {
 public:
  virtual ~ProverBehavior() = default;
  /// Messages the prover sends before seeing anything.
  virtual std::vector<ProtocolMessage> start() = 0;
  virtual std::vector<ProtocolMessage> handle(const ProtocolMessage& msg) = 0;
};

struct SessionRecord {
  SessionOutcome outcome;
  std::vector<std::pair<bool, ProtocolMessage>> transcript;  // (prover_sent, msg)
};

/// Drives one full session between a prover behavior and a verifier session.
SessionRecord run_session(ProverBehavior& prover, VerifierSession& verifier);

}  // namespace cvzk::proto

#pragma once

#include <array>
#include <memory>
#include <cstdint>
#include <optional>
#include <vector>

#include "cvzk/bits.hpp"
#include "cvzk/commitment.hpp"
#include "cvzk/labels.hpp"
#include "cvzk/rng.hpp"
#include "cvzk/steane.hpp"

namespace cvzk::npzk {

struct WitnessInvalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParamsUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Arithmetic circuit over Z_q (q = 2^16). Boolean logic is encoded with
/// 0/1-valued wires; witness bits carry bitness constraints x(x-1) = 0.
enum class Op : uint8_t { Const, Add, Sub, MulC, Mul };

struct Gate {
  Op op;
  uint32_t a = 0, b = 0;  // input wire indices
  uint64_t c = 0;         // constant for Const / MulC
};

struct RelationCircuit {
  uint64_t q = 1 << 16;
  uint32_t n_witness = 0;   // wires [0, n_witness) are witness inputs
  std::vector<Gate> gates;  // gate i defines wire n_witness + i
  /// Declared outputs: wire w must evaluate to the expected constant. Every
  /// output wire is the result of a Mul gate.
  std::vector<std::pair<uint32_t, uint64_t>> outputs;
  uint32_t mul_count = 0;

  // Witness layout bookkeeping (filled by the relation builder).
  uint32_t off_sp = 0, off_t = 0, off_perm = 0, off_a = 0, off_b = 0;
  uint32_t off_count_bits = 0, n_count_bits = 0;
  uint32_t count_wire = 0;  // wire holding the arithmetic COUNT value

  uint32_t wire_count() const { return n_witness + uint32_t(gates.size()); }
};

/// Public data defining the step-8 NP statement for one session.
struct MeasuredBlock {
  uint32_t block_index;  // global logical-block index
  BlockGate gate;
};

struct TermCheck {
  std::vector<uint32_t> positions;  // indices into the measured-block list
  bool target;                      // expected XOR of decoded logical bits
};

struct RelationSpec {
  commitment::CommitmentScheme scheme;
  std::vector<uint8_t> tag;
  commitment::CommitmentString z;
  uint32_t n_logical = 0;
  uint32_t N = 0;
  std::vector<MeasuredBlock> measured;
  std::vector<TermCheck> terms;
  BitVec u;  // 2N bits per measured block, concatenated in measured order
  uint64_t m = 0;
  uint64_t count_min = 0;  // accept iff COUNT >= count_min (may be m+1: never)
  std::vector<BitVec> d0, d1;
};

RelationCircuit build_relation_circuit(const RelationSpec& spec);

/// Clear evaluation: full wire table.
std::vector<uint64_t> eval_clear(const RelationCircuit& c,
                                 const std::vector<uint64_t>& witness);
bool satisfied(const RelationCircuit& c, const std::vector<uint64_t>& witness);

/// Packs key material (plus the derived count bits) into the witness vector.
std::vector<uint64_t> assemble_witness(const RelationCircuit& c,
                                       const RelationSpec& spec, const BitVec& s_p,
                                       const std::vector<QubitLabel>& traps,
                                       const std::vector<uint32_t>& perm,
                                       const BitVec& a, const BitVec& b);

/// Canonical commit-message encoding shared by the protocol and the circuit:
/// one-hot(pi) || a || b.
BitVec encode_key_message(uint32_t two_n, const std::vector<uint32_t>& perm,
                          const BitVec& a, const BitVec& b);

/// One simulated party's view of one repetition.
struct PartyView {
  std::vector<uint16_t> input_shares;
  uint64_t tape_seed = 0;
  std::vector<uint16_t> mul_shares;
  std::vector<uint16_t> output_shares;
};

struct Repetition {
  std::array<commitment::CommitmentString, 3> view_commits;
  std::array<BitVec, 3> commit_rand;
  uint8_t challenge = 0;                    // opened pair (e, e+1 mod 3)
  std::array<PartyView, 2> opened;          // views e and e+1
  std::array<std::vector<uint16_t>, 3> published_outputs;
};

struct NpzkProofTranscript {
  bool debug_backend = false;
  std::vector<Repetition> reps;
  // Debug backend payload: the witness in the clear.
  std::vector<uint64_t> debug_witness;
};

constexpr uint32_t kDefaultReps = 40;

NpzkProofTranscript prove(const RelationCircuit& c,
                          const std::vector<uint64_t>& witness, uint32_t reps,
                          const commitment::CommitmentScheme& scheme,
                          const std::vector<uint8_t>& tag,
                          const std::vector<uint8_t>& challenges, Rng& rng);

/// Three-move interactive pieces: commit, then open against a challenge
/// schedule. prove() composes them; the session engine drives them
/// move-by-move.
struct ProverState;
std::shared_ptr<ProverState> prove_start(const RelationCircuit& c,
                                         const std::vector<uint64_t>& witness,
                                         uint32_t reps,
                                         const commitment::CommitmentScheme& scheme,
                                         const std::vector<uint8_t>& tag, Rng& rng,
                                         std::vector<std::vector<uint8_t>>& commit_msg);
NpzkProofTranscript prove_finish(std::shared_ptr<ProverState> st,
                                 const std::vector<uint8_t>& challenges);

bool verify(const RelationCircuit& c, const NpzkProofTranscript& proof,
            const commitment::CommitmentScheme& scheme,
            const std::vector<uint8_t>& tag);

/// Per-repetition verification (for cheat-acceptance measurements).
bool verify_repetition(const RelationCircuit& c, const Repetition& rep,
                       const commitment::CommitmentScheme& scheme,
                       const std::vector<uint8_t>& tag);

/// Best-cheat prover: shares a (generally non-satisfying) witness, then
/// patches one party's recorded shares so that published outputs match.
/// Caught exactly when the patched party's gate recomputation is challenged.
NpzkProofTranscript prove_cheat(const RelationCircuit& c,
                                const std::vector<uint64_t>& witness, uint32_t reps,
                                const commitment::CommitmentScheme& scheme,
                                const std::vector<uint8_t>& tag,
                                const std::vector<uint8_t>& challenges, Rng& rng);

/// Honest-verifier ZK simulator: fabricates the two views opened by the
/// given challenge schedule; works for unsatisfiable statements too.
NpzkProofTranscript simulate_transcript(const RelationCircuit& c, uint32_t reps,
                                        const commitment::CommitmentScheme& scheme,
                                        const std::vector<uint8_t>& tag,
                                        const std::vector<uint8_t>& challenges,
                                        Rng& rng);

/// Debug backend: witness revealed, relation checked in the clear.
NpzkProofTranscript prove_debug(const RelationCircuit& c,
                                const std::vector<uint64_t>& witness);

std::vector<uint8_t> serialize_transcript(const NpzkProofTranscript& proof);
NpzkProofTranscript deserialize_transcript(const std::vector<uint8_t>& bytes);

std::vector<uint8_t> view_digest(const PartyView& view);

/// Test support: one full three-party execution with all views retained.
std::array<PartyView, 3> execute_views(const RelationCircuit& c,
                                       const std::vector<uint64_t>& witness, Rng& rng);

}  // namespace cvzk::npzk

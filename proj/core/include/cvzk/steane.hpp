#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "cvzk/bits.hpp"
#include "cvzk/labels.hpp"
#include "cvzk/rng.hpp"

namespace cvzk::steane {

struct LevelUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Classical codeword sets of the concatenated code at level t (N = 7^t).
/// D0 holds the strings superposed in logical |0>, D1 those of logical |1>.
class CodewordSets {
 public:
  uint32_t level = 0;
  uint32_t N = 0;
  std::vector<BitVec> d0, d1;
  uint32_t K = 0;  // minimum nonzero weight over d0 u d1

  /// Membership decode: 0, 1, or nullopt for a non-codeword.
  std::optional<bool> decode(const BitVec& q) const;

  void build_lookup();

 private:
  std::unordered_set<uint64_t> lut0_, lut1_;
};

/// Enumerates the level-t codeword sets (t in {1, 2}).
CodewordSets gen_codeword_sets(uint32_t t);

/// Per-session encoding key: trap pattern, block permutation, Pauli pads and
/// the commitment randomness drawn alongside them.
struct EncodingKey {
  std::vector<QubitLabel> traps;   // n_logical * N labels in {0,+}
  std::vector<uint32_t> perm;      // permutation of 2N positions
  BitVec pad_a, pad_b;             // 2 * n_logical * N bits each
  BitVec s_p;                      // commitment randomness
};

EncodingKey gen_encoding_key(uint32_t n_logical, uint32_t N, size_t s_bits, Rng& rng);

/// Applies pi to a 2N-bit block: out[pi[p]] = w[p].
BitVec apply_perm(const std::vector<uint32_t>& perm, const BitVec& w);

/// Splits a measured 2N-bit block back into (q, z) with pi(q||z) = u.
std::pair<BitVec, BitVec> invert_block_split(const BitVec& u,
                                             const std::vector<uint32_t>& perm);

std::optional<bool> codeword_decode(const BitVec& q, const CodewordSets& sets);

/// Support condition of <z| G^{(x)N} |t> for product traps in {0,+}:
/// positions with (I,0) or (H,+) must read 0; others are unconstrained.
bool trap_check(const BitVec& z, const std::vector<QubitLabel>& trap_labels,
                BlockGate gate);

/// Classical sample of measuring E(rho) when rho is the given product state,
/// with every qubit of block i measured in block_basis[i]. Output is the full
/// 2nN-bit outcome string (permuted, padded).
BitVec sample_encoded_measurement(const std::vector<QubitLabel>& logical_labels,
                                  const EncodingKey& key, const CodewordSets& sets,
                                  const std::vector<Basis>& block_basis, Rng& rng);

/// Same, but block i's logical measurement outcome may be pinned (used when
/// the logical outcomes were drawn jointly from an entangled witness).
BitVec sample_encoded_measurement_forced(
    const std::vector<QubitLabel>& logical_labels, const EncodingKey& key,
    const CodewordSets& sets, const std::vector<Basis>& block_basis,
    const std::vector<std::optional<bool>>& forced_v, Rng& rng);

/// Exact per-qubit-basis sample of one encoded block (code half entangled,
/// trap half product). Needs N small enough for dense simulation; only
/// non-block-constant basis patterns require it.
BitVec sample_block_mixed_basis(QubitLabel label, const EncodingKey& key,
                                const CodewordSets& sets, uint32_t block_index,
                                const std::vector<Basis>& qubit_basis, Rng& rng);

/// Codeword sets rendered one string per line, for fixture diffing.
std::string dump_codewords(const CodewordSets& sets);

}  // namespace cvzk::steane

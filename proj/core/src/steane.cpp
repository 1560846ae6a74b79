#include "cvzk/steane.hpp"

#include <algorithm>
#include <sstream>

#include "cvzk/qsim.hpp"

namespace cvzk::steane {

namespace {

// Standard [7,4] Hamming generator, systematic form [I4 | P]. Bit i of each
// row is position i of the codeword.
constexpr uint8_t kHammingRows[4] = {
    0b1100001,  // 1000011 written LSB-first
    0b1010010,
    0b0110100,
    0b1111000,
};

BitVec word7(uint8_t bits) {
  BitVec w(7);
  for (uint32_t i = 0; i < 7; ++i) w.set(i, (bits >> i) & 1);
  return w;
}

}  // namespace

void CodewordSets::build_lookup() {
  lut0_.clear();
  lut1_.clear();
  for (const auto& w : d0) lut0_.insert(w.chunk_u64(0, N));
  for (const auto& w : d1) lut1_.insert(w.chunk_u64(0, N));
}

std::optional<bool> CodewordSets::decode(const BitVec& q) const {
  if (q.size() != N) return std::nullopt;
  uint64_t key = q.chunk_u64(0, N);
  if (lut0_.count(key)) return false;
  if (lut1_.count(key)) return true;
  return std::nullopt;
}

CodewordSets gen_codeword_sets(uint32_t t) {
  if (t < 1 || t > 2)
    throw LevelUnsupported("codeword enumeration supports levels 1 and 2");

  CodewordSets lvl1;
  lvl1.level = 1;
  lvl1.N = 7;
  for (uint32_t mask = 0; mask < 16; ++mask) {
    uint8_t bits = 0;
    for (uint32_t r = 0; r < 4; ++r)
      if ((mask >> r) & 1) bits ^= kHammingRows[r];
    BitVec w = word7(bits);
    (w.parity() ? lvl1.d1 : lvl1.d0).push_back(w);
  }
  auto by_value = [](const BitVec& a, const BitVec& b) {
    return a.chunk_u64(0, a.size()) < b.chunk_u64(0, b.size());
  };
  std::sort(lvl1.d0.begin(), lvl1.d0.end(), by_value);
  std::sort(lvl1.d1.begin(), lvl1.d1.end(), by_value);

  auto min_weight = [](const CodewordSets& s) {
    size_t k = SIZE_MAX;
    for (const auto* set : {&s.d0, &s.d1})
      for (const auto& w : *set) {
        size_t pc = w.popcount();
        if (pc > 0) k = std::min(k, pc);
      }
    return uint32_t(k);
  };
  lvl1.K = min_weight(lvl1);
  lvl1.build_lookup();
  if (t == 1) return lvl1;

  // Level 2: encode each bit of a level-1 codeword with the canonical level-1
  // representative (the minimum-weight odd codeword), then add one shared
  // even-codeword offset per string. This keeps |D^v| = 8^t, the parity split
  // and K = 3^t while staying enumerable.
  BitVec canon1 = lvl1.d1.front();
  for (const auto& w : lvl1.d1)
    if (w.popcount() < canon1.popcount()) canon1 = w;

  CodewordSets lvl2;
  lvl2.level = 2;
  lvl2.N = 49;
  for (const auto* outer : {&lvl1.d0, &lvl1.d1}) {
    for (const auto& w : *outer) {
      for (const auto& delta : lvl1.d0) {
        BitVec c(49);
        for (uint32_t i = 0; i < 7; ++i)
          for (uint32_t j = 0; j < 7; ++j) {
            bool bit = delta.get(j) ^ (w.get(i) && canon1.get(j));
            c.set(i * 7 + j, bit);
          }
        (outer == &lvl1.d1 ? lvl2.d1 : lvl2.d0).push_back(c);
      }
    }
  }
  std::sort(lvl2.d0.begin(), lvl2.d0.end(), by_value);
  std::sort(lvl2.d1.begin(), lvl2.d1.end(), by_value);
  lvl2.K = min_weight(lvl2);
  lvl2.build_lookup();
  return lvl2;
}

EncodingKey gen_encoding_key(uint32_t n_logical, uint32_t N, size_t s_bits, Rng& rng) {
  EncodingKey key;
  key.traps.reserve(size_t(n_logical) * N);
  for (size_t i = 0; i < size_t(n_logical) * N; ++i)
    key.traps.push_back(rng.next_bit() ? QubitLabel::Plus : QubitLabel::Zero);
  key.perm.resize(2 * N);
  for (uint32_t i = 0; i < 2 * N; ++i) key.perm[i] = i;
  rng.shuffle(key.perm);
  key.pad_a = rng.bits(size_t(2) * n_logical * N);
  key.pad_b = rng.bits(size_t(2) * n_logical * N);
  key.s_p = rng.bits(s_bits);
  return key;
}

BitVec apply_perm(const std::vector<uint32_t>& perm, const BitVec& w) {
  if (w.size() != perm.size()) throw std::invalid_argument("apply_perm: length mismatch");
  BitVec out(w.size());
  for (size_t p = 0; p < perm.size(); ++p) out.set(perm[p], w.get(p));
  return out;
}

std::pair<BitVec, BitVec> invert_block_split(const BitVec& u,
                                             const std::vector<uint32_t>& perm) {
  if (u.size() != perm.size())
    throw std::invalid_argument("invert_block_split: length mismatch");
  size_t N = perm.size() / 2;
  BitVec q(N), z(N);
  for (size_t p = 0; p < perm.size(); ++p) {
    bool bit = u.get(perm[p]);
    if (p < N) q.set(p, bit);
    else z.set(p - N, bit);
  }
  return {q, z};
}

std::optional<bool> codeword_decode(const BitVec& q, const CodewordSets& sets) {
  return sets.decode(q);
}

bool trap_check(const BitVec& z, const std::vector<QubitLabel>& trap_labels,
                BlockGate gate) {
  if (z.size() != trap_labels.size())
    throw std::invalid_argument("trap_check: length mismatch");
  for (size_t i = 0; i < z.size(); ++i) {
    bool constrained = (gate == BlockGate::I) ? (trap_labels[i] == QubitLabel::Zero)
                                              : (trap_labels[i] == QubitLabel::Plus);
    if (constrained && z.get(i)) return false;
  }
  return true;
}

namespace {

BitVec sample_codeword(bool v, const CodewordSets& sets, Rng& rng) {
  const auto& set = v ? sets.d1 : sets.d0;
  return set[rng.below(set.size())];
}

}  // namespace

BitVec sample_encoded_measurement_forced(
    const std::vector<QubitLabel>& logical_labels, const EncodingKey& key,
    const CodewordSets& sets, const std::vector<Basis>& block_basis,
    const std::vector<std::optional<bool>>& forced_v, Rng& rng) {
  size_t n = logical_labels.size();
  if (block_basis.size() != n || forced_v.size() != n)
    throw std::invalid_argument("encoded measurement: per-block vector mismatch");
  uint32_t N = sets.N;
  if (key.traps.size() != n * N || key.pad_a.size() != 2 * n * N)
    throw std::invalid_argument("encoded measurement: key does not match (n, N)");
  BitVec out(2 * n * N);
  for (size_t i = 0; i < n; ++i) {
    bool xbasis = block_basis[i] == Basis::X;
    QubitLabel l = logical_labels[i];
    if (xbasis) l = hadamard_label(l);

    bool v;
    if (forced_v[i].has_value()) {
      v = *forced_v[i];
    } else if (l == QubitLabel::Zero || l == QubitLabel::One) {
      v = (l == QubitLabel::One);
    } else {
      v = rng.next_bit();
    }
    BitVec code = sample_codeword(v, sets, rng);

    BitVec block(2 * N);
    for (uint32_t j = 0; j < N; ++j) block.set(j, code.get(j));
    for (uint32_t j = 0; j < N; ++j) {
      QubitLabel t = key.traps[i * N + j];
      if (xbasis) t = hadamard_label(t);
      bool bit = (t == QubitLabel::Zero) ? false
               : (t == QubitLabel::One) ? true
                                        : rng.next_bit();
      block.set(N + j, bit);
    }
    BitVec permuted = apply_perm(key.perm, block);
    // Standard-basis statistics see the X-pad; under a transversal H the pad
    // roles swap and the effective X-pad is b.
    const BitVec& pad = xbasis ? key.pad_b : key.pad_a;
    for (uint32_t j = 0; j < 2 * N; ++j)
      out.set(i * 2 * N + j, permuted.get(j) ^ pad.get(i * 2 * N + j));
  }
  return out;
}

BitVec sample_encoded_measurement(const std::vector<QubitLabel>& logical_labels,
                                  const EncodingKey& key, const CodewordSets& sets,
                                  const std::vector<Basis>& block_basis, Rng& rng) {
  std::vector<std::optional<bool>> none(logical_labels.size(), std::nullopt);
  return sample_encoded_measurement_forced(logical_labels, key, sets, block_basis, none,
                                           rng);
}

BitVec sample_block_mixed_basis(QubitLabel label, const EncodingKey& key,
                                const CodewordSets& sets, uint32_t block_index,
                                const std::vector<Basis>& qubit_basis, Rng& rng) {
  uint32_t N = sets.N;
  if (qubit_basis.size() != 2 * N)
    throw std::invalid_argument("mixed basis: need one basis per physical qubit");

  // Recover the pre-permutation basis pattern.
  std::vector<Basis> pre(2 * N);
  for (uint32_t p = 0; p < 2 * N; ++p) pre[p] = qubit_basis[key.perm[p]];

  std::vector<Basis> code_basis(pre.begin(), pre.begin() + N);
  bool uniform = std::all_of(code_basis.begin(), code_basis.end(),
                             [&](Basis b) { return b == code_basis[0]; });

  BitVec block(2 * N);
  if (uniform) {
    QubitLabel l = label;
    if (code_basis[0] == Basis::X) l = hadamard_label(l);
    bool v = (l == QubitLabel::Zero || l == QubitLabel::One) ? (l == QubitLabel::One)
                                                             : rng.next_bit();
    BitVec code = sample_codeword(v, sets, rng);
    for (uint32_t j = 0; j < N; ++j) block.set(j, code.get(j));
  } else {
    // Genuinely mixed pattern inside the code half: exact dense sampling.
    qsim::StateVector st = qsim::logical_state(label, N, sets.d0, sets.d1);
    BitVec code = qsim::sample_measurements(st, code_basis, rng);
    for (uint32_t j = 0; j < N; ++j) block.set(j, code.get(j));
  }
  for (uint32_t j = 0; j < N; ++j) {
    QubitLabel t = key.traps[size_t(block_index) * N + j];
    if (pre[N + j] == Basis::X) t = hadamard_label(t);
    bool bit = (t == QubitLabel::Zero) ? false
             : (t == QubitLabel::One) ? true
                                      : rng.next_bit();
    block.set(N + j, bit);
  }
  BitVec permuted = apply_perm(key.perm, block);
  BitVec out(2 * N);
  size_t base = size_t(block_index) * 2 * N;
  for (uint32_t j = 0; j < 2 * N; ++j) {
    bool xb = qubit_basis[j] == Basis::X;
    bool pad = xb ? key.pad_b.get(base + j) : key.pad_a.get(base + j);
    out.set(j, permuted.get(j) ^ pad);
  }
  return out;
}

std::string dump_codewords(const CodewordSets& sets) {
  std::ostringstream os;
  os << "level " << sets.level << " N " << sets.N << " K " << sets.K << "\n";
  os << "D0\n";
  for (const auto& w : sets.d0) os << w.to_string() << "\n";
  os << "D1\n";
  for (const auto& w : sets.d1) os << w.to_string() << "\n";
  return os.str();
}

}  // namespace cvzk::steane

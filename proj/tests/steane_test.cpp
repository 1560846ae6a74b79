#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "cvzk/steane.hpp"

using namespace cvzk;
using namespace cvzk::steane;

TEST_CASE("level-1 codeword sets: sizes, parity, zero word, K") {
  auto sets = gen_codeword_sets(1);
  CHECK(sets.N == 7);
  CHECK(sets.d0.size() == 8);
  CHECK(sets.d1.size() == 8);
  bool has_zero = false;
  for (const auto& w : sets.d0) {
    CHECK(w.parity() == false);
    if (w.popcount() == 0) has_zero = true;
  }
  for (const auto& w : sets.d1) CHECK(w.parity() == true);
  CHECK(has_zero);
  CHECK(sets.K == 3);
  // disjointness
  std::set<uint64_t> all;
  for (const auto* s : {&sets.d0, &sets.d1})
    for (const auto& w : *s) all.insert(w.chunk_u64(0, 7));
  CHECK(all.size() == 16);
}

TEST_CASE("level-2 codeword sets: sizes, parity, K = 9") {
  auto sets = gen_codeword_sets(2);
  CHECK(sets.N == 49);
  CHECK(sets.d0.size() == 64);
  CHECK(sets.d1.size() == 64);
  for (const auto& w : sets.d0) CHECK(w.parity() == false);
  for (const auto& w : sets.d1) CHECK(w.parity() == true);
  CHECK(sets.K == 9);
  bool has_zero = false;
  for (const auto& w : sets.d0)
    if (w.popcount() == 0) has_zero = true;
  CHECK(has_zero);
  std::set<uint64_t> all;
  for (const auto* s : {&sets.d0, &sets.d1})
    for (const auto& w : *s) all.insert(w.chunk_u64(0, 49));
  CHECK(all.size() == 128);
  CHECK_THROWS_AS(gen_codeword_sets(3), LevelUnsupported);
}

TEST_CASE("codeword_decode membership") {
  auto sets = gen_codeword_sets(1);
  CHECK(codeword_decode(BitVec(7), sets) == false);
  for (const auto& w : sets.d1) CHECK(codeword_decode(w, sets) == true);
  BitVec weight1(7);
  weight1.set(0, true);
  CHECK_FALSE(codeword_decode(weight1, sets).has_value());
  // every weight-1 and weight-2 string is invalid (K = 3)
  for (int i = 0; i < 7; ++i)
    for (int j = i; j < 7; ++j) {
      BitVec w(7);
      w.set(i, true);
      w.set(j, true);
      if (w.popcount() == 0) continue;
      CHECK_FALSE(codeword_decode(w, sets).has_value());
    }
}

TEST_CASE("encoding key generation is reproducible and well formed") {
  Rng r1(42), r2(42);
  auto k1 = gen_encoding_key(3, 7, 128, r1);
  auto k2 = gen_encoding_key(3, 7, 128, r2);
  CHECK(k1.traps == k2.traps);
  CHECK(k1.perm == k2.perm);
  CHECK(k1.pad_a == k2.pad_a);
  CHECK(k1.pad_b == k2.pad_b);
  CHECK(k1.s_p == k2.s_p);
  auto sorted = k1.perm;
  std::sort(sorted.begin(), sorted.end());
  for (uint32_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  CHECK(k1.traps.size() == 21);
  CHECK(k1.pad_a.size() == 42);
}

TEST_CASE("trap label frequencies are balanced") {
  Rng rng(7);
  int plus = 0;
  const int draws = 10000;
  for (int i = 0; i < draws / 100; ++i) {
    auto k = gen_encoding_key(1, 7, 8, rng);
    // 7 labels per key, 100 keys => 700 labels... use more keys for 10^4 labels
  }
  plus = 0;
  int total = 0;
  Rng rng2(8);
  while (total < draws) {
    auto k = gen_encoding_key(1, 7, 8, rng2);
    for (auto t : k.traps) {
      plus += (t == QubitLabel::Plus);
      ++total;
    }
  }
  double sigma = std::sqrt(0.25 * total);
  CHECK(std::abs(plus - total / 2.0) < 3 * sigma);
}

TEST_CASE("apply_perm and invert_block_split round trip") {
  Rng rng(9);
  auto sets = gen_codeword_sets(1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<uint32_t> perm(14);
    for (uint32_t i = 0; i < 14; ++i) perm[i] = i;
    rng.shuffle(perm);
    BitVec q = rng.bits(7), z = rng.bits(7);
    BitVec qz(14);
    for (int i = 0; i < 7; ++i) {
      qz.set(i, q.get(i));
      qz.set(7 + i, z.get(i));
    }
    auto u = apply_perm(perm, qz);
    auto [q2, z2] = invert_block_split(u, perm);
    CHECK(q2 == q);
    CHECK(z2 == z);
  }
  // identity permutation: halves
  std::vector<uint32_t> id(14);
  for (uint32_t i = 0; i < 14; ++i) id[i] = i;
  BitVec u = rng.bits(14);
  auto [q, z] = invert_block_split(u, id);
  for (int i = 0; i < 7; ++i) {
    CHECK(q.get(i) == u.get(i));
    CHECK(z.get(i) == u.get(7 + i));
  }
  // swap-halves permutation
  std::vector<uint32_t> swap(14);
  for (uint32_t i = 0; i < 14; ++i) swap[i] = (i + 7) % 14;
  auto [qs, zs] = invert_block_split(u, swap);
  for (int i = 0; i < 7; ++i) CHECK(qs.get(i) == u.get(7 + i));
}

TEST_CASE("trap_check support conditions") {
  std::vector<QubitLabel> plus7(7, QubitLabel::Plus);
  std::vector<QubitLabel> zero7(7, QubitLabel::Zero);
  Rng rng(10);
  // all '+', gate I: any z accepted
  for (int i = 0; i < 20; ++i) CHECK(trap_check(rng.bits(7), plus7, BlockGate::I));
  // all '0', gate I: only all-zero accepted
  CHECK(trap_check(BitVec(7), zero7, BlockGate::I));
  BitVec z(7);
  z.set(3, true);
  CHECK_FALSE(trap_check(z, zero7, BlockGate::I));
  // gate H flips the constrained set
  CHECK(trap_check(z, zero7, BlockGate::H));
  CHECK_FALSE(trap_check(z, plus7, BlockGate::H));
  CHECK(trap_check(BitVec(7), plus7, BlockGate::H));
  // mixed labels, gate H: reject probability of uniform z is 1 - 2^-#plus
  std::vector<QubitLabel> mixed = {QubitLabel::Plus, QubitLabel::Zero, QubitLabel::Plus,
                                   QubitLabel::Zero, QubitLabel::Zero, QubitLabel::Plus,
                                   QubitLabel::Zero};
  int accepts = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) accepts += trap_check(rng.bits(7), mixed, BlockGate::H);
  double p = std::pow(2.0, -3);
  double sigma = std::sqrt(p * (1 - p) * trials);
  CHECK(std::abs(accepts - p * trials) < 4 * sigma);
}

namespace {

struct IdentityKey {
  EncodingKey key;
};

EncodingKey identity_key(uint32_t n, uint32_t N, std::vector<QubitLabel> traps) {
  EncodingKey k;
  k.traps = std::move(traps);
  k.perm.resize(2 * N);
  for (uint32_t i = 0; i < 2 * N; ++i) k.perm[i] = i;
  k.pad_a = BitVec(2 * n * N);
  k.pad_b = BitVec(2 * n * N);
  k.s_p = BitVec(8);
  return k;
}

}  // namespace

TEST_CASE("encoded measurement composition rules with the identity key") {
  auto sets = gen_codeword_sets(1);
  Rng rng(11);
  auto key = identity_key(1, 7, std::vector<QubitLabel>(7, QubitLabel::Zero));

  // label '0', Z basis: q in D0, traps all zero
  for (int i = 0; i < 50; ++i) {
    auto out = sample_encoded_measurement({QubitLabel::Zero}, key, sets, {Basis::Z}, rng);
    auto [q, z] = invert_block_split(out, key.perm);
    CHECK(codeword_decode(q, sets) == false);
    CHECK(z.popcount() == 0);
  }
  // label '+', X basis: q in D0 always (H|+> = |0>)
  for (int i = 0; i < 50; ++i) {
    auto out = sample_encoded_measurement({QubitLabel::Plus}, key, sets, {Basis::X}, rng);
    auto [q, z] = invert_block_split(out, key.perm);
    CHECK(codeword_decode(q, sets) == false);
  }
  // label '+', Z basis: D0 and D1 each ~1/2
  int ones = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    auto out = sample_encoded_measurement({QubitLabel::Plus}, key, sets, {Basis::Z}, rng);
    auto [q, z] = invert_block_split(out, key.perm);
    auto v = codeword_decode(q, sets);
    REQUIRE(v.has_value());
    ones += *v;
  }
  double sigma = std::sqrt(0.25 * trials);
  CHECK(std::abs(ones - trials / 2.0) < 3 * sigma);
}

TEST_CASE("encoded measurement matches Born statistics for every label/basis") {
  auto sets = gen_codeword_sets(1);
  Rng rng(12);
  const int trials = 10000;
  struct Case {
    QubitLabel label;
    Basis basis;
    double p_one;  // probability decoded logical bit = 1
  };
  std::vector<Case> cases = {
      {QubitLabel::Zero, Basis::Z, 0.0},  {QubitLabel::One, Basis::Z, 1.0},
      {QubitLabel::Plus, Basis::Z, 0.5},  {QubitLabel::Minus, Basis::Z, 0.5},
      {QubitLabel::Zero, Basis::X, 0.5},  {QubitLabel::One, Basis::X, 0.5},
      {QubitLabel::Plus, Basis::X, 0.0},  {QubitLabel::Minus, Basis::X, 1.0},
  };
  for (const auto& c : cases) {
    Rng krng(13);
    auto key = gen_encoding_key(1, 7, 8, krng);
    int ones = 0;
    for (int i = 0; i < trials; ++i) {
      auto out = sample_encoded_measurement({c.label}, key, sets, {c.basis}, rng);
      // undo pad before splitting (X basis uses pad b)
      const BitVec& pad = (c.basis == Basis::X) ? key.pad_b : key.pad_a;
      BitVec unpadded = out;
      unpadded.xor_with(pad);
      auto [q, z] = invert_block_split(unpadded, key.perm);
      auto v = codeword_decode(q, sets);
      REQUIRE(v.has_value());
      ones += *v;
    }
    if (c.p_one == 0.0) CHECK(ones == 0);
    else if (c.p_one == 1.0) CHECK(ones == trials);
    else {
      double sigma = std::sqrt(0.25 * trials);
      CHECK(std::abs(ones - 0.5 * trials) < 3 * sigma);
    }
  }
}

TEST_CASE("per-bit trap catch probability at weight 1 is exact on average") {
  // For any fixed permutation, averaging the flipped position over all 2N
  // slots catches exactly (#constrained)/(2N).
  auto sets = gen_codeword_sets(1);
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    auto key = gen_encoding_key(1, 7, 8, rng);
    BlockGate gate = rng.next_bit() ? BlockGate::H : BlockGate::I;
    std::vector<QubitLabel> traps(key.traps.begin(), key.traps.begin() + 7);
    int constrained = 0;
    for (auto t : traps)
      constrained += (gate == BlockGate::I) ? (t == QubitLabel::Zero)
                                            : (t == QubitLabel::Plus);
    // Honest all-pass measurement: z = 0 at constrained positions. Flip one
    // physical bit p; catch iff it unpermutes into a constrained trap slot.
    int catches = 0;
    for (uint32_t p = 0; p < 14; ++p) {
      BitVec honest(14);  // unpadded honest outcome with all traps at 0
      BitVec tampered = honest;
      tampered.flip(p);
      auto [q, z] = invert_block_split(tampered, key.perm);
      bool caught = !trap_check(z, traps, gate);
      catches += caught;
    }
    CHECK(catches == constrained);
  }
}

TEST_CASE("trap catch rate is monotone in tamper weight") {
  auto sets = gen_codeword_sets(1);
  Rng rng(15);
  const int trials = 4000;
  double prev_rate = -1.0;
  for (uint32_t W : {1u, 3u, 7u, 12u}) {
    int catches = 0;
    for (int i = 0; i < trials; ++i) {
      auto key = gen_encoding_key(1, 7, 8, rng);
      std::vector<QubitLabel> traps(key.traps.begin(), key.traps.begin() + 7);
      BlockGate gate = rng.next_bit() ? BlockGate::H : BlockGate::I;
      // random weight-W tamper over the block
      std::vector<uint32_t> pos(14);
      for (uint32_t p = 0; p < 14; ++p) pos[p] = p;
      rng.shuffle(pos);
      BitVec tampered(14);
      for (uint32_t wi = 0; wi < W; ++wi) tampered.flip(pos[wi]);
      auto [q, z] = invert_block_split(tampered, key.perm);
      catches += !trap_check(z, traps, gate);
    }
    double rate = double(catches) / trials;
    CHECK(rate > prev_rate);
    prev_rate = rate;
  }
}

TEST_CASE("mixed-basis block sampler agrees with uniform-basis path statistics") {
  auto sets = gen_codeword_sets(1);
  Rng rng(16);
  auto key = gen_encoding_key(1, 7, 8, rng);
  // All-Z pattern through the mixed sampler must give valid codewords.
  std::vector<Basis> allz(14, Basis::Z);
  for (int i = 0; i < 200; ++i) {
    auto out = sample_block_mixed_basis(QubitLabel::Zero, key, sets, 0, allz, rng);
    BitVec unpadded = out;
    unpadded.xor_with(key.pad_a);
    auto [q, z] = invert_block_split(unpadded, key.perm);
    CHECK(codeword_decode(q, sets) == false);
    CHECK(trap_check(z, std::vector<QubitLabel>(key.traps.begin(), key.traps.begin() + 7),
                     BlockGate::I));
  }
  // A genuinely mixed pattern runs through the dense path without throwing.
  std::vector<Basis> mixed(14, Basis::Z);
  mixed[key.perm[0]] = Basis::X;
  auto out = sample_block_mixed_basis(QubitLabel::Zero, key, sets, 0, mixed, rng);
  CHECK(out.size() == 14);
}

TEST_CASE("codeword dump fixture is stable") {
  auto sets = gen_codeword_sets(1);
  auto dump = dump_codewords(sets);
  CHECK(dump.find("level 1 N 7 K 3") == 0);
  CHECK(dump.find("0000000") != std::string::npos);
}

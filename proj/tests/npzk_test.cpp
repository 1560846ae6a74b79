#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cvzk/npzk.hpp"
#include "cvzk/stats.hpp"

using namespace cvzk;
using namespace cvzk::npzk;

namespace {

/// Micro session fragment: one X(x)Z term over two logical blocks at t=1.
struct Fixture {
  steane::CodewordSets sets = steane::gen_codeword_sets(1);
  commitment::CommitmentScheme scheme;
  std::vector<uint8_t> tag;
  steane::EncodingKey key;
  RelationSpec spec;
  RelationCircuit circuit;
  std::vector<uint64_t> witness;

  explicit Fixture(uint64_t seed, bool tamper_trap = false) {
    Rng rng(seed);
    scheme = commitment::gen(commitment::Params::standard(), rng);
    tag = commitment::initiate(scheme, rng);
    key = steane::gen_encoding_key(2, 7, scheme.params.s_bits, rng);

    std::vector<QubitLabel> labels = {QubitLabel::Plus, QubitLabel::Zero};
    std::vector<Basis> bases = {Basis::X, Basis::Z};
    BitVec u = steane::sample_encoded_measurement(labels, key, sets, bases, rng);
    if (tamper_trap) {
      // Flip a constrained trap position of the I-gated block (block 1):
      // a '0'-labelled trap slot must read 0 after unpermuting.
      for (uint32_t j = 0; j < 7; ++j) {
        if (key.traps[7 + j] == QubitLabel::Zero) {
          // physical position of pre-permutation slot N + j in block 1
          uint32_t phys = key.perm[7 + j];
          u.flip(14 + phys);
          break;
        }
      }
    }

    spec.scheme = scheme;
    spec.tag = tag;
    spec.n_logical = 2;
    spec.N = 7;
    spec.measured = {{0, BlockGate::H}, {1, BlockGate::I}};
    spec.terms = {{{0, 1}, false}};  // -1 * X@0 Z@1: target XOR 0
    spec.u = u;
    spec.m = 1;
    spec.count_min = 1;
    spec.d0 = sets.d0;
    spec.d1 = sets.d1;

    BitVec msg = encode_key_message(14, key.perm, key.pad_a, key.pad_b);
    spec.z = commitment::commit(scheme, tag, msg, key.s_p);
    circuit = build_relation_circuit(spec);
    witness = assemble_witness(circuit, spec, key.s_p, key.traps, key.perm, key.pad_a,
                               key.pad_b);
  }
};

}  // namespace

TEST_CASE("honest witness satisfies the relation circuit") {
  for (uint64_t seed : {1, 2, 3, 4, 5}) {
    Fixture fx(seed);
    CHECK(satisfied(fx.circuit, fx.witness));
  }
}

TEST_CASE("flipping a constrained trap bit of u falsifies the relation") {
  int falsified = 0;
  for (uint64_t seed : {11, 12, 13, 14, 15}) {
    Fixture fx(seed, /*tamper_trap=*/true);
    falsified += !satisfied(fx.circuit, fx.witness);
  }
  CHECK(falsified == 5);
}

TEST_CASE("non-permutation one-hot matrix falsifies the relation") {
  Fixture fx(21);
  auto w = fx.witness;
  // Duplicate a row selection: two ones in one row, breaking the row sum.
  uint32_t row = 3;
  uint32_t cur = fx.key.perm[row];
  w[fx.circuit.off_perm + row * 14 + ((cur + 1) % 14)] = 1;
  CHECK_FALSE(satisfied(fx.circuit, w));
  // Clearing the honest one instead breaks it too.
  auto w2 = fx.witness;
  w2[fx.circuit.off_perm + row * 14 + cur] = 0;
  CHECK_FALSE(satisfied(fx.circuit, w2));
}

TEST_CASE("wrong commitment randomness falsifies the relation") {
  Fixture fx(22);
  auto w = fx.witness;
  w[fx.circuit.off_sp] ^= 1;
  CHECK_FALSE(satisfied(fx.circuit, w));
}

TEST_CASE("share reconstruction: the three shares sum to the clear wires") {
  Fixture fx(23);
  Rng rng(99);
  auto views = execute_views(fx.circuit, fx.witness, rng);
  auto clear = eval_clear(fx.circuit, fx.witness);
  for (uint32_t i = 0; i < fx.circuit.n_witness; ++i) {
    uint64_t sum = views[0].input_shares[i] + views[1].input_shares[i] +
                   views[2].input_shares[i];
    CHECK((sum & 0xffff) == clear[i]);
  }
  for (size_t k = 0; k < fx.circuit.outputs.size(); ++k) {
    uint64_t sum = views[0].output_shares[k] + views[1].output_shares[k] +
                   views[2].output_shares[k];
    CHECK((sum & 0xffff) == clear[fx.circuit.outputs[k].first]);
  }
}

TEST_CASE("honest prove verifies across challenge schedules") {
  Fixture fx(31);
  Rng rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<uint8_t> challenges(4);
    for (auto& e : challenges) e = uint8_t(rng.below(3));
    auto proof = prove(fx.circuit, fx.witness, 4, fx.scheme, fx.tag, challenges, rng);
    CHECK(verify(fx.circuit, proof, fx.scheme, fx.tag));
  }
}

TEST_CASE("mutated transcript rejects") {
  Fixture fx(32);
  Rng rng(102);
  std::vector<uint8_t> challenges = {0, 1, 2};
  auto proof = prove(fx.circuit, fx.witness, 3, fx.scheme, fx.tag, challenges, rng);
  // wire mutation in an opened view
  auto tampered = proof;
  tampered.reps[0].opened[0].mul_shares[5] ^= 1;
  CHECK_FALSE(verify(fx.circuit, tampered, fx.scheme, fx.tag));
  // commitment mismatch
  auto tampered2 = proof;
  tampered2.reps[1].view_commits[tampered2.reps[1].challenge][0] ^= 1;
  CHECK_FALSE(verify(fx.circuit, tampered2, fx.scheme, fx.tag));
  // published output mutation
  auto tampered3 = proof;
  tampered3.reps[2].published_outputs[(tampered3.reps[2].challenge + 2) % 3][0] ^= 1;
  CHECK_FALSE(verify(fx.circuit, tampered3, fx.scheme, fx.tag));
}

TEST_CASE("best cheat on a false statement wins exactly the unchallenged pairs") {
  Fixture fx(33, /*tamper_trap=*/true);
  REQUIRE_FALSE(satisfied(fx.circuit, fx.witness));
  Rng rng(103);
  const uint32_t reps = 900;
  std::vector<uint8_t> challenges(reps);
  for (auto& e : challenges) e = uint8_t(rng.below(3));
  auto proof = prove_cheat(fx.circuit, fx.witness, reps, fx.scheme, fx.tag, challenges,
                           rng);
  uint32_t accepted = 0;
  for (const auto& rep : proof.reps)
    accepted += verify_repetition(fx.circuit, rep, fx.scheme, fx.tag);
  double rate = double(accepted) / reps;
  CHECK(rate <= 2.0 / 3.0 + 0.05);
  CHECK(rate >= 2.0 / 3.0 - 0.06);
}

TEST_CASE("cheat acceptance extrapolates as (2/3)^reps for reps in {1,2,3}") {
  Fixture fx(44, /*tamper_trap=*/true);
  Rng rng(107);
  for (uint32_t reps : {1u, 2u, 3u}) {
    const int proofs = 300;
    int accepted = 0;
    for (int i = 0; i < proofs; ++i) {
      std::vector<uint8_t> ch(reps);
      for (auto& e : ch) e = uint8_t(rng.below(3));
      auto proof =
          prove_cheat(fx.circuit, fx.witness, reps, fx.scheme, fx.tag, ch, rng);
      accepted += verify(fx.circuit, proof, fx.scheme, fx.tag);
    }
    double rate = double(accepted) / proofs;
    double expect = std::pow(2.0 / 3.0, double(reps));
    double sigma = std::sqrt(expect * (1 - expect) / proofs);
    CHECK(std::fabs(rate - expect) < 4 * sigma + 0.01);
  }
}

TEST_CASE("simulated transcripts verify, even for false statements") {
  Fixture fx(34, /*tamper_trap=*/true);
  Rng rng(104);
  std::vector<uint8_t> challenges = {0, 1, 2, 1};
  auto sim = simulate_transcript(fx.circuit, 4, fx.scheme, fx.tag, challenges, rng);
  CHECK(verify(fx.circuit, sim, fx.scheme, fx.tag));
}

TEST_CASE("simulated opened-share marginals match honest proofs") {
  Fixture fx(35);
  Rng rng(105);
  // Compare the first opened view's first input-share distribution (binned)
  // between honest proofs and simulations at a fixed challenge.
  const int samples = 600;
  std::vector<uint64_t> honest_bins(16, 0), sim_bins(16, 0);
  for (int i = 0; i < samples; ++i) {
    std::vector<uint8_t> ch = {1};
    auto proof = prove(fx.circuit, fx.witness, 1, fx.scheme, fx.tag, ch, rng);
    honest_bins[proof.reps[0].opened[0].input_shares[0] % 16]++;
    auto sim = simulate_transcript(fx.circuit, 1, fx.scheme, fx.tag, ch, rng);
    sim_bins[sim.reps[0].opened[0].input_shares[0] % 16]++;
  }
  CHECK(stats::chi_square_two_sample(honest_bins, sim_bins) > 0.01);
}

TEST_CASE("debug backend proves and verifies in the clear") {
  Fixture fx(36);
  auto proof = prove_debug(fx.circuit, fx.witness);
  CHECK(proof.debug_backend);
  CHECK(verify(fx.circuit, proof, fx.scheme, fx.tag));
  Fixture bad(37, /*tamper_trap=*/true);
  CHECK_THROWS_AS(prove_debug(bad.circuit, bad.witness), WitnessInvalid);
}

TEST_CASE("transcript serialization round trip") {
  Fixture fx(38);
  Rng rng(106);
  std::vector<uint8_t> challenges = {2, 0};
  auto proof = prove(fx.circuit, fx.witness, 2, fx.scheme, fx.tag, challenges, rng);
  auto bytes = serialize_transcript(proof);
  auto back = deserialize_transcript(bytes);
  CHECK(verify(fx.circuit, back, fx.scheme, fx.tag));
  CHECK(back.reps.size() == proof.reps.size());
  CHECK(serialize_transcript(back) == bytes);
}

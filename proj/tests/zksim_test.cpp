#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cvzk/emulation.hpp"
#include "cvzk/stats.hpp"
#include "cvzk/zksim.hpp"

using namespace cvzk;
using namespace cvzk::proto;

namespace {

SessionConfig sim_config() {
  SessionConfig cfg;
  cfg.instance = xz::parse_instance_text("2 -1.9 -0.1\n-1 0 X\n-1 1 Z\n");
  cfg.m = 2;
  cfg.steane_level = 1;
  cfg.lwe = etcff::LweParams::micro();
  cfg.npzk_reps = 2;
  cfg.trusted_coins = true;
  return cfg;
}

}  // namespace

TEST_CASE("coins are uniform and deterministic under a seed") {
  Rng a(5), b(5);
  auto r1 = zksim::coins(128, a);
  auto r2 = zksim::coins(128, b);
  CHECK(r1 == r2);
  CHECK(r1.size() == 128);
  Rng c(6);
  uint64_t ones = 0, total = 0;
  for (int i = 0; i < 100; ++i) {
    auto r = zksim::coins(100, c);
    ones += r.popcount();
    total += 100;
  }
  double sigma = std::sqrt(0.25 * double(total));
  CHECK(std::fabs(double(ones) - total / 2.0) < 4 * sigma);
}

TEST_CASE("derive_h_from_trapdoors matches the generating kind") {
  auto p = etcff::LweParams::micro();
  Rng rng(7);
  int agree = 0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    auto kind = rng.next_bit() ? etcff::KeyKind::F : etcff::KeyKind::G;
    auto key = etcff::keygen(kind, p, rng);
    bool h = zksim::derive_h_from_trapdoors(p, key.A, key.v, key.R);
    agree += (h == (kind == etcff::KeyKind::F));
  }
  CHECK(agree == trials);
}

TEST_CASE("simulated sessions against the honest verifier accept") {
  auto cfg = sim_config();
  int test_rounds = 0, hadamard_rounds = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    VerifierSession verifier(cfg, seed);
    auto sim = zksim::run_simulated_session(cfg, verifier, seed);
    INFO("seed ", seed);
    CHECK(sim.outcome.done);
    CHECK(sim.outcome.accepted);
    (sim.outcome.hadamard_round ? hadamard_rounds : test_rounds)++;
    if (sim.outcome.hadamard_round) CHECK(sim.q_passed);
  }
  CHECK(test_rounds > 0);
  CHECK(hadamard_rounds > 0);
}

TEST_CASE("simulator aborts exactly like the honest prover on BadTrapdoor") {
  auto cfg = sim_config();
  int hadamard = 0;
  for (uint64_t seed = 40; hadamard < 10 && seed < 120; ++seed) {
    VerifierStrategy strategy{VerifierStrategy::Kind::BadTrapdoor, 0};
    VerifierSession verifier(cfg, seed, strategy);
    auto sim = zksim::run_simulated_session(cfg, verifier, seed);
    if (!sim.outcome.hadamard_round) continue;
    ++hadamard;
    CHECK(sim.outcome.aborted);
    CHECK(sim.outcome.abort_reason == AbortReason::TrapdoorInvalid);
  }
  CHECK(hadamard == 10);
}

TEST_CASE("simulator aborts on MalformedKey like the honest prover") {
  auto cfg = sim_config();
  int hadamard = 0;
  for (uint64_t seed = 140; hadamard < 8 && seed < 240; ++seed) {
    VerifierStrategy strategy{VerifierStrategy::Kind::MalformedKey, 0};
    VerifierSession verifier(cfg, seed, strategy);
    auto sim = zksim::run_simulated_session(cfg, verifier, seed);
    if (!sim.outcome.hadamard_round) continue;
    ++hadamard;
    CHECK(sim.outcome.aborted);
    CHECK(sim.outcome.abort_reason == AbortReason::TrapdoorInvalid);
  }
  CHECK(hadamard == 8);
}

TEST_CASE("simulator abort rates track the honest prover under tampering") {
  auto cfg = sim_config();
  const int pairs = 60;
  for (uint32_t w : {1u, 8u}) {
    int real_aborts = 0, sim_aborts = 0, counted = 0;
    for (uint64_t t = 0; counted < pairs && t < 4u * pairs; ++t) {
      uint64_t seed = 1000 + (uint64_t(w) << 20) + t;
      VerifierStrategy strategy{VerifierStrategy::Kind::TamperOutcomes, w};
      // real side
      VerifierSession rv(cfg, seed, strategy);
      Rng coin_rng = Rng(seed).child(0x636f696eULL);
      rv.inject_coins(coin_rng.bits(cfg.coin_bits()));
      auto setup = emu::make_session_setup(cfg, seed);
      emu::HonestProver prover(cfg, setup, emu::WitnessSpec::ground_state(),
                               emu::make_trapdoor_oracle(rv), seed);
      auto real = run_session(prover, rv);
      // simulated side
      VerifierSession sv(cfg, seed ^ 0x9999, strategy);
      auto sim = zksim::run_simulated_session(cfg, sv, seed);
      if (!real.outcome.hadamard_round && !sim.outcome.hadamard_round) continue;
      ++counted;
      real_aborts += real.outcome.aborted;
      sim_aborts += sim.outcome.aborted;
    }
    REQUIRE(counted == pairs);
    double diff = std::fabs(real_aborts - sim_aborts) / double(pairs);
    // loose 3-sigma-style agreement at unit scale
    CHECK(diff < 0.35);
  }
}

TEST_CASE("simulator tape never contains witness data and drops s_p") {
  auto cfg = sim_config();
  VerifierSession verifier(cfg, 7);
  auto sim = zksim::run_simulated_session(cfg, verifier, 7);
  // z' must verify against the fixed strings under no stored randomness:
  // the tape exposes no s_p field at all; check the commitment is present
  // and well-formed instead.
  CHECK(!sim.tape.z_prime.empty());
  CHECK(sim.tape.r.size() == cfg.coin_bits());
}

TEST_CASE("test-round simulated transcripts verify at the real verifier") {
  auto cfg = sim_config();
  int test_rounds = 0;
  for (uint64_t seed = 300; test_rounds < 10 && seed < 400; ++seed) {
    VerifierSession verifier(cfg, seed);
    auto sim = zksim::run_simulated_session(cfg, verifier, seed);
    if (sim.outcome.hadamard_round) continue;
    ++test_rounds;
    CHECK(sim.outcome.accepted);
  }
  CHECK(test_rounds == 10);
}

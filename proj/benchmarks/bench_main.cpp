#include <benchmark/benchmark.h>

#include "cvzk/emulation.hpp"
#include "cvzk/etcff.hpp"
#include "cvzk/npzk.hpp"
#include "cvzk/steane.hpp"

using namespace cvzk;

namespace {

proto::SessionConfig session_config(uint64_t m, bool demo) {
  proto::SessionConfig cfg;
  cfg.instance = xz::parse_instance_text("2 -1.9 -0.1\n-1 0 X\n-1 1 Z\n");
  cfg.m = m;
  cfg.steane_level = 1;
  cfg.lwe = demo ? etcff::LweParams::demo() : etcff::LweParams::micro();
  cfg.npzk_reps = 4;
  return cfg;
}

void BM_EtcffKeygen(benchmark::State& state) {
  auto p = state.range(0) ? etcff::LweParams::demo() : etcff::LweParams::micro();
  Rng rng(1);
  for (auto _ : state) {
    auto key = etcff::keygen(etcff::KeyKind::F, p, rng);
    benchmark::DoNotOptimize(key.v.data());
  }
}
BENCHMARK(BM_EtcffKeygen)->Arg(0)->Arg(1);

void BM_EtcffInvert(benchmark::State& state) {
  auto p = state.range(0) ? etcff::LweParams::demo() : etcff::LweParams::micro();
  Rng rng(2);
  auto key = etcff::keygen(etcff::KeyKind::F, p, rng);
  auto y = etcff::eval_sample(p, key, false, rng.bits(p.w_pre), rng);
  for (auto _ : state) {
    auto res = etcff::invert(p, key.A, key.R, y);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_EtcffInvert)->Arg(0)->Arg(1);

void BM_EncodedMeasurement(benchmark::State& state) {
  auto sets = steane::gen_codeword_sets(uint32_t(state.range(0)));
  Rng rng(3);
  auto key = steane::gen_encoding_key(4, sets.N, 128, rng);
  std::vector<QubitLabel> labels(4, QubitLabel::Plus);
  std::vector<Basis> bases = {Basis::X, Basis::Z, Basis::X, Basis::Z};
  for (auto _ : state) {
    auto out = steane::sample_encoded_measurement(labels, key, sets, bases, rng);
    benchmark::DoNotOptimize(out.bytes().data());
  }
}
BENCHMARK(BM_EncodedMeasurement)->Arg(1)->Arg(2);

void BM_CommitmentCommit(benchmark::State& state) {
  Rng rng(4);
  auto scheme = commitment::gen(commitment::Params::standard(), rng);
  auto tag = commitment::initiate(scheme, rng);
  BitVec msg = rng.bits(size_t(state.range(0)));
  BitVec s = rng.bits(scheme.params.s_bits);
  for (auto _ : state) {
    auto z = commitment::commit(scheme, tag, msg, s);
    benchmark::DoNotOptimize(z.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CommitmentCommit)->Range(256, 1 << 14)->Complexity();

void BM_NpzkProve(benchmark::State& state) {
  Rng rng(5);
  auto scheme = commitment::gen(commitment::Params::standard(), rng);
  auto tag = commitment::initiate(scheme, rng);
  auto sets = steane::gen_codeword_sets(1);
  auto key = steane::gen_encoding_key(2, 7, scheme.params.s_bits, rng);
  std::vector<QubitLabel> labels = {QubitLabel::Plus, QubitLabel::Zero};
  npzk::RelationSpec spec;
  spec.scheme = scheme;
  spec.tag = tag;
  spec.n_logical = 2;
  spec.N = 7;
  spec.measured = {{0, BlockGate::H}, {1, BlockGate::I}};
  spec.terms = {{{0, 1}, false}};
  spec.u = steane::sample_encoded_measurement(labels, key, sets, {Basis::X, Basis::Z},
                                              rng);
  spec.m = 1;
  spec.count_min = 1;
  spec.d0 = sets.d0;
  spec.d1 = sets.d1;
  spec.z = commitment::commit(
      scheme, tag, npzk::encode_key_message(14, key.perm, key.pad_a, key.pad_b),
      key.s_p);
  auto circuit = npzk::build_relation_circuit(spec);
  auto witness = npzk::assemble_witness(circuit, spec, key.s_p, key.traps, key.perm,
                                        key.pad_a, key.pad_b);
  std::vector<uint8_t> challenges(uint32_t(state.range(0)));
  for (auto& e : challenges) e = uint8_t(rng.below(3));
  for (auto _ : state) {
    auto proof = npzk::prove(circuit, witness, uint32_t(state.range(0)), scheme, tag,
                             challenges, rng);
    benchmark::DoNotOptimize(proof.reps.data());
  }
}
BENCHMARK(BM_NpzkProve)->Arg(1)->Arg(8)->Arg(40);

void BM_FullSession(benchmark::State& state) {
  auto cfg = session_config(uint64_t(state.range(0)), state.range(1) != 0);
  uint64_t seed = 0;
  for (auto _ : state) {
    proto::VerifierSession verifier(cfg, seed);
    auto setup = emu::make_session_setup(cfg, seed);
    emu::HonestProver prover(cfg, setup,
                             emu::WitnessSpec::product(labels_from_string("+0")),
                             emu::make_trapdoor_oracle(verifier), seed);
    auto record = proto::run_session(prover, verifier);
    benchmark::DoNotOptimize(record.outcome.accepted);
    ++seed;
  }
}
BENCHMARK(BM_FullSession)->Args({2, 0})->Args({8, 1});

}  // namespace

BENCHMARK_MAIN();

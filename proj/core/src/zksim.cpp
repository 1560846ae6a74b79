#include "cvzk/zksim.hpp"

// The simulator must stay independent of the witness-holding emulation
// module; pulling it in here is a build error by policy.
#ifdef CVZK_EMULATION_INCLUDED
#error "zksim must not depend on the emulation module"
#endif

namespace cvzk::zksim {

using namespace proto;

BitVec coins(size_t len, Rng& rng) { return rng.bits(len); }

bool derive_h_from_trapdoors(const etcff::LweParams& params, const etcff::ModMatrix& A,
                             const etcff::ModVec& v, const etcff::TrapMatrix& R) {
  auto inv = etcff::invert(params, A, R, v);
  return inv.has_value() && inv->e_inf < params.b_f;  // claw-free key => h = 1
}

namespace {

struct Driver {
  const SessionConfig& config;
  VerifierSession& verifier;
  Rng rng;
  steane::CodewordSets sets;
  SessionSetup setup;
  SimulatedSession out;
  uint32_t seq = 0;

  Driver(const SessionConfig& cfg, VerifierSession& v, uint64_t seed)
      : config(cfg),
        verifier(v),
        rng(Rng(seed).child(0x73696d75ULL)),
        sets(steane::gen_codeword_sets(cfg.steane_level)) {
    setup.scheme = verifier.scheme();
    setup.tag = verifier.tag();
  }

  ProtocolMessage make(MsgBody body) {
    ProtocolMessage msg;
    msg.session_id = config.session_id;
    msg.seq = seq++;
    msg.body = std::move(body);
    return msg;
  }

  /// Sends one message, records both directions, returns verifier replies.
  std::vector<ProtocolMessage> exchange(ProtocolMessage msg, bool record = true) {
    if (record) out.transcript.push_back({true, msg});
    auto replies = verifier.step(msg);
    if (record)
      for (const auto& m : replies) out.transcript.push_back({false, m});
    return replies;
  }
};

}  // namespace

SimulatedSession run_simulated_session(const SessionConfig& config,
                                       VerifierSession verifier, uint64_t seed) {
  if (!config.trusted_coins)
    throw std::logic_error("simulator requires the trusted-coins session variant");
  Driver drv(config, verifier, seed);
  SimulatedSession& out = drv.out;
  SimulatorTape& tape = out.tape;
  Rng& rng = drv.rng;
  uint32_t N = config.N();
  uint32_t total = config.total_qubits();

  // coins: the trusted hybrid supplies r to both sides.
  tape.r = coins(config.coin_bits(), rng);
  verifier.inject_coins(tape.r);

  // I1': honest-distributed encoding key; z' commits to fixed strings
  // (identity permutation, zero pads). s_p is dropped right after.
  tape.key = steane::gen_encoding_key(config.n_logical(), N,
                                      drv.setup.scheme.params.s_bits, rng);
  {
    std::vector<uint32_t> pi0(2 * N);
    for (uint32_t i = 0; i < 2 * N; ++i) pi0[i] = i;
    BitVec a0(size_t(2) * config.n_logical() * N), b0 = a0;
    BitVec msg0 = npzk::encode_key_message(2 * N, pi0, a0, b0);
    BitVec s_p = rng.bits(drv.setup.scheme.params.s_bits);
    tape.z_prime = commitment::commit(drv.setup.scheme, drv.setup.tag, msg0, s_p);
    // s_p discarded here: the NP-proof stage is simulated and never opens it.
  }
  BitVec r_p = rng.bits(config.coin_bits());

  std::vector<ProtocolMessage> replies;
  {
    auto first = drv.exchange(
        drv.make(ProverKeyCommit{commitment::serialize_commitment(tape.z_prime)}));
    auto second = drv.exchange(drv.make(ProverCoins{r_p}));
    replies = std::move(first);
    replies.insert(replies.end(), second.begin(), second.end());
  }

  std::vector<uint8_t> coin_commit_bytes;
  std::vector<etcff::PublicKey> keys;
  for (const auto& msg : replies) {
    if (auto* m = std::get_if<CoinCommit>(&msg.body)) coin_commit_bytes = m->c;
    if (auto* m = std::get_if<EtcffKeys>(&msg.body)) {
      for (const auto& bytes : m->keys)
        keys.push_back(etcff::deserialize_key(config.lwe, bytes));
    }
    if (std::holds_alternative<Verdict>(msg.body)) {
      out.outcome = verifier.outcome();
      return out;
    }
  }
  if (keys.size() != total) {
    out.outcome = verifier.outcome();
    return out;
  }

  // I2': standard-basis sample of E(rho_r), uniform preimages, images.
  auto rho_labels = xz::build_rho_r(config.instance, tape.r, config.m, config.r_bits);
  std::vector<QubitLabel> block_labels(config.n_logical());
  for (uint32_t b = 0; b < config.n_logical(); ++b) block_labels[b] = rho_labels[b];
  std::vector<Basis> allz(config.n_logical(), Basis::Z);
  tape.beta = steane::sample_encoded_measurement(block_labels, tape.key, drv.sets, allz,
                                                 rng);
  CommitStrings cs;
  for (uint32_t i = 0; i < total; ++i) {
    tape.xs.push_back(rng.bits(config.lwe.w_pre));
    tape.ys.push_back(
        etcff::eval_sample(config.lwe, keys[i], tape.beta.get(i), tape.xs[i], rng));
    cs.ys.push_back(serialize_modvec(tape.ys[i]));
  }
  replies = drv.exchange(drv.make(std::move(cs)));

  bool hadamard = false;
  for (const auto& msg : replies)
    if (auto* m = std::get_if<RoundChoice>(&msg.body)) hadamard = m->hadamard;

  if (!hadamard) {
    // Test round: exactly what the honest quantum prover would reveal.
    TestReveal tr;
    for (uint32_t i = 0; i < total; ++i)
      tr.items.push_back({tape.beta.get(i), tape.xs[i]});
    replies = drv.exchange(drv.make(std::move(tr)));
    out.outcome = verifier.outcome();
    return out;
  }

  // Hadamard round: uniform strings s_i of width w_pre + 1.
  HadamardReveal hr;
  for (uint32_t i = 0; i < total; ++i) {
    tape.s_i.push_back(rng.bits(config.lwe.w_pre + 1));
    RevealItem item;
    item.beta = tape.s_i[i].get(0);
    item.x = tape.s_i[i].slice(1, config.lwe.w_pre);
    hr.items.push_back(std::move(item));
  }
  replies = drv.exchange(drv.make(std::move(hr)));

  const VerifierOpen* open = nullptr;
  for (const auto& msg : replies)
    if (auto* m = std::get_if<VerifierOpen>(&msg.body)) open = m;
  if (!open) {
    out.outcome = verifier.outcome();
    return out;
  }

  // I3': the honest prover's checks, then the retroactive Z-pad.
  auto abort_with = [&](AbortReason reason, const std::string& text) {
    drv.exchange(drv.make(Abort{reason, text}));
    out.outcome = verifier.outcome();
    return out;
  };

  if (!coin_commit_bytes.empty()) {
    auto c = commitment::deserialize_commitment(coin_commit_bytes);
    if (!commitment::verify(drv.setup.scheme, drv.setup.tag, c, open->r_v, open->s_v))
      return abort_with(AbortReason::CoinOpeningInvalid, "coin opening rejected");
  }
  if (open->trapdoors.size() != total)
    return abort_with(AbortReason::MalformedMessage, "trapdoor count");
  std::vector<etcff::TrapMatrix> trapdoors;
  for (size_t i = 0; i < total; ++i) {
    trapdoors.push_back(etcff::deserialize_trapdoor(open->trapdoors[i]));
    if (!etcff::trapdoor_key_check(config.lwe, keys[i].A, keys[i].v, trapdoors[i]))
      return abort_with(AbortReason::TrapdoorInvalid,
                        "trapdoor/key check failed at qubit " + std::to_string(i));
  }

  // Deduce h from the trapdoors (never trusting any claimed basis choice).
  tape.h_derived = BitVec(total);
  for (uint32_t i = 0; i < total; ++i)
    tape.h_derived.set(
        i, derive_h_from_trapdoors(config.lwe, keys[i].A, keys[i].v, trapdoors[i]));

  // Unpadded per-block samples of the pre-pad state psi* in the deduced
  // bases give the beta entering the b' equation.
  steane::EncodingKey unpadded = tape.key;
  unpadded.pad_a = BitVec(unpadded.pad_a.size());
  unpadded.pad_b = BitVec(unpadded.pad_b.size());
  tape.b_prime = tape.key.pad_b;
  for (uint32_t blk = 0; blk < config.n_logical(); ++blk) {
    size_t base = size_t(blk) * 2 * N;
    bool any_h = false;
    for (uint32_t j = 0; j < 2 * N; ++j) any_h |= tape.h_derived.get(base + j);
    if (!any_h) continue;
    std::vector<Basis> qb(2 * N, Basis::Z);
    for (uint32_t j = 0; j < 2 * N; ++j)
      if (tape.h_derived.get(base + j)) qb[j] = Basis::X;
    BitVec sample = steane::sample_block_mixed_basis(block_labels[blk], unpadded,
                                                     drv.sets, blk, qb, rng);
    for (uint32_t j = 0; j < 2 * N; ++j) {
      uint32_t i = uint32_t(base + j);
      if (!tape.h_derived.get(i)) continue;
      auto pre = etcff::recover_preimages(config.lwe, keys[i].A, keys[i].v,
                                          trapdoors[i], tape.ys[i]);
      bool dxor = false;
      if (pre.size() == 2) {
        BitVec d = tape.s_i[i].slice(1, config.lwe.w_pre);
        dxor = d.dot(pre[0].x ^ pre[1].x);
      }
      bool beta_i = sample.get(j);
      tape.b_prime.set(i, beta_i ^ tape.s_i[i].get(0) ^ dxor);
    }
  }

  // Q on (t, pi, a, b') against the reported outcomes.
  BitVec r_opened = coin_result(open->r_v, r_p);
  auto blocks = measured_blocks(config.instance, r_opened, config.m, config.r_bits);
  BitVec u = extract_u(open->outcomes, blocks, N);
  out.q_passed = predicate_Q(tape.key.traps, tape.key.perm, tape.key.pad_a,
                             tape.b_prime, r_opened, u, config, drv.sets);
  if (!out.q_passed)
    return abort_with(AbortReason::QFailed, "predicate Q rejected the outcomes");

  // S3: simulate the NP proof. One rewind aligns the fabricated views with
  // the verifier's challenge schedule.
  auto spec = build_relation_spec(config, drv.sets, drv.setup.scheme, drv.setup.tag,
                                  tape.z_prime, r_opened, u);
  auto circuit = npzk::build_relation_circuit(spec);

  VerifierSession snapshot = verifier;  // rewind point
  NpzkMsg probe;
  probe.sub = NpzkSub::Commitments;
  uint32_t probe_seq = drv.seq;
  auto probe_replies = drv.exchange(drv.make(std::move(probe)), /*record=*/false);
  std::vector<uint8_t> challenges;
  for (const auto& msg : probe_replies)
    if (auto* m = std::get_if<NpzkMsg>(&msg.body))
      if (m->sub == NpzkSub::Challenges && !m->payload.empty())
        challenges = m->payload[0];
  verifier = snapshot;  // rewind
  drv.seq = probe_seq;
  if (challenges.empty()) {
    out.outcome = verifier.outcome();
    return out;
  }

  auto proof = npzk::simulate_transcript(circuit, uint32_t(challenges.size()),
                                         drv.setup.scheme, drv.setup.tag, challenges,
                                         rng);
  NpzkMsg commits;
  commits.sub = NpzkSub::Commitments;
  for (const auto& rep : proof.reps)
    for (int p = 0; p < 3; ++p)
      commits.payload.push_back(commitment::serialize_commitment(rep.view_commits[p]));
  replies = drv.exchange(drv.make(std::move(commits)));

  NpzkMsg opening;
  opening.sub = NpzkSub::Opening;
  opening.payload.push_back(npzk::serialize_transcript(proof));
  replies = drv.exchange(drv.make(std::move(opening)));

  out.outcome = verifier.outcome();
  return out;
}

}  // namespace cvzk::zksim

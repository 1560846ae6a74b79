#include "cvzk/emulation.hpp"

namespace cvzk::emu {

using namespace proto;

TrapdoorOracle make_trapdoor_oracle(const VerifierSession& session) {
  return TrapdoorOracle(&session);
}

namespace {

/// Joint logical-outcome samples for one witness copy: the measured pattern
/// determined by the key kinds, plus standard-basis values for the X-measured
/// qubits conditioned on the Z outcomes (used at commit time).
struct CopySample {
  BitVec mixed;        // per-qubit outcome in its assigned basis
  BitVec conditional;  // standard-basis values for X-assigned qubits
};

CopySample sample_copy(const qsim::StateVector& sigma, const std::vector<Basis>& bases,
                       Rng& rng) {
  CopySample out;
  out.mixed = qsim::sample_measurements(sigma, bases, rng);
  // Project onto the observed Z outcomes, then standard-sample the rest.
  qsim::CVec amps = sigma.amplitudes;
  for (uint32_t q = 0; q < sigma.n; ++q) {
    if (bases[q] != Basis::Z) continue;
    bool v = out.mixed.get(q);
    for (int64_t x = 0; x < amps.size(); ++x)
      if (bool((x >> q) & 1) != v) amps[x] = 0.0;
  }
  qsim::StateVector proj;
  proj.n = sigma.n;
  proj.amplitudes = amps;
  double norm = std::sqrt(proj.norm_sq());
  if (norm > 1e-12) proj.amplitudes /= norm;
  std::vector<Basis> allz(sigma.n, Basis::Z);
  out.conditional = qsim::sample_measurements(proj, allz, rng);
  return out;
}

CopySample sample_copy_labels(const std::vector<QubitLabel>& labels,
                              const std::vector<Basis>& bases, Rng& rng) {
  // Product state: qubits are independent, so the conditional standard-basis
  // values of X-measured qubits are fresh independent samples.
  CopySample out;
  out.mixed = qsim::sample_measurements(labels, bases, rng);
  std::vector<Basis> allz(labels.size(), Basis::Z);
  out.conditional = qsim::sample_measurements(labels, allz, rng);
  for (size_t q = 0; q < labels.size(); ++q)
    if (bases[q] == Basis::Z) out.conditional.set(q, out.mixed.get(q));
  return out;
}

}  // namespace

struct HonestProver::Impl {
  SessionConfig config;
  SessionSetup setup;
  WitnessSpec witness;
  std::optional<TrapdoorOracle> oracle;
  Rng rng;
  steane::CodewordSets sets;

  steane::EncodingKey key;
  commitment::CommitmentString z;
  BitVec r_p;
  std::vector<uint8_t> coin_commit_bytes;
  std::vector<etcff::PublicKey> keys;
  BitVec h;           // from the oracle's private tape (emulation device)
  BitVec beta;        // committed standard-basis bits, all qubits
  BitVec steer;       // Hadamard-round targets at f-key positions
  std::vector<BitVec> xs;
  std::vector<etcff::ModVec> ys;
  uint32_t seq = 0;
  std::shared_ptr<npzk::ProverState> npzk_state;
  std::optional<npzk::RelationCircuit> circuit;

  // Cheat knobs used by the cheat-prover wrappers.
  std::optional<BitVec> rho_r_override_coins;  // GuessR
  bool corrupt_test_preimage = false;          // WrongPreimage

  Impl(const SessionConfig& cfg, const SessionSetup& st, WitnessSpec w,
       std::optional<TrapdoorOracle> orc, uint64_t seed)
      : config(cfg),
        setup(st),
        witness(std::move(w)),
        oracle(std::move(orc)),
        rng(Rng(seed).child(0x70726f76ULL)),
        sets(steane::gen_codeword_sets(cfg.steane_level)) {}

  ProtocolMessage make(MsgBody body) {
    ProtocolMessage msg;
    msg.session_id = config.session_id;
    msg.seq = seq++;
    msg.body = std::move(body);
    return msg;
  }

  std::vector<ProtocolMessage> abort(AbortReason reason, const std::string& text) {
    std::vector<ProtocolMessage> out;
    out.push_back(make(Abort{reason, text}));
    return out;
  }

  std::vector<ProtocolMessage> start() {
    key = steane::gen_encoding_key(config.n_logical(), config.N(),
                                   setup.scheme.params.s_bits, rng);
    BitVec msg_bits = npzk::encode_key_message(2 * config.N(), key.perm, key.pad_a,
                                               key.pad_b);
    z = commitment::commit(setup.scheme, setup.tag, msg_bits, key.s_p);
    std::vector<ProtocolMessage> out;
    out.push_back(make(ProverKeyCommit{commitment::serialize_commitment(z)}));
    r_p = rng.bits(config.coin_bits());
    if (config.trusted_coins) out.push_back(make(ProverCoins{r_p}));
    return out;
  }

  std::vector<ProtocolMessage> on_coin_commit(const CoinCommit& m) {
    coin_commit_bytes = m.c;
    std::vector<ProtocolMessage> out;
    if (!config.trusted_coins) out.push_back(make(ProverCoins{r_p}));
    return out;
  }

  std::vector<ProtocolMessage> on_keys(const EtcffKeys& m) {
    if (m.keys.size() != config.total_qubits())
      return abort(AbortReason::MalformedMessage, "key count");
    keys.clear();
    for (const auto& bytes : m.keys) {
      try {
        keys.push_back(etcff::deserialize_key(config.lwe, bytes));
      } catch (const std::exception& e) {
        return abort(AbortReason::MalformedMessage, e.what());
      }
    }
    // The emulation device: learn the basis pattern from the verifier's tape
    // rather than waiting for trapdoors (a quantum prover needs neither).
    uint32_t N = config.N();
    h = BitVec(config.total_qubits());
    if (oracle) {
      const auto& pairs = oracle->session().keypairs();
      for (uint32_t i = 0; i < config.total_qubits(); ++i)
        h.set(i, pairs[i].kind == etcff::KeyKind::F);
    }
    std::vector<Basis> block_basis(config.n_logical(), Basis::Z);
    for (uint32_t blk = 0; blk < config.n_logical(); ++blk)
      if (h.get(size_t(blk) * 2 * N)) block_basis[blk] = Basis::X;

    // Logical outcomes per copy.
    uint32_t nq = config.instance.n();
    std::vector<std::optional<bool>> z_forced(config.n_logical());
    std::vector<std::optional<bool>> x_forced(config.n_logical(), std::nullopt);
    std::vector<QubitLabel> block_labels(config.n_logical(), QubitLabel::Zero);

    std::vector<QubitLabel> copy_labels;
    if (witness.mode == WitnessSpec::Mode::ProductLabels) {
      if (witness.labels.size() != nq)
        return abort(AbortReason::MalformedMessage, "witness label count");
      copy_labels = witness.labels;
    }
    std::vector<QubitLabel> rho_labels;
    if (witness.mode == WitnessSpec::Mode::RhoROracle) {
      if (!rho_r_override_coins && !oracle)
        return abort(AbortReason::MalformedMessage, "rho_r mode needs the oracle");
      const BitVec& coins = rho_r_override_coins ? *rho_r_override_coins
                                                 : oracle->session().coins_r();
      rho_labels = xz::build_rho_r(config.instance, coins, config.m, config.r_bits);
    }

    std::optional<qsim::StateVector> sigma;
    if (witness.mode == WitnessSpec::Mode::GroundState) {
      if (nq > 10) return abort(AbortReason::MalformedMessage, "ground mode cap");
      sigma = qsim::ground_state(config.instance).first;
    }

    for (uint64_t copy = 0; copy < config.m; ++copy) {
      std::vector<Basis> bases(nq, Basis::Z);
      for (uint32_t q = 0; q < nq; ++q)
        bases[q] = block_basis[size_t(copy) * nq + q];
      CopySample s;
      if (witness.mode == WitnessSpec::Mode::GroundState) {
        s = sample_copy(*sigma, bases, rng);
      } else if (witness.mode == WitnessSpec::Mode::RhoROracle) {
        std::vector<QubitLabel> labels(rho_labels.begin() + size_t(copy) * nq,
                                       rho_labels.begin() + size_t(copy + 1) * nq);
        s = sample_copy_labels(labels, bases, rng);
      } else {
        s = sample_copy_labels(copy_labels, bases, rng);
      }
      for (uint32_t q = 0; q < nq; ++q) {
        uint32_t blk = uint32_t(copy) * nq + q;
        z_forced[blk] = s.conditional.get(q);
        if (bases[q] == Basis::X) x_forced[blk] = s.mixed.get(q);
      }
    }

    // Commit-time standard-basis bits for every physical qubit.
    std::vector<Basis> allz(config.n_logical(), Basis::Z);
    beta = steane::sample_encoded_measurement_forced(block_labels, key, sets, allz,
                                                     z_forced, rng);
    // Hadamard-round steering pattern for X blocks.
    std::vector<Basis> mixed = block_basis;
    steer = steane::sample_encoded_measurement_forced(block_labels, key, sets, mixed,
                                                      x_forced, rng);

    xs.clear();
    ys.clear();
    CommitStrings cs;
    for (uint32_t i = 0; i < config.total_qubits(); ++i) {
      xs.push_back(rng.bits(config.lwe.w_pre));
      ys.push_back(etcff::eval_sample(config.lwe, keys[i], beta.get(i), xs[i], rng));
      cs.ys.push_back(serialize_modvec(ys[i]));
    }
    std::vector<ProtocolMessage> out;
    out.push_back(make(std::move(cs)));
    return out;
  }

  std::vector<ProtocolMessage> on_round(const RoundChoice& m) {
    std::vector<ProtocolMessage> out;
    if (!m.hadamard) {
      TestReveal tr;
      for (uint32_t i = 0; i < config.total_qubits(); ++i)
        tr.items.push_back({beta.get(i), xs[i]});
      if (corrupt_test_preimage && !tr.items.empty())
        tr.items[rng.below(tr.items.size())].x.flip(0);
      out.push_back(make(std::move(tr)));
      return out;
    }
    HadamardReveal hr;
    for (uint32_t i = 0; i < config.total_qubits(); ++i) {
      BitVec d = rng.bits(config.lwe.w_pre);
      bool beta_prime = rng.next_bit();
      if (h.get(i) && oracle) {
        const auto& kp = oracle->session().keypairs()[i];
        auto pre = etcff::recover_preimages(config.lwe, kp.A, kp.v, kp.R, ys[i]);
        if (pre.size() == 2)
          beta_prime = steer.get(i) ^ d.dot(pre[0].x ^ pre[1].x);
      }
      hr.items.push_back({beta_prime, std::move(d)});
    }
    out.push_back(make(std::move(hr)));
    return out;
  }

  std::vector<ProtocolMessage> on_open(const VerifierOpen& m) {
    // Coin-flip opening must match the earlier commitment.
    if (!coin_commit_bytes.empty()) {
      try {
        auto c = commitment::deserialize_commitment(coin_commit_bytes);
        if (!commitment::verify(setup.scheme, setup.tag, c, m.r_v, m.s_v))
          return abort(AbortReason::CoinOpeningInvalid, "coin opening rejected");
      } catch (const std::exception& e) {
        return abort(AbortReason::MalformedMessage, e.what());
      }
    }
    BitVec r = coin_result(m.r_v, r_p);
    // Trapdoor-and-key check over every pair.
    if (m.trapdoors.size() != keys.size())
      return abort(AbortReason::MalformedMessage, "trapdoor count");
    for (size_t i = 0; i < keys.size(); ++i) {
      etcff::TrapMatrix R;
      try {
        R = etcff::deserialize_trapdoor(m.trapdoors[i]);
      } catch (const std::exception& e) {
        return abort(AbortReason::MalformedMessage, e.what());
      }
      if (!etcff::trapdoor_key_check(config.lwe, keys[i].A, keys[i].v, R))
        return abort(AbortReason::TrapdoorInvalid,
                     "trapdoor/key check failed at qubit " + std::to_string(i));
    }
    // Q on the reported outcomes.
    if (m.outcomes.size() != config.total_qubits())
      return abort(AbortReason::MalformedMessage, "outcome length");
    auto blocks = measured_blocks(config.instance, r, config.m, config.r_bits);
    BitVec u = extract_u(m.outcomes, blocks, config.N());
    if (!predicate_Q(key.traps, key.perm, key.pad_a, key.pad_b, r, u, config, sets))
      return abort(AbortReason::QFailed, "predicate Q rejected the outcomes");

    auto spec = build_relation_spec(config, sets, setup.scheme, setup.tag, z, r, u);
    circuit = npzk::build_relation_circuit(spec);
    auto witness_vec = npzk::assemble_witness(*circuit, spec, key.s_p, key.traps,
                                              key.perm, key.pad_a, key.pad_b);
    std::vector<ProtocolMessage> out;
    if (config.npzk_debug) {
      auto proof = npzk::prove_debug(*circuit, witness_vec);
      NpzkMsg msg;
      msg.sub = NpzkSub::Debug;
      msg.payload.push_back(npzk::serialize_transcript(proof));
      out.push_back(make(std::move(msg)));
      return out;
    }
    std::vector<std::vector<uint8_t>> commits;
    npzk_state = npzk::prove_start(*circuit, witness_vec, config.npzk_reps,
                                   setup.scheme, setup.tag, rng, commits);
    NpzkMsg msg;
    msg.sub = NpzkSub::Commitments;
    msg.payload = std::move(commits);
    out.push_back(make(std::move(msg)));
    return out;
  }

  std::vector<ProtocolMessage> on_npzk(const NpzkMsg& m) {
    if (m.sub != NpzkSub::Challenges || !npzk_state)
      return abort(AbortReason::ProtocolViolation, "unexpected npzk message");
    if (m.payload.size() != 1)
      return abort(AbortReason::MalformedMessage, "challenge payload");
    auto proof = npzk::prove_finish(npzk_state, m.payload[0]);
    npzk_state.reset();
    NpzkMsg reply;
    reply.sub = NpzkSub::Opening;
    reply.payload.push_back(npzk::serialize_transcript(proof));
    std::vector<ProtocolMessage> out;
    out.push_back(make(std::move(reply)));
    return out;
  }

  std::vector<ProtocolMessage> handle(const ProtocolMessage& msg) {
    if (auto* m = std::get_if<CoinCommit>(&msg.body)) return on_coin_commit(*m);
    if (auto* m = std::get_if<EtcffKeys>(&msg.body)) return on_keys(*m);
    if (auto* m = std::get_if<RoundChoice>(&msg.body)) return on_round(*m);
    if (auto* m = std::get_if<VerifierOpen>(&msg.body)) return on_open(*m);
    if (auto* m = std::get_if<NpzkMsg>(&msg.body)) return on_npzk(*m);
    return {};
  }
};

HonestProver::HonestProver(const SessionConfig& config, const SessionSetup& setup,
                           WitnessSpec witness, std::optional<TrapdoorOracle> oracle,
                           uint64_t seed)
    : impl_(std::make_unique<Impl>(config, setup, std::move(witness), std::move(oracle),
                                   seed)) {}

HonestProver::~HonestProver() = default;

std::vector<ProtocolMessage> HonestProver::start() { return impl_->start(); }

std::vector<ProtocolMessage> HonestProver::handle(const ProtocolMessage& msg) {
  return impl_->handle(msg);
}

namespace {

/// GuessR: honest machinery, but the witness is rho_{r-hat} for a guess.
class GuessRProver : public HonestProver {
 public:
  GuessRProver(const SessionConfig& config, const SessionSetup& setup,
               std::optional<TrapdoorOracle> oracle, uint64_t seed)
      : HonestProver(config, setup, WitnessSpec::rho_r_oracle(), std::move(oracle),
                     seed) {
    Rng guess(Rng(seed).child(0x67756573ULL));
    impl_->rho_r_override_coins = guess.bits(config.coin_bits());
  }
};

/// WrongPreimage: honest, except one flipped preimage bit in test reveals.
class WrongPreimageProver : public HonestProver {
 public:
  WrongPreimageProver(const SessionConfig& config, const SessionSetup& setup,
                      WitnessSpec witness, std::optional<TrapdoorOracle> oracle,
                      uint64_t seed)
      : HonestProver(config, setup, std::move(witness), std::move(oracle), seed) {
    impl_->corrupt_test_preimage = true;
  }
};

/// RandomOutcomes: publishes uniform commitment strings and random reveals.
class RandomOutcomesProver : public ProverBehavior {
 public:
  RandomOutcomesProver(const SessionConfig& config, const SessionSetup& setup,
                       uint64_t seed)
      : config_(config), setup_(setup), rng_(Rng(seed).child(0x72616e64ULL)) {}

  std::vector<ProtocolMessage> start() override {
    BitVec msg_bits(8);
    s_junk_ = rng_.bits(setup_.scheme.params.s_bits);
    auto z = commitment::commit(setup_.scheme, setup_.tag, msg_bits, s_junk_);
    std::vector<ProtocolMessage> out;
    out.push_back(make(ProverKeyCommit{commitment::serialize_commitment(z)}));
    r_p_ = rng_.bits(config_.coin_bits());
    if (config_.trusted_coins) out.push_back(make(ProverCoins{r_p_}));
    return out;
  }

  std::vector<ProtocolMessage> handle(const ProtocolMessage& msg) override {
    std::vector<ProtocolMessage> out;
    if (std::holds_alternative<CoinCommit>(msg.body)) {
      if (!config_.trusted_coins) out.push_back(make(ProverCoins{r_p_}));
    } else if (std::holds_alternative<EtcffKeys>(msg.body)) {
      CommitStrings cs;
      for (uint32_t i = 0; i < config_.total_qubits(); ++i) {
        etcff::ModVec y(config_.lwe.m_lwe);
        for (auto& v : y) v = rng_.below(config_.lwe.q);
        cs.ys.push_back(serialize_modvec(y));
      }
      out.push_back(make(std::move(cs)));
    } else if (auto* m = std::get_if<RoundChoice>(&msg.body)) {
      if (!m->hadamard) {
        TestReveal tr;
        for (uint32_t i = 0; i < config_.total_qubits(); ++i)
          tr.items.push_back({rng_.next_bit(), rng_.bits(config_.lwe.w_pre)});
        out.push_back(make(std::move(tr)));
      } else {
        HadamardReveal hr;
        for (uint32_t i = 0; i < config_.total_qubits(); ++i)
          hr.items.push_back({rng_.next_bit(), rng_.bits(config_.lwe.w_pre)});
        out.push_back(make(std::move(hr)));
      }
    } else if (std::holds_alternative<VerifierOpen>(msg.body)) {
      out.push_back(make(Abort{AbortReason::QFailed, "no consistent outcomes"}));
    }
    return out;
  }

 private:
  ProtocolMessage make(MsgBody body) {
    ProtocolMessage m;
    m.session_id = config_.session_id;
    m.seq = seq_++;
    m.body = std::move(body);
    return m;
  }
  SessionConfig config_;
  SessionSetup setup_;
  Rng rng_;
  BitVec r_p_, s_junk_;
  uint32_t seq_ = 0;
};

}  // namespace

std::unique_ptr<ProverBehavior> make_cheat_prover(const SessionConfig& config,
                                                  const SessionSetup& setup,
                                                  CheatStrategy strategy,
                                                  std::optional<TrapdoorOracle> oracle,
                                                  uint64_t seed) {
  switch (strategy) {
    case CheatStrategy::GuessR:
      return std::make_unique<GuessRProver>(config, setup, std::move(oracle), seed);
    case CheatStrategy::RandomOutcomes:
      return std::make_unique<RandomOutcomesProver>(config, setup, seed);
    case CheatStrategy::WrongPreimage:
      return std::make_unique<WrongPreimageProver>(
          config, setup, WitnessSpec::ground_state(), std::move(oracle), seed);
  }
  throw std::invalid_argument("unknown cheat strategy");
}

}  // namespace cvzk::emu

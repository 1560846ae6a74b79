#include "cvzk/protocol.hpp"

namespace cvzk::proto {

SessionSetup make_session_setup(const SessionConfig& config, uint64_t seed) {
  Rng setup = Rng(seed).child(0x76657269ULL).child(1);
  SessionSetup s;
  s.scheme = commitment::gen(config.commit_params, setup);
  s.tag = commitment::initiate(s.scheme, setup);
  return s;
}

VerifierSession::VerifierSession(const SessionConfig& config, uint64_t seed,
                                 VerifierStrategy strategy)
    : config_(config),
      strategy_(strategy),
      rng_(Rng(seed).child(0x76657269ULL)),
      sets_(steane::gen_codeword_sets(config.steane_level)) {
  auto setup = make_session_setup(config, seed);
  scheme_ = std::move(setup.scheme);
  tag_ = std::move(setup.tag);
}

ProtocolMessage VerifierSession::make(MsgBody body) {
  ProtocolMessage msg;
  msg.session_id = config_.session_id;
  msg.seq = seq_++;
  msg.body = std::move(body);
  return msg;
}

std::vector<ProtocolMessage> VerifierSession::fail(AbortReason reason,
                                                   const std::string& text) {
  outcome_.done = true;
  outcome_.accepted = false;
  outcome_.aborted = true;
  outcome_.abort_reason = reason;
  phase_ = Phase::Done;
  std::vector<ProtocolMessage> out;
  out.push_back(make(Abort{reason, text}));
  out.push_back(make(Verdict{false}));
  return out;
}

void VerifierSession::inject_coins(const BitVec& r) {
  if (!config_.trusted_coins)
    throw std::logic_error("inject_coins requires trusted_coins mode");
  r_ = r;
  coins_injected_ = true;
}

std::vector<ProtocolMessage> VerifierSession::step(const ProtocolMessage& msg) {
  if (phase_ == Phase::Done) return {};
  if (msg.session_id != config_.session_id)
    return fail(AbortReason::ProtocolViolation, "wrong session id");
  if (msg.seq != expect_seq_)
    return fail(AbortReason::ProtocolViolation, "sequence gap");
  ++expect_seq_;

  if (std::holds_alternative<Abort>(msg.body))
    return fail(std::get<Abort>(msg.body).reason, "prover aborted");

  switch (phase_) {
    case Phase::AwaitKeyCommit:
      if (auto* m = std::get_if<ProverKeyCommit>(&msg.body)) return on_key_commit(*m);
      break;
    case Phase::AwaitCoins:
      if (auto* m = std::get_if<ProverCoins>(&msg.body)) return on_coins(*m);
      break;
    case Phase::AwaitY:
      if (auto* m = std::get_if<CommitStrings>(&msg.body)) return on_commit_strings(*m);
      break;
    case Phase::AwaitReveal:
      if (!hadamard_) {
        if (auto* m = std::get_if<TestReveal>(&msg.body)) return on_test_reveal(*m);
      } else {
        if (auto* m = std::get_if<HadamardReveal>(&msg.body))
          return on_hadamard_reveal(*m);
      }
      break;
    case Phase::NpzkVerify:
      if (auto* m = std::get_if<NpzkMsg>(&msg.body)) return on_npzk(*m);
      break;
    default:
      break;
  }
  return fail(AbortReason::ProtocolViolation,
              "unexpected message tag " + std::to_string(int(msg.tag())) +
                  " in phase " + std::to_string(int(phase_)));
}

std::vector<ProtocolMessage> VerifierSession::on_key_commit(const ProverKeyCommit& m) {
  try {
    prover_z_ = commitment::deserialize_commitment(m.z);
  } catch (const std::exception& e) {
    return fail(AbortReason::MalformedMessage, e.what());
  }
  phase_ = Phase::SendCoinCommit;
  std::vector<ProtocolMessage> out;
  if (!config_.trusted_coins) {
    r_v_ = rng_.bits(config_.coin_bits());
    s_v_ = rng_.bits(scheme_.params.s_bits);
    auto c = commitment::commit(scheme_, tag_, r_v_, s_v_);
    out.push_back(make(CoinCommit{commitment::serialize_commitment(c)}));
  }
  phase_ = Phase::AwaitCoins;
  return out;
}

std::vector<ProtocolMessage> VerifierSession::on_coins(const ProverCoins& m) {
  if (m.r_p.size() != config_.coin_bits())
    return fail(AbortReason::MalformedMessage, "coin share length");
  std::vector<ProtocolMessage> out;
  if (config_.trusted_coins) {
    if (!coins_injected_)
      return fail(AbortReason::ProtocolViolation, "coins not injected");
    // Derive the share retroactively so r = r_v xor r_p still holds, then
    // commit to it; the prover checks the opening as usual.
    r_v_ = r_ ^ m.r_p;
    s_v_ = rng_.bits(scheme_.params.s_bits);
    auto c = commitment::commit(scheme_, tag_, r_v_, s_v_);
    out.push_back(make(CoinCommit{commitment::serialize_commitment(c)}));
  } else {
    r_ = coin_result(r_v_, m.r_p);
  }
  phase_ = Phase::SendKeys;
  auto keys = send_keys();
  out.insert(out.end(), keys.begin(), keys.end());
  return out;
}

std::vector<ProtocolMessage> VerifierSession::send_keys() {
  h_ = verifier_choose_h(r_, config_);
  keypairs_.clear();
  keypairs_.reserve(config_.total_qubits());
  EtcffKeys msg;
  Rng keyrng = rng_.child(2);
  for (uint32_t i = 0; i < config_.total_qubits(); ++i) {
    etcff::KeyKind kind = h_.get(i) ? etcff::KeyKind::F : etcff::KeyKind::G;
    etcff::EtcffKeyPair pair;
    if (strategy_.kind == VerifierStrategy::Kind::MalformedKey && i == 0) {
      pair = etcff::keygen_with_error(config_.lwe,
                                      (config_.lwe.b_f + config_.lwe.b_g) / 2, keyrng);
    } else {
      pair = etcff::keygen(kind, config_.lwe, keyrng);
    }
    msg.keys.push_back(etcff::serialize_key(config_.lwe, pair.A, pair.v));
    keypairs_.push_back(std::move(pair));
  }
  phase_ = Phase::AwaitY;
  std::vector<ProtocolMessage> out;
  out.push_back(make(std::move(msg)));
  return out;
}

std::vector<ProtocolMessage> VerifierSession::on_commit_strings(const CommitStrings& m) {
  if (m.ys.size() != config_.total_qubits())
    return fail(AbortReason::MalformedMessage, "commitment string count");
  ys_.clear();
  ys_.reserve(m.ys.size());
  for (const auto& bytes : m.ys) {
    try {
      auto y = deserialize_modvec(bytes);
      if (y.size() != config_.lwe.m_lwe)
        return fail(AbortReason::MalformedMessage, "commitment string dimension");
      for (auto v : y)
        if (v >= config_.lwe.q)
          return fail(AbortReason::MalformedMessage, "commitment string range");
      ys_.push_back(std::move(y));
    } catch (const std::exception& e) {
      return fail(AbortReason::MalformedMessage, e.what());
    }
  }
  phase_ = Phase::ChooseRound;
  hadamard_ = rng_.next_bit();
  outcome_.hadamard_round = hadamard_;
  phase_ = Phase::AwaitReveal;
  std::vector<ProtocolMessage> out;
  out.push_back(make(RoundChoice{hadamard_}));
  return out;
}

std::vector<ProtocolMessage> VerifierSession::on_test_reveal(const TestReveal& m) {
  if (m.items.size() != config_.total_qubits())
    return fail(AbortReason::MalformedMessage, "reveal count");
  bool all_ok = true;
  for (uint32_t i = 0; i < config_.total_qubits(); ++i) {
    const auto& it = m.items[i];
    if (it.x.size() != config_.lwe.w_pre) {
      all_ok = false;
      break;
    }
    etcff::PublicKey pk{keypairs_[i].A, keypairs_[i].v};
    if (!etcff::check_preimage(config_.lwe, pk, it.beta, it.x, ys_[i])) {
      all_ok = false;
      break;
    }
  }
  outcome_.done = true;
  outcome_.accepted = all_ok;
  phase_ = Phase::Done;
  std::vector<ProtocolMessage> out;
  out.push_back(make(Verdict{all_ok}));
  return out;
}

std::vector<ProtocolMessage> VerifierSession::on_hadamard_reveal(
    const HadamardReveal& m) {
  if (m.items.size() != config_.total_qubits())
    return fail(AbortReason::MalformedMessage, "reveal count");
  outcomes_ = BitVec(config_.total_qubits());
  for (uint32_t i = 0; i < config_.total_qubits(); ++i) {
    const auto& it = m.items[i];
    const auto& kp = keypairs_[i];
    if (!h_.get(i)) {
      // Standard-basis outcome via trapdoor inversion of y_i.
      auto pre = etcff::recover_preimages(config_.lwe, kp.A, kp.v, kp.R, ys_[i]);
      if (pre.empty()) {
        outcomes_.set(i, rng_.next_bit());
        outcome_.marked_reject = true;
      } else {
        outcomes_.set(i, pre[0].b);
      }
    } else {
      if (it.x.size() != config_.lwe.w_pre)
        return fail(AbortReason::MalformedMessage, "equation bit length");
      auto pre = etcff::recover_preimages(config_.lwe, kp.A, kp.v, kp.R, ys_[i]);
      if (pre.size() != 2) {
        outcomes_.set(i, rng_.next_bit());
        outcome_.marked_reject = true;
      } else {
        bool dxor = it.x.dot(pre[0].x ^ pre[1].x);
        outcomes_.set(i, it.beta ^ dxor);
      }
    }
  }

  phase_ = Phase::OpenAndSend;
  VerifierOpen open;
  open.r_v = r_v_;
  open.s_v = s_v_;
  if (strategy_.kind == VerifierStrategy::Kind::BiasCoins) {
    // Attempt to re-pick the coin share after the fact; the prover's opening
    // check must catch this.
    open.r_v = rng_.bits(r_v_.size());
  }
  open.outcomes = outcomes_;
  if (strategy_.kind == VerifierStrategy::Kind::TamperOutcomes &&
      strategy_.tamper_weight > 0) {
    std::vector<uint32_t> pos(config_.total_qubits());
    for (uint32_t i = 0; i < pos.size(); ++i) pos[i] = i;
    rng_.shuffle(pos);
    for (uint32_t w = 0; w < strategy_.tamper_weight && w < pos.size(); ++w)
      open.outcomes.flip(pos[w]);
    outcomes_ = open.outcomes;
  }
  for (const auto& kp : keypairs_) {
    if (strategy_.kind == VerifierStrategy::Kind::BadTrapdoor) {
      etcff::TrapMatrix junk = kp.R;
      for (auto& v : junk.data) v = int32_t(rng_.below(config_.lwe.q));
      open.trapdoors.push_back(etcff::serialize_trapdoor(junk));
    } else {
      open.trapdoors.push_back(etcff::serialize_trapdoor(kp.R));
    }
  }
  phase_ = Phase::NpzkVerify;
  std::vector<ProtocolMessage> out;
  out.push_back(make(std::move(open)));
  return out;
}

std::vector<ProtocolMessage> VerifierSession::on_npzk(const NpzkMsg& m) {
  std::vector<ProtocolMessage> out;
  switch (m.sub) {
    case NpzkSub::Commitments: {
      if (!npzk_challenges_.empty())
        return fail(AbortReason::ProtocolViolation, "duplicate npzk commitments");
      npzk_challenges_.resize(config_.npzk_reps);
      for (auto& e : npzk_challenges_) e = uint8_t(rng_.below(3));
      NpzkMsg reply;
      reply.sub = NpzkSub::Challenges;
      reply.payload.push_back(npzk_challenges_);
      out.push_back(make(std::move(reply)));
      return out;
    }
    case NpzkSub::Opening:
    case NpzkSub::Debug: {
      if (m.sub == NpzkSub::Opening && npzk_challenges_.empty())
        return fail(AbortReason::ProtocolViolation, "opening before challenges");
      if (m.payload.size() != 1)
        return fail(AbortReason::MalformedMessage, "npzk payload");
      bool ok = false;
      try {
        auto proof = npzk::deserialize_transcript(m.payload[0]);
        if (proof.debug_backend != (m.sub == NpzkSub::Debug))
          return fail(AbortReason::MalformedMessage, "npzk backend mismatch");
        if (!proof.debug_backend) {
          if (proof.reps.size() != npzk_challenges_.size())
            return fail(AbortReason::MalformedMessage, "npzk repetition count");
          for (size_t i = 0; i < proof.reps.size(); ++i)
            if (proof.reps[i].challenge != npzk_challenges_[i] % 3)
              return fail(AbortReason::ProtocolViolation, "npzk challenge mismatch");
        }
        if (!circuit_.has_value()) {
          auto blocks =
              measured_blocks(config_.instance, r_, config_.m, config_.r_bits);
          BitVec u = extract_u(outcomes_, blocks, config_.N());
          auto spec =
              build_relation_spec(config_, sets_, scheme_, tag_, prover_z_, r_, u);
          circuit_ = npzk::build_relation_circuit(spec);
        }
        ok = npzk::verify(*circuit_, proof, scheme_, tag_);
      } catch (const std::exception& e) {
        return fail(AbortReason::MalformedMessage, e.what());
      }
      outcome_.done = true;
      outcome_.accepted = ok && !outcome_.marked_reject;
      phase_ = Phase::Done;
      out.push_back(make(Verdict{outcome_.accepted}));
      return out;
    }
    default:
      return fail(AbortReason::MalformedMessage, "unexpected npzk submessage");
  }
}

SessionRecord run_session(ProverBehavior& prover, VerifierSession& verifier) {
  SessionRecord record;
  std::vector<ProtocolMessage> to_verifier = prover.start();
  bool done = false;
  size_t guard = 0;
  while (!done && guard++ < 1000) {
    std::vector<ProtocolMessage> to_prover;
    for (const auto& msg : to_verifier) {
      record.transcript.push_back({true, msg});
      auto replies = verifier.step(msg);
      to_prover.insert(to_prover.end(), replies.begin(), replies.end());
    }
    to_verifier.clear();
    for (const auto& msg : to_prover) {
      record.transcript.push_back({false, msg});
      if (std::holds_alternative<Verdict>(msg.body)) {
        done = true;
        continue;
      }
      auto replies = prover.handle(msg);
      to_verifier.insert(to_verifier.end(), replies.begin(), replies.end());
    }
    if (!done && to_verifier.empty() && to_prover.empty()) break;
  }
  record.outcome = verifier.outcome();
  return record;
}

}  // namespace cvzk::proto

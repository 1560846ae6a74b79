#include <openssl/evp.h>

#include <cstring>

#include "cvzk/npzk.hpp"

namespace cvzk::npzk {

namespace {

constexpr uint64_t kMask = 0xffff;

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(uint8_t(v & 0xff));
  out.push_back(uint8_t(v >> 8));
}
void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}
void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

struct Reader {
  const std::vector<uint8_t>& buf;
  size_t pos = 0;
  uint8_t u8() {
    if (pos + 1 > buf.size()) throw std::invalid_argument("npzk: truncated");
    return buf[pos++];
  }
  uint16_t u16() { return uint16_t(u8()) | (uint16_t(u8()) << 8); }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(u8()) << (8 * i);
    return v;
  }
  uint64_t u64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(u8()) << (8 * i);
    return v;
  }
};

std::vector<uint8_t> serialize_view(const PartyView& v) {
  std::vector<uint8_t> out;
  put_u32(out, uint32_t(v.input_shares.size()));
  for (auto x : v.input_shares) put_u16(out, x);
  put_u64(out, v.tape_seed);
  put_u32(out, uint32_t(v.mul_shares.size()));
  for (auto x : v.mul_shares) put_u16(out, x);
  put_u32(out, uint32_t(v.output_shares.size()));
  for (auto x : v.output_shares) put_u16(out, x);
  return out;
}

PartyView deserialize_view(Reader& r) {
  PartyView v;
  v.input_shares.resize(r.u32());
  for (auto& x : v.input_shares) x = r.u16();
  v.tape_seed = r.u64();
  v.mul_shares.resize(r.u32());
  for (auto& x : v.mul_shares) x = r.u16();
  v.output_shares.resize(r.u32());
  for (auto& x : v.output_shares) x = r.u16();
  return v;
}

BitVec digest_bits(const std::vector<uint8_t>& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::vector<uint8_t> mdv(md, md + len);
  return BitVec(std::move(mdv), size_t(len) * 8);
}

/// One repetition's full three-party execution.
struct Execution {
  std::array<std::vector<uint16_t>, 3> wires;
  std::array<Rng, 3> tapes;
  std::array<uint64_t, 3> seeds;

  Execution(const RelationCircuit& c, const std::vector<uint64_t>& witness, Rng& rng)
      : tapes{Rng(0), Rng(0), Rng(0)} {
    for (int p = 0; p < 3; ++p) {
      seeds[p] = rng.next_u64();
      tapes[p] = Rng(seeds[p]);
      wires[p].assign(c.wire_count(), 0);
    }
    for (uint32_t i = 0; i < c.n_witness; ++i) {
      uint16_t s1 = uint16_t(rng.next_u64());
      uint16_t s2 = uint16_t(rng.next_u64());
      uint16_t s3 = uint16_t((witness[i] - s1 - s2) & kMask);
      wires[0][i] = s1;
      wires[1][i] = s2;
      wires[2][i] = s3;
    }
  }
};

uint16_t mul_rule(uint16_t xi, uint16_t yi, uint16_t xj, uint16_t yj, uint16_t ri,
                  uint16_t rj) {
  uint64_t z = uint64_t(xi) * yi + uint64_t(xj) * yi + uint64_t(xi) * yj;
  z += ri;
  z += kMask + 1 - rj;
  return uint16_t(z & kMask);
}

void run_gates(const RelationCircuit& c, Execution& ex,
               std::array<std::vector<uint16_t>, 3>& mul_shares) {
  for (int p = 0; p < 3; ++p) mul_shares[p].reserve(c.mul_count);
  for (size_t g = 0; g < c.gates.size(); ++g) {
    const Gate& gate = c.gates[g];
    uint32_t out = c.n_witness + uint32_t(g);
    switch (gate.op) {
      case Op::Const:
        ex.wires[0][out] = uint16_t(gate.c & kMask);
        ex.wires[1][out] = 0;
        ex.wires[2][out] = 0;
        break;
      case Op::Add:
        for (int p = 0; p < 3; ++p)
          ex.wires[p][out] = uint16_t((uint32_t(ex.wires[p][gate.a]) +
                                       ex.wires[p][gate.b]) & kMask);
        break;
      case Op::Sub:
        for (int p = 0; p < 3; ++p)
          ex.wires[p][out] = uint16_t((uint32_t(ex.wires[p][gate.a]) + kMask + 1 -
                                       ex.wires[p][gate.b]) & kMask);
        break;
      case Op::MulC:
        for (int p = 0; p < 3; ++p)
          ex.wires[p][out] = uint16_t((uint64_t(ex.wires[p][gate.a]) *
                                       (gate.c & kMask)) & kMask);
        break;
      case Op::Mul: {
        uint16_t r[3];
        for (int p = 0; p < 3; ++p) r[p] = uint16_t(ex.tapes[p].next_u64());
        for (int p = 0; p < 3; ++p) {
          int q = (p + 1) % 3;
          uint16_t z = mul_rule(ex.wires[p][gate.a], ex.wires[p][gate.b],
                                ex.wires[q][gate.a], ex.wires[q][gate.b], r[p], r[q]);
          ex.wires[p][out] = z;
          mul_shares[p].push_back(z);
        }
        break;
      }
    }
  }
}

commitment::CommitmentString commit_view(const commitment::CommitmentScheme& scheme,
                                         const std::vector<uint8_t>& tag,
                                         const PartyView& view, const BitVec& rand) {
  return commitment::commit(scheme, tag, digest_bits(serialize_view(view)), rand);
}

Repetition make_repetition(const RelationCircuit& c,
                           const std::vector<uint64_t>& witness, Rng& rng,
                           std::array<PartyView, 3>& views_out) {
  Execution ex(c, witness, rng);
  std::array<std::vector<uint16_t>, 3> mul_shares;
  run_gates(c, ex, mul_shares);

  Repetition rep;
  for (int p = 0; p < 3; ++p) {
    PartyView v;
    v.input_shares.assign(ex.wires[p].begin(), ex.wires[p].begin() + c.n_witness);
    v.tape_seed = ex.seeds[p];
    v.mul_shares = std::move(mul_shares[p]);
    for (const auto& [wire, expected] : c.outputs) {
      (void)expected;
      v.output_shares.push_back(ex.wires[p][wire]);
    }
    rep.published_outputs[p] = v.output_shares;
    views_out[p] = std::move(v);
  }
  return rep;
}

void commit_all(Repetition& rep, const std::array<PartyView, 3>& views,
                const commitment::CommitmentScheme& scheme,
                const std::vector<uint8_t>& tag, Rng& rng) {
  for (int p = 0; p < 3; ++p) {
    rep.commit_rand[p] = rng.bits(scheme.params.s_bits);
    rep.view_commits[p] = commit_view(scheme, tag, views[p], rep.commit_rand[p]);
  }
}

}  // namespace

std::vector<uint8_t> view_digest(const PartyView& view) {
  auto bits = digest_bits(serialize_view(view));
  return bits.bytes();
}

std::array<PartyView, 3> execute_views(const RelationCircuit& c,
                                       const std::vector<uint64_t>& witness, Rng& rng) {
  std::array<PartyView, 3> views;
  make_repetition(c, witness, rng, views);
  return views;
}

struct ProverState {
  const RelationCircuit* circuit;
  commitment::CommitmentScheme scheme;
  std::vector<uint8_t> tag;
  std::vector<Repetition> reps;
  std::vector<std::array<PartyView, 3>> views;
};

std::shared_ptr<ProverState> prove_start(const RelationCircuit& c,
                                         const std::vector<uint64_t>& witness,
                                         uint32_t reps,
                                         const commitment::CommitmentScheme& scheme,
                                         const std::vector<uint8_t>& tag, Rng& rng,
                                         std::vector<std::vector<uint8_t>>& commit_msg) {
  if (!satisfied(c, witness)) throw WitnessInvalid("witness does not satisfy relation");
  auto st = std::make_shared<ProverState>();
  st->circuit = &c;
  st->scheme = scheme;
  st->tag = tag;
  st->reps.resize(reps);
  st->views.resize(reps);
  commit_msg.clear();
  for (uint32_t i = 0; i < reps; ++i) {
    st->reps[i] = make_repetition(c, witness, rng, st->views[i]);
    commit_all(st->reps[i], st->views[i], scheme, tag, rng);
    for (int p = 0; p < 3; ++p)
      commit_msg.push_back(commitment::serialize_commitment(st->reps[i].view_commits[p]));
  }
  return st;
}

NpzkProofTranscript prove_finish(std::shared_ptr<ProverState> st,
                                 const std::vector<uint8_t>& challenges) {
  if (challenges.size() != st->reps.size())
    throw std::invalid_argument("challenge schedule length");
  NpzkProofTranscript proof;
  proof.reps = std::move(st->reps);
  for (size_t i = 0; i < proof.reps.size(); ++i) {
    uint8_t e = challenges[i] % 3;
    proof.reps[i].challenge = e;
    proof.reps[i].opened[0] = st->views[i][e];
    proof.reps[i].opened[1] = st->views[i][(e + 1) % 3];
  }
  return proof;
}

NpzkProofTranscript prove(const RelationCircuit& c,
                          const std::vector<uint64_t>& witness, uint32_t reps,
                          const commitment::CommitmentScheme& scheme,
                          const std::vector<uint8_t>& tag,
                          const std::vector<uint8_t>& challenges, Rng& rng) {
  std::vector<std::vector<uint8_t>> commit_msg;
  auto st = prove_start(c, witness, reps, scheme, tag, rng, commit_msg);
  return prove_finish(st, challenges);
}

NpzkProofTranscript prove_cheat(const RelationCircuit& c,
                                const std::vector<uint64_t>& witness, uint32_t reps,
                                const commitment::CommitmentScheme& scheme,
                                const std::vector<uint8_t>& tag,
                                const std::vector<uint8_t>& challenges, Rng& rng) {
  if (challenges.size() != reps)
    throw std::invalid_argument("challenge schedule length");
  // Gate order index of each output's defining Mul.
  std::vector<uint32_t> mul_index(c.gates.size(), 0);
  uint32_t mi = 0;
  for (size_t g = 0; g < c.gates.size(); ++g)
    if (c.gates[g].op == Op::Mul) mul_index[g] = mi++;

  NpzkProofTranscript proof;
  proof.reps.resize(reps);
  for (uint32_t i = 0; i < reps; ++i) {
    std::array<PartyView, 3> views;
    Repetition rep = make_repetition(c, witness, rng, views);
    // Patch one party so published outputs hit the expected values; the
    // patched gate recomputation fails only when that party is challenged.
    int p = int(rng.below(3));
    for (size_t k = 0; k < c.outputs.size(); ++k) {
      auto [wire, expected] = c.outputs[k];
      uint64_t sum = 0;
      for (int pp = 0; pp < 3; ++pp) sum += rep.published_outputs[pp][k];
      uint16_t delta = uint16_t((expected + 3 * (kMask + 1) - sum) & kMask);
      if (delta == 0) continue;
      uint32_t g = wire - c.n_witness;
      views[p].mul_shares[mul_index[g]] =
          uint16_t((views[p].mul_shares[mul_index[g]] + delta) & kMask);
      views[p].output_shares[k] = uint16_t((views[p].output_shares[k] + delta) & kMask);
      rep.published_outputs[p][k] = views[p].output_shares[k];
    }
    commit_all(rep, views, scheme, tag, rng);
    uint8_t e = challenges[i] % 3;
    rep.challenge = e;
    rep.opened[0] = views[e];
    rep.opened[1] = views[(e + 1) % 3];
    proof.reps[i] = std::move(rep);
  }
  return proof;
}

bool verify_repetition(const RelationCircuit& c, const Repetition& rep,
                       const commitment::CommitmentScheme& scheme,
                       const std::vector<uint8_t>& tag) {
  int e = rep.challenge % 3;
  const PartyView& ve = rep.opened[0];
  const PartyView& vn = rep.opened[1];
  if (ve.input_shares.size() != c.n_witness || vn.input_shares.size() != c.n_witness)
    return false;
  if (ve.mul_shares.size() != c.mul_count || vn.mul_shares.size() != c.mul_count)
    return false;
  if (ve.output_shares.size() != c.outputs.size() ||
      vn.output_shares.size() != c.outputs.size())
    return false;

  // Commitments bind the opened views.
  if (!commitment::verify(scheme, tag, rep.view_commits[e],
                          digest_bits(serialize_view(ve)), rep.commit_rand[e]))
    return false;
  if (!commitment::verify(scheme, tag, rep.view_commits[(e + 1) % 3],
                          digest_bits(serialize_view(vn)), rep.commit_rand[(e + 1) % 3]))
    return false;

  // Party e+1 is replayed from its recorded shares; party e is recomputed by
  // the multiplication rule and must match its recorded shares.
  auto rebuild = [&](const PartyView& v, int party, const std::vector<uint16_t>* other,
                     const PartyView* other_view, bool check_rule,
                     bool& ok) -> std::vector<uint16_t> {
    std::vector<uint16_t> w(c.wire_count(), 0);
    for (uint32_t i = 0; i < c.n_witness; ++i) w[i] = v.input_shares[i];
    Rng tape_self(v.tape_seed);
    Rng tape_other(other_view ? other_view->tape_seed : 0);
    size_t mul_i = 0;
    ok = true;
    for (size_t g = 0; g < c.gates.size(); ++g) {
      const Gate& gate = c.gates[g];
      uint32_t out = c.n_witness + uint32_t(g);
      switch (gate.op) {
        case Op::Const: w[out] = (party == 0) ? uint16_t(gate.c & kMask) : 0; break;
        case Op::Add:
          w[out] = uint16_t((uint32_t(w[gate.a]) + w[gate.b]) & kMask);
          break;
        case Op::Sub:
          w[out] = uint16_t((uint32_t(w[gate.a]) + kMask + 1 - w[gate.b]) & kMask);
          break;
        case Op::MulC:
          w[out] = uint16_t((uint64_t(w[gate.a]) * (gate.c & kMask)) & kMask);
          break;
        case Op::Mul: {
          uint16_t r_self = uint16_t(tape_self.next_u64());
          if (check_rule) {
            uint16_t r_other = uint16_t(tape_other.next_u64());
            uint16_t z = mul_rule(w[gate.a], w[gate.b], (*other)[gate.a],
                                  (*other)[gate.b], r_self, r_other);
            if (z != v.mul_shares[mul_i]) ok = false;
          }
          w[out] = v.mul_shares[mul_i];
          ++mul_i;
          break;
        }
      }
    }
    return w;
  };

  bool ok_n = true;
  std::vector<uint16_t> wn2 =
      rebuild(vn, (e + 1) % 3, nullptr, nullptr, false, ok_n);
  bool ok_e = true;
  std::vector<uint16_t> we = rebuild(ve, e, &wn2, &vn, true, ok_e);
  if (!ok_e) return false;

  // Output shares of the two opened parties match the published values and
  // the published triples sum to the expected outputs.
  for (size_t k = 0; k < c.outputs.size(); ++k) {
    auto [wire, expected] = c.outputs[k];
    if (we[wire] != ve.output_shares[k]) return false;
    if (wn2[wire] != vn.output_shares[k]) return false;
    if (rep.published_outputs[e][k] != ve.output_shares[k]) return false;
    if (rep.published_outputs[(e + 1) % 3][k] != vn.output_shares[k]) return false;
    uint64_t sum = 0;
    for (int p = 0; p < 3; ++p) sum += rep.published_outputs[p][k];
    if ((sum & kMask) != expected) return false;
  }
  return true;
}

bool verify(const RelationCircuit& c, const NpzkProofTranscript& proof,
            const commitment::CommitmentScheme& scheme,
            const std::vector<uint8_t>& tag) {
  if (proof.debug_backend)
    return satisfied(c, proof.debug_witness);
  if (proof.reps.empty()) return false;
  for (const auto& rep : proof.reps)
    if (!verify_repetition(c, rep, scheme, tag)) return false;
  return true;
}

NpzkProofTranscript simulate_transcript(const RelationCircuit& c, uint32_t reps,
                                        const commitment::CommitmentScheme& scheme,
                                        const std::vector<uint8_t>& tag,
                                        const std::vector<uint8_t>& challenges,
                                        Rng& rng) {
  if (challenges.size() != reps)
    throw std::invalid_argument("challenge schedule length");
  NpzkProofTranscript proof;
  proof.reps.resize(reps);
  for (uint32_t i = 0; i < reps; ++i) {
    int e = challenges[i] % 3;
    int n = (e + 1) % 3;
    Repetition rep;
    rep.challenge = uint8_t(e);

    PartyView vn;
    vn.tape_seed = rng.next_u64();
    vn.input_shares.resize(c.n_witness);
    for (auto& x : vn.input_shares) x = uint16_t(rng.next_u64());
    vn.mul_shares.resize(c.mul_count);
    for (auto& x : vn.mul_shares) x = uint16_t(rng.next_u64());

    PartyView ve;
    ve.tape_seed = rng.next_u64();
    ve.input_shares.resize(c.n_witness);
    for (auto& x : ve.input_shares) x = uint16_t(rng.next_u64());

    // Party e's mul shares follow the honest rule against neighbor n.
    std::vector<uint16_t> wn(c.wire_count(), 0), we(c.wire_count(), 0);
    for (uint32_t w = 0; w < c.n_witness; ++w) {
      wn[w] = vn.input_shares[w];
      we[w] = ve.input_shares[w];
    }
    Rng tape_e(ve.tape_seed), tape_n(vn.tape_seed);
    size_t mul_i = 0;
    for (size_t g = 0; g < c.gates.size(); ++g) {
      const Gate& gate = c.gates[g];
      uint32_t out = c.n_witness + uint32_t(g);
      switch (gate.op) {
        case Op::Const:
          we[out] = (e == 0) ? uint16_t(gate.c & kMask) : 0;
          wn[out] = (n == 0) ? uint16_t(gate.c & kMask) : 0;
          break;
        case Op::Add:
          we[out] = uint16_t((uint32_t(we[gate.a]) + we[gate.b]) & kMask);
          wn[out] = uint16_t((uint32_t(wn[gate.a]) + wn[gate.b]) & kMask);
          break;
        case Op::Sub:
          we[out] = uint16_t((uint32_t(we[gate.a]) + kMask + 1 - we[gate.b]) & kMask);
          wn[out] = uint16_t((uint32_t(wn[gate.a]) + kMask + 1 - wn[gate.b]) & kMask);
          break;
        case Op::MulC:
          we[out] = uint16_t((uint64_t(we[gate.a]) * (gate.c & kMask)) & kMask);
          wn[out] = uint16_t((uint64_t(wn[gate.a]) * (gate.c & kMask)) & kMask);
          break;
        case Op::Mul: {
          uint16_t r_e = uint16_t(tape_e.next_u64());
          uint16_t r_n = uint16_t(tape_n.next_u64());
          uint16_t z = mul_rule(we[gate.a], we[gate.b], wn[gate.a], wn[gate.b], r_e, r_n);
          ve.mul_shares.push_back(z);
          we[out] = z;
          wn[out] = vn.mul_shares[mul_i];
          ++mul_i;
          break;
        }
      }
    }
    for (const auto& [wire, expected] : c.outputs) {
      (void)expected;
      ve.output_shares.push_back(we[wire]);
      vn.output_shares.push_back(wn[wire]);
    }
    rep.published_outputs[e] = ve.output_shares;
    rep.published_outputs[n] = vn.output_shares;
    auto& hidden = rep.published_outputs[(e + 2) % 3];
    hidden.resize(c.outputs.size());
    for (size_t k = 0; k < c.outputs.size(); ++k) {
      uint64_t expected = c.outputs[k].second;
      hidden[k] = uint16_t((expected + 2 * (kMask + 1) - ve.output_shares[k] -
                            vn.output_shares[k]) & kMask);
    }

    rep.commit_rand[e] = rng.bits(scheme.params.s_bits);
    rep.view_commits[e] = commit_view(scheme, tag, ve, rep.commit_rand[e]);
    rep.commit_rand[n] = rng.bits(scheme.params.s_bits);
    rep.view_commits[n] = commit_view(scheme, tag, vn, rep.commit_rand[n]);
    // The never-opened third commitment hides a dummy digest.
    rep.commit_rand[(e + 2) % 3] = rng.bits(scheme.params.s_bits);
    BitVec dummy(256);
    for (size_t bb = 0; bb < 256; ++bb) dummy.set(bb, rng.next_bit());
    rep.view_commits[(e + 2) % 3] =
        commitment::commit(scheme, tag, dummy, rep.commit_rand[(e + 2) % 3]);

    rep.opened[0] = std::move(ve);
    rep.opened[1] = std::move(vn);
    proof.reps[i] = std::move(rep);
  }
  return proof;
}

NpzkProofTranscript prove_debug(const RelationCircuit& c,
                                const std::vector<uint64_t>& witness) {
  if (!satisfied(c, witness)) throw WitnessInvalid("witness does not satisfy relation");
  NpzkProofTranscript proof;
  proof.debug_backend = true;
  proof.debug_witness = witness;
  return proof;
}

std::vector<uint8_t> serialize_transcript(const NpzkProofTranscript& proof) {
  std::vector<uint8_t> out;
  out.push_back(proof.debug_backend ? 1 : 0);
  if (proof.debug_backend) {
    put_u32(out, uint32_t(proof.debug_witness.size()));
    for (auto v : proof.debug_witness) put_u16(out, uint16_t(v));
    return out;
  }
  put_u32(out, uint32_t(proof.reps.size()));
  auto put_bitvec = [&](const BitVec& v) {
    put_u32(out, uint32_t(v.size()));
    for (auto byte : v.bytes()) out.push_back(byte);
  };
  auto put_u16vec = [&](const std::vector<uint16_t>& v) {
    put_u32(out, uint32_t(v.size()));
    for (auto x : v) put_u16(out, x);
  };
  for (const auto& rep : proof.reps) {
    for (int p = 0; p < 3; ++p) {
      put_u16vec(rep.view_commits[p]);
      put_bitvec(rep.commit_rand[p]);
    }
    out.push_back(rep.challenge);
    for (int v = 0; v < 2; ++v) {
      auto bytes = serialize_view(rep.opened[v]);
      put_u32(out, uint32_t(bytes.size()));
      out.insert(out.end(), bytes.begin(), bytes.end());
    }
    for (int p = 0; p < 3; ++p) put_u16vec(rep.published_outputs[p]);
  }
  return out;
}

NpzkProofTranscript deserialize_transcript(const std::vector<uint8_t>& bytes) {
  Reader r{bytes};
  NpzkProofTranscript proof;
  proof.debug_backend = r.u8() != 0;
  if (proof.debug_backend) {
    proof.debug_witness.resize(r.u32());
    for (auto& v : proof.debug_witness) v = r.u16();
    return proof;
  }
  proof.reps.resize(r.u32());
  auto get_bitvec = [&]() {
    uint32_t n = r.u32();
    std::vector<uint8_t> data((n + 7) / 8);
    for (auto& b : data) b = r.u8();
    return BitVec(std::move(data), n);
  };
  auto get_u16vec = [&]() {
    std::vector<uint16_t> v(r.u32());
    for (auto& x : v) x = r.u16();
    return v;
  };
  for (auto& rep : proof.reps) {
    for (int p = 0; p < 3; ++p) {
      rep.view_commits[p] = get_u16vec();
      rep.commit_rand[p] = get_bitvec();
    }
    rep.challenge = r.u8();
    for (int v = 0; v < 2; ++v) {
      uint32_t len = r.u32();
      (void)len;
      rep.opened[v] = deserialize_view(r);
    }
    for (int p = 0; p < 3; ++p) rep.published_outputs[p] = get_u16vec();
  }
  return proof;
}

}  // namespace cvzk::npzk

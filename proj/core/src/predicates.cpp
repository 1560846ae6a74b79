#include "cvzk/protocol.hpp"

namespace cvzk::proto {

BitVec coin_result(const BitVec& r_v, const BitVec& r_p) {
  if (r_v.size() != r_p.size())
    throw std::invalid_argument("coin_result: length mismatch");
  return r_v ^ r_p;
}

std::vector<npzk::MeasuredBlock> measured_blocks(const xz::XZHamiltonianInstance& H,
                                                 const BitVec& r, uint64_t m,
                                                 uint32_t r_bits) {
  auto indices = xz::sample_term_indices(r, H, m, r_bits);
  std::vector<npzk::MeasuredBlock> blocks;
  for (uint64_t j = 0; j < m; ++j) {
    const auto& term = H.terms()[indices[j]];
    for (const auto& p : term.supports) {
      npzk::MeasuredBlock b;
      b.block_index = uint32_t(j) * H.n() + p.qubit;
      b.gate = (p.op == xz::Pauli::X) ? BlockGate::H : BlockGate::I;
      blocks.push_back(b);
    }
  }
  return blocks;
}

std::vector<BlockGate> compute_U_r(const xz::XZHamiltonianInstance& H, const BitVec& r,
                                   uint64_t m, uint32_t r_bits) {
  std::vector<BlockGate> gates(size_t(m) * H.n(), BlockGate::I);
  for (const auto& b : measured_blocks(H, r, m, r_bits))
    if (b.gate == BlockGate::H) gates[b.block_index] = BlockGate::H;
  return gates;
}

BitVec verifier_choose_h(const BitVec& r, const SessionConfig& config) {
  uint32_t N = config.N();
  BitVec h(config.total_qubits());
  for (const auto& b : measured_blocks(config.instance, r, config.m, config.r_bits)) {
    if (b.gate != BlockGate::H) continue;
    size_t base = size_t(b.block_index) * 2 * N;
    for (uint32_t j = 0; j < 2 * N; ++j) h.set(base + j, true);
  }
  return h;
}

std::pair<BitVec, BitVec> conjugate_pauli_keys(const BitVec& a, const BitVec& b,
                                               const std::vector<BlockGate>& gates,
                                               uint32_t N) {
  if (a.size() != b.size() || a.size() != gates.size() * size_t(2) * N)
    throw std::invalid_argument("conjugate_pauli_keys: length mismatch");
  BitVec c = a, d = b;
  for (size_t blk = 0; blk < gates.size(); ++blk) {
    if (gates[blk] != BlockGate::H) continue;
    size_t base = blk * 2 * N;
    for (uint32_t j = 0; j < 2 * N; ++j) {
      c.set(base + j, b.get(base + j));
      d.set(base + j, a.get(base + j));
    }
  }
  return {c, d};
}

BitVec extract_u(const BitVec& outcomes, const std::vector<npzk::MeasuredBlock>& blocks,
                 uint32_t N) {
  BitVec u(blocks.size() * size_t(2) * N);
  for (size_t i = 0; i < blocks.size(); ++i) {
    size_t base = size_t(blocks[i].block_index) * 2 * N;
    for (uint32_t j = 0; j < 2 * N; ++j) u.set(i * 2 * N + j, outcomes.get(base + j));
  }
  return u;
}

uint64_t count_threshold(const xz::XZHamiltonianInstance& H, uint64_t m) {
  for (uint64_t c = 0; c <= m; ++c)
    if (xz::accept_decision(c, m, H.a(), H.b(), H.weight_sum())) return c;
  return m + 1;
}

bool predicate_R_r(const std::vector<QubitLabel>& traps,
                   const std::vector<uint32_t>& perm, const BitVec& u, const BitVec& r,
                   const SessionConfig& config, const steane::CodewordSets& sets,
                   PredicateFail* why) {
  auto set_why = [&](PredicateFail f) {
    if (why) *why = f;
  };
  set_why(PredicateFail::None);
  uint32_t N = config.N();
  auto blocks = measured_blocks(config.instance, r, config.m, config.r_bits);
  if (u.size() != blocks.size() * size_t(2) * N) {
    set_why(PredicateFail::Length);
    return false;
  }
  auto indices = xz::sample_term_indices(r, config.instance, config.m, config.r_bits);

  // Split and decode every measured block.
  std::vector<bool> v_bits(blocks.size());
  for (size_t i = 0; i < blocks.size(); ++i) {
    auto [q, z] = steane::invert_block_split(u.slice(i * 2 * N, 2 * N), perm);
    auto v = steane::codeword_decode(q, sets);
    if (!v.has_value()) {
      set_why(PredicateFail::Codeword);
      return false;
    }
    v_bits[i] = *v;
  }

  // COUNT over the per-term logical products.
  uint64_t count = 0;
  size_t pos = 0;
  for (uint64_t j = 0; j < config.m; ++j) {
    const auto& term = config.instance.terms()[indices[j]];
    bool outcome_bit = false;
    for (size_t s = 0; s < term.supports.size(); ++s) outcome_bit ^= v_bits[pos + s];
    bool target = term.sign() > 0;  // -sign(d) = -1 <=> outcome bit 1
    if (outcome_bit == target) ++count;
    pos += term.supports.size();
  }
  if (!xz::accept_decision(count, config.m, config.instance.a(), config.instance.b(),
                           config.instance.weight_sum())) {
    set_why(PredicateFail::Count);
    return false;
  }

  // Trap support condition per block.
  for (size_t i = 0; i < blocks.size(); ++i) {
    auto [q, z] = steane::invert_block_split(u.slice(i * 2 * N, 2 * N), perm);
    std::vector<QubitLabel> block_traps(
        traps.begin() + size_t(blocks[i].block_index) * N,
        traps.begin() + size_t(blocks[i].block_index + 1) * N);
    if (!steane::trap_check(z, block_traps, blocks[i].gate)) {
      set_why(PredicateFail::Trap);
      return false;
    }
  }
  return true;
}

bool predicate_Q(const std::vector<QubitLabel>& traps, const std::vector<uint32_t>& perm,
                 const BitVec& a, const BitVec& b, const BitVec& r, const BitVec& u,
                 const SessionConfig& config, const steane::CodewordSets& sets,
                 PredicateFail* why) {
  uint32_t N = config.N();
  auto gates = compute_U_r(config.instance, r, config.m, config.r_bits);
  auto [c, d] = conjugate_pauli_keys(a, b, gates, N);
  auto blocks = measured_blocks(config.instance, r, config.m, config.r_bits);
  if (u.size() != blocks.size() * size_t(2) * N) {
    if (why) *why = PredicateFail::Length;
    return false;
  }
  BitVec u_unpadded = u;
  for (size_t i = 0; i < blocks.size(); ++i) {
    size_t base = size_t(blocks[i].block_index) * 2 * N;
    for (uint32_t j = 0; j < 2 * N; ++j)
      if (c.get(base + j)) u_unpadded.flip(i * 2 * N + j);
  }
  return predicate_R_r(traps, perm, u_unpadded, r, config, sets, why);
}

npzk::RelationSpec build_relation_spec(const SessionConfig& config,
                                       const steane::CodewordSets& sets,
                                       const commitment::CommitmentScheme& scheme,
                                       const std::vector<uint8_t>& tag,
                                       const commitment::CommitmentString& z,
                                       const BitVec& r, const BitVec& u) {
  npzk::RelationSpec spec;
  spec.scheme = scheme;
  spec.tag = tag;
  spec.z = z;
  spec.n_logical = config.n_logical();
  spec.N = config.N();
  spec.measured = measured_blocks(config.instance, r, config.m, config.r_bits);
  auto indices = xz::sample_term_indices(r, config.instance, config.m, config.r_bits);
  uint32_t pos = 0;
  for (uint64_t j = 0; j < config.m; ++j) {
    const auto& term = config.instance.terms()[indices[j]];
    npzk::TermCheck tc;
    for (size_t s = 0; s < term.supports.size(); ++s) tc.positions.push_back(pos + s);
    tc.target = term.sign() > 0;
    spec.terms.push_back(std::move(tc));
    pos += uint32_t(term.supports.size());
  }
  spec.u = u;
  spec.m = config.m;
  spec.count_min = count_threshold(config.instance, config.m);
  spec.d0 = sets.d0;
  spec.d1 = sets.d1;
  return spec;
}

}  // namespace cvzk::proto

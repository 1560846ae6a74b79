#include <stdexcept>

#include "cvzk/npzk.hpp"

namespace cvzk::npzk {

namespace {

/// Incremental circuit builder with boolean helpers over 0/1 wires.
struct Builder {
  RelationCircuit c;
  uint32_t one = 0;  // wire pinned to constant 1

  explicit Builder(uint32_t n_witness) {
    c.n_witness = n_witness;
    one = constant(1);
  }

  uint32_t emit(Gate g) {
    if (g.op == Op::Mul) ++c.mul_count;
    c.gates.push_back(g);
    return c.n_witness + uint32_t(c.gates.size()) - 1;
  }

  uint32_t constant(uint64_t v) { return emit({Op::Const, 0, 0, v}); }
  uint32_t add(uint32_t a, uint32_t b) { return emit({Op::Add, a, b, 0}); }
  uint32_t sub(uint32_t a, uint32_t b) { return emit({Op::Sub, a, b, 0}); }
  uint32_t mulc(uint32_t a, uint64_t k) { return emit({Op::MulC, a, 0, k}); }
  uint32_t mul(uint32_t a, uint32_t b) { return emit({Op::Mul, a, b, 0}); }

  uint32_t not_(uint32_t a) { return sub(one, a); }
  uint32_t xor_(uint32_t a, uint32_t b) {
    // a + b - 2ab
    uint32_t ab = mul(a, b);
    return sub(add(a, b), mulc(ab, 2));
  }
  uint32_t xor_const(uint32_t a, bool k) { return k ? not_(a) : a; }
  uint32_t and_(uint32_t a, uint32_t b) { return mul(a, b); }

  /// Declared output: route through a final Mul so every output has a
  /// one-gate patch point (used by the best-cheat fixture).
  void output(uint32_t wire, uint64_t expected) {
    uint32_t w = mul(wire, one);
    c.outputs.push_back({w, expected & (c.q - 1)});
  }
};

}  // namespace

BitVec encode_key_message(uint32_t two_n, const std::vector<uint32_t>& perm,
                          const BitVec& a, const BitVec& b) {
  BitVec msg(size_t(two_n) * two_n + a.size() + b.size());
  for (uint32_t p = 0; p < two_n; ++p) msg.set(size_t(p) * two_n + perm[p], true);
  size_t off = size_t(two_n) * two_n;
  for (size_t i = 0; i < a.size(); ++i) msg.set(off + i, a.get(i));
  off += a.size();
  for (size_t i = 0; i < b.size(); ++i) msg.set(off + i, b.get(i));
  return msg;
}

RelationCircuit build_relation_circuit(const RelationSpec& spec) {
  const uint32_t N = spec.N;
  const uint32_t two_n = 2 * N;
  const uint32_t pad_len = 2 * spec.n_logical * N;
  if (spec.u.size() != size_t(spec.measured.size()) * two_n)
    throw ParamsUnsupported("u length does not match measured blocks");

  uint32_t n_count_bits = 0;
  while ((uint64_t(1) << n_count_bits) < spec.m + 1) ++n_count_bits;

  const uint32_t sp_bits = spec.scheme.params.s_bits;
  const uint32_t t_bits = spec.n_logical * N;
  const uint32_t perm_bits = two_n * two_n;

  uint32_t n_witness = sp_bits + t_bits + perm_bits + 2 * pad_len + n_count_bits;
  Builder b(n_witness);
  RelationCircuit& c = b.c;
  c.off_sp = 0;
  c.off_t = sp_bits;
  c.off_perm = c.off_t + t_bits;
  c.off_a = c.off_perm + perm_bits;
  c.off_b = c.off_a + pad_len;
  c.off_count_bits = c.off_b + pad_len;
  c.n_count_bits = n_count_bits;

  // Bitness of every witness wire: x(x-1) = 0.
  for (uint32_t w = 0; w < n_witness; ++w)
    b.output(b.mul(w, b.sub(w, b.one)), 0);

  // Permutation validity: every row and column of the one-hot matrix sums
  // to exactly 1 (sums stay below q, so this pins a permutation).
  for (uint32_t r = 0; r < two_n; ++r) {
    uint32_t row = b.constant(0), col = b.constant(0);
    for (uint32_t j = 0; j < two_n; ++j) {
      row = b.add(row, c.off_perm + r * two_n + j);
      col = b.add(col, c.off_perm + j * two_n + r);
    }
    b.output(b.sub(row, b.one), 0);
    b.output(b.sub(col, b.one), 0);
  }

  // Commitment consistency: recompute each packed row of
  // commit((pi, a, b), s_p) and pin the residual against the public z.
  {
    const auto& cp = spec.scheme.params;
    uint32_t msg_bits = perm_bits + 2 * pad_len;
    uint32_t rows = cp.rows_for(msg_bits);
    if (spec.z.size() != rows) throw ParamsUnsupported("z row count mismatch");
    auto tags = commitment::tag_values(spec.scheme, spec.tag, rows);
    for (uint32_t r = 0; r < rows; ++r) {
      auto coeffs = commitment::row_coefficients(spec.scheme, r);
      uint32_t acc = b.constant(tags[r]);
      for (uint32_t j = 0; j < cp.s_bits; ++j)
        acc = b.add(acc, b.mulc(c.off_sp + j, coeffs[j]));
      for (uint32_t t = 0; t < cp.msg_bits_per_coord; ++t) {
        uint64_t idx = uint64_t(r) * cp.msg_bits_per_coord + t;
        if (idx >= msg_bits) break;
        // message bit wires follow the witness layout: pi, a, b
        acc = b.add(acc, b.mulc(c.off_perm + uint32_t(idx), c.q >> (t + 1)));
      }
      b.output(b.sub(acc, b.constant(spec.z[r])), 0);
    }
  }

  // Per measured block: unpermute u (+) c, decode the codeword half, check
  // traps. c is the X-pad conjugated through the block gate: a for I blocks,
  // b for H blocks.
  std::vector<uint32_t> v_bits(spec.measured.size());
  uint32_t invalid_total = b.constant(0);
  uint32_t trap_total = b.constant(0);
  for (size_t mb = 0; mb < spec.measured.size(); ++mb) {
    const auto& blk = spec.measured[mb];
    uint32_t pad_off = (blk.gate == BlockGate::H) ? c.off_b : c.off_a;
    uint32_t base = blk.block_index * two_n;

    // u'[j] = u[j] xor c[j], linear in the witness pad bit.
    std::vector<uint32_t> uprime(two_n);
    for (uint32_t j = 0; j < two_n; ++j) {
      bool upub = spec.u.get(mb * two_n + j);
      uprime[j] = b.xor_const(pad_off + base + j, upub);
    }
    // (q||z)[p] = sum_j onehot[p][j] * u'[j]
    std::vector<uint32_t> qz(two_n);
    for (uint32_t p = 0; p < two_n; ++p) {
      uint32_t acc = b.constant(0);
      for (uint32_t j = 0; j < two_n; ++j)
        acc = b.add(acc, b.mul(c.off_perm + p * two_n + j, uprime[j]));
      qz[p] = acc;
    }

    // Codeword membership: disjoint equality indicators summed.
    uint32_t valid = b.constant(0), vbit = b.constant(0);
    for (const auto* set : {&spec.d0, &spec.d1}) {
      for (const auto& w : *set) {
        uint32_t eq = b.one;
        for (uint32_t j = 0; j < N; ++j) {
          uint32_t lit = w.get(j) ? qz[j] : b.not_(qz[j]);
          eq = (j == 0) ? lit : b.mul(eq, lit);
        }
        valid = b.add(valid, eq);
        if (set == &spec.d1) vbit = b.add(vbit, eq);
      }
    }
    v_bits[mb] = vbit;
    invalid_total = b.add(invalid_total, b.sub(b.one, valid));

    // Trap support condition on the z half.
    for (uint32_t j = 0; j < N; ++j) {
      uint32_t t_wire = c.off_t + blk.block_index * N + j;
      uint32_t viol = (blk.gate == BlockGate::I) ? b.mul(b.not_(t_wire), qz[N + j])
                                                 : b.mul(t_wire, qz[N + j]);
      trap_total = b.add(trap_total, viol);
    }
  }
  b.output(invalid_total, 0);
  b.output(trap_total, 0);

  // COUNT = number of terms whose decoded XOR equals the target.
  uint32_t count = b.constant(0);
  for (const auto& term : spec.terms) {
    uint32_t lambda;
    if (term.positions.size() == 1) {
      lambda = v_bits[term.positions[0]];
    } else {
      lambda = b.xor_(v_bits[term.positions[0]], v_bits[term.positions[1]]);
    }
    uint32_t pass = b.xor_const(lambda, !term.target);
    count = b.add(count, pass);
  }
  c.count_wire = count;

  // Witnessed count bits must recompose to COUNT and majorize count_min.
  uint32_t recomposed = b.constant(0);
  for (uint32_t i = 0; i < n_count_bits; ++i)
    recomposed = b.add(recomposed, b.mulc(c.off_count_bits + i, uint64_t(1) << i));
  b.output(b.sub(recomposed, count), 0);

  if (spec.count_min > spec.m) {
    // Unsatisfiable threshold: statement is false by construction.
    b.output(b.one, 0);
  } else if (spec.count_min > 0) {
    // MSB-first comparator: ge = greater | equal.
    uint32_t greater = b.constant(0);
    uint32_t equal = b.one;
    for (int i = int(n_count_bits) - 1; i >= 0; --i) {
      bool k = (spec.count_min >> i) & 1;
      uint32_t bit = c.off_count_bits + uint32_t(i);
      if (!k) greater = b.add(greater, b.mul(equal, bit));
      equal = b.mul(equal, b.xor_const(bit, !k));
    }
    b.output(b.sub(b.add(greater, equal), b.one), 0);
  }
  return c;
}

std::vector<uint64_t> eval_clear(const RelationCircuit& c,
                                 const std::vector<uint64_t>& witness) {
  if (witness.size() != c.n_witness) throw WitnessInvalid("witness length mismatch");
  std::vector<uint64_t> w(c.wire_count());
  uint64_t mask = c.q - 1;
  for (uint32_t i = 0; i < c.n_witness; ++i) w[i] = witness[i] & mask;
  for (size_t g = 0; g < c.gates.size(); ++g) {
    const Gate& gate = c.gates[g];
    uint64_t& out = w[c.n_witness + g];
    switch (gate.op) {
      case Op::Const: out = gate.c & mask; break;
      case Op::Add: out = (w[gate.a] + w[gate.b]) & mask; break;
      case Op::Sub: out = (w[gate.a] + c.q - w[gate.b]) & mask; break;
      case Op::MulC: out = (w[gate.a] * (gate.c & mask)) & mask; break;
      case Op::Mul: out = (w[gate.a] * w[gate.b]) & mask; break;
    }
  }
  return w;
}

bool satisfied(const RelationCircuit& c, const std::vector<uint64_t>& witness) {
  auto w = eval_clear(c, witness);
  for (const auto& [wire, expected] : c.outputs)
    if (w[wire] != expected) return false;
  return true;
}

std::vector<uint64_t> assemble_witness(const RelationCircuit& c,
                                       const RelationSpec& spec, const BitVec& s_p,
                                       const std::vector<QubitLabel>& traps,
                                       const std::vector<uint32_t>& perm,
                                       const BitVec& a, const BitVec& b) {
  std::vector<uint64_t> w(c.n_witness, 0);
  uint32_t two_n = 2 * spec.N;
  if (s_p.size() != spec.scheme.params.s_bits || perm.size() != two_n)
    throw WitnessInvalid("witness component sizes");
  for (size_t i = 0; i < s_p.size(); ++i) w[c.off_sp + i] = s_p.get(i);
  for (size_t i = 0; i < traps.size(); ++i)
    w[c.off_t + i] = (traps[i] == QubitLabel::Plus) ? 1 : 0;
  for (uint32_t p = 0; p < two_n; ++p) w[c.off_perm + p * two_n + perm[p]] = 1;
  for (size_t i = 0; i < a.size(); ++i) w[c.off_a + i] = a.get(i);
  for (size_t i = 0; i < b.size(); ++i) w[c.off_b + i] = b.get(i);
  // Two-pass: read COUNT from a clear evaluation, then witness its bits.
  auto table = eval_clear(c, w);
  uint64_t count = table[c.count_wire];
  for (uint32_t i = 0; i < c.n_count_bits; ++i)
    w[c.off_count_bits + i] = (count >> i) & 1;
  return w;
}

}  // namespace cvzk::npzk

#include "cvzk/etcff.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace cvzk::etcff {

int64_t centered(uint64_t x, uint64_t q) {
  return x >= q / 2 ? int64_t(x) - int64_t(q) : int64_t(x);
}

void LweParams::validate() const {
  if (q == 0 || (q & (q - 1)) != 0 || q != (uint64_t(1) << k))
    throw std::invalid_argument("q must equal 2^k");
  if (w_gadget != n_lwe * k || m_lwe != m_bar + w_gadget || w_pre != n_lwe * k)
    throw std::invalid_argument("inconsistent dimensions");
  if (b_f < 1) throw std::invalid_argument("b_f must be >= 1");
  if (e0_max < bf_ratio * b_f) throw std::invalid_argument("require e0_max >= bf_ratio*b_f");
  if (!(e0_max < b_g && b_g <= b_invert)) throw std::invalid_argument("need e0_max < b_g <= b_invert");
  if (!(b_g - e0_max > e0_max)) throw std::invalid_argument("need b_g - e0_max > e0_max");
  if (!(int64_t(q) > 4 * b_invert)) throw std::invalid_argument("need q > 4*b_invert");
  if (int64_t(q) / 4 - 1 < b_invert * amp_cap())
    throw std::invalid_argument("inversion radius not certified by amp_cap");
}

namespace {

LweParams finish(LweParams p) {
  p.q = uint64_t(1) << p.k;
  p.w_gadget = p.n_lwe * p.k;
  p.m_lwe = p.m_bar + p.w_gadget;
  p.w_pre = p.n_lwe * p.k;
  p.b_invert = (int64_t(p.q) / 4 - 1) / p.amp_cap();
  p.validate();
  return p;
}

}  // namespace

LweParams LweParams::micro() {
  LweParams p;
  p.n_lwe = 1;
  p.m_bar = 3;
  p.k = 11;  // q = 2048
  p.sigma_r = 1;
  p.b_f = 1;
  p.e0_max = 16;
  p.b_g = 33;
  p.sigma_e0 = 8.0;
  return finish(p);
}

LweParams LweParams::demo() {
  LweParams p;
  p.n_lwe = 2;
  p.m_bar = 4;
  p.k = 14;  // q = 16384
  p.sigma_r = 1;
  p.b_f = 4;
  p.e0_max = 64;
  p.b_g = 129;
  p.sigma_e0 = 32.0;
  return finish(p);
}

const std::vector<double>& LweParams::noise_cdf() const {
  if (noise_cdf_.empty()) {
    size_t width = size_t(2 * e0_max + 1);
    noise_cdf_.resize(width);
    double acc = 0;
    for (size_t i = 0; i < width; ++i) {
      double z = double(int64_t(i) - e0_max);
      acc += std::exp(-M_PI * z * z / (sigma_e0 * sigma_e0));
      noise_cdf_[i] = acc;
    }
    for (auto& v : noise_cdf_) v /= acc;
  }
  return noise_cdf_;
}

namespace {

uint64_t mod_q(uint64_t x, uint64_t q) { return x & (q - 1); }

uint64_t mod_q_signed(int64_t x, uint64_t q) {
  int64_t r = x % int64_t(q);
  if (r < 0) r += int64_t(q);
  return uint64_t(r);
}

// Gadget value at column j of secret coordinate d: row entry 2^{j}.
// G is n_lwe x w_gadget with G[d, d*k + j] = 2^j.

ModVec mat_t_vec(const ModMatrix& A, const ModVec& s, uint64_t q) {
  // A^T s for wide A (n x m): output m-dim.
  ModVec out(A.cols, 0);
  for (uint32_t c = 0; c < A.cols; ++c) {
    uint64_t acc = 0;
    for (uint32_t r = 0; r < A.rows; ++r) acc += mod_q(A.at(r, c) * s[r], q);
    out[c] = mod_q(acc, q);
  }
  return out;
}

}  // namespace

std::pair<ModMatrix, TrapMatrix> gen_trap(const LweParams& p, Rng& rng) {
  ModMatrix A;
  A.rows = p.n_lwe;
  A.cols = p.m_lwe;
  A.data.assign(size_t(A.rows) * A.cols, 0);

  TrapMatrix R;
  R.rows = p.m_bar;
  R.cols = p.w_gadget;
  R.data.resize(size_t(R.rows) * R.cols);
  for (auto& v : R.data)
    v = int32_t(rng.below(uint64_t(2 * p.sigma_r + 1))) - p.sigma_r;

  // Abar uniform, then A = [Abar | G - Abar R].
  for (uint32_t r = 0; r < p.n_lwe; ++r)
    for (uint32_t c = 0; c < p.m_bar; ++c) A.at(r, c) = rng.below(p.q);
  for (uint32_t r = 0; r < p.n_lwe; ++r) {
    for (uint32_t j = 0; j < p.w_gadget; ++j) {
      int64_t acc = 0;
      for (uint32_t i = 0; i < p.m_bar; ++i)
        acc += int64_t(A.at(r, i)) * R.at(i, j);
      uint64_t g = (j / p.k == r) ? (uint64_t(1) << (j % p.k)) : 0;
      A.at(r, p.m_bar + j) = mod_q_signed(int64_t(g) - acc, p.q);
    }
  }
  return {std::move(A), std::move(R)};
}

bool trapdoor_valid(const LweParams& p, const ModMatrix& A, const TrapMatrix& R) {
  if (A.rows != p.n_lwe || A.cols != p.m_lwe) return false;
  if (R.rows != p.m_bar || R.cols != p.w_gadget) return false;
  // Norm bound: max column L1 of [R; I] must stay within the generation cap,
  // which is what certifies the frozen inversion radius.
  for (uint32_t j = 0; j < R.cols; ++j) {
    int64_t l1 = 1;
    for (uint32_t i = 0; i < R.rows; ++i) l1 += std::abs(int64_t(R.at(i, j)));
    if (l1 > p.amp_cap()) return false;
  }
  // Form check: last w columns equal G - Abar R.
  for (uint32_t r = 0; r < p.n_lwe; ++r) {
    for (uint32_t j = 0; j < p.w_gadget; ++j) {
      int64_t acc = 0;
      for (uint32_t i = 0; i < p.m_bar; ++i)
        acc += int64_t(A.at(r, i)) * R.at(i, j);
      uint64_t g = (j / p.k == r) ? (uint64_t(1) << (j % p.k)) : 0;
      if (A.at(r, p.m_bar + j) != mod_q_signed(int64_t(g) - acc, p.q)) return false;
    }
  }
  return true;
}

std::optional<InvertResult> invert(const LweParams& p, const ModMatrix& A,
                                   const TrapMatrix& R, const ModVec& c) {
  if (c.size() != p.m_lwe) throw std::invalid_argument("invert: dimension mismatch");
  // chat = [R; I]^T c  (w_gadget entries).
  std::vector<uint64_t> chat(p.w_gadget);
  for (uint32_t j = 0; j < p.w_gadget; ++j) {
    int64_t acc = int64_t(c[p.m_bar + j]);
    for (uint32_t i = 0; i < p.m_bar; ++i) acc += int64_t(R.at(i, j)) * int64_t(c[i]);
    chat[j] = mod_q_signed(acc, p.q);
  }
  // Bit-peel each secret coordinate: chat[d*k + j] = s_d * 2^j + noise (mod 2^k...q).
  ModVec s(p.n_lwe, 0);
  for (uint32_t d = 0; d < p.n_lwe; ++d) {
    uint64_t known = 0;
    for (uint32_t t = 0; t < p.k; ++t) {
      uint32_t j = p.k - 1 - t;
      uint64_t rem = mod_q_signed(int64_t(chat[d * p.k + j]) -
                                      int64_t(mod_q(known << j, p.q)),
                                  p.q);
      // rem = bit * q/2 + noise with |noise| < q/4.
      bool bit = std::llabs(centered(rem, p.q)) > int64_t(p.q / 4);
      if (bit) known |= uint64_t(1) << t;
    }
    s[d] = known;
  }
  // Recover e = c - A^T s and accept only within the certified radius.
  ModVec as = mat_t_vec(A, s, p.q);
  InvertResult res;
  res.s = std::move(s);
  res.e.resize(p.m_lwe);
  for (uint32_t i = 0; i < p.m_lwe; ++i) {
    res.e[i] = centered(mod_q_signed(int64_t(c[i]) - int64_t(as[i]), p.q), p.q);
    res.e_inf = std::max<int64_t>(res.e_inf, std::llabs(res.e[i]));
  }
  if (res.e_inf > p.b_invert) return std::nullopt;
  return res;
}

EtcffKeyPair keygen(KeyKind kind, const LweParams& p, Rng& rng) {
  EtcffKeyPair key;
  key.kind = kind;
  auto [A, R] = gen_trap(p, rng);
  key.A = std::move(A);
  key.R = std::move(R);
  if (kind == KeyKind::F) {
    key.s.resize(p.n_lwe);
    for (auto& v : key.s) v = rng.below(p.q);
    key.e.resize(p.m_lwe);
    for (auto& v : key.e)
      v = int64_t(rng.below(uint64_t(2 * (p.b_f - 1) + 1))) - (p.b_f - 1);
    key.v = mat_t_vec(key.A, key.s, p.q);
    for (uint32_t i = 0; i < p.m_lwe; ++i)
      key.v[i] = mod_q_signed(int64_t(key.v[i]) + key.e[i], p.q);
  } else {
    // Rejection-sample u until the Invert trichotomy certifies distance > b_g
    // from every A^T s.
    for (;;) {
      key.v.resize(p.m_lwe);
      for (auto& v : key.v) v = rng.below(p.q);
      auto inv = invert(p, key.A, key.R, key.v);
      if (!inv || inv->e_inf > p.b_g) break;
    }
  }
  return key;
}

EtcffKeyPair keygen_with_error(const LweParams& p, int64_t e_inf, Rng& rng) {
  EtcffKeyPair key;
  key.kind = KeyKind::F;
  auto [A, R] = gen_trap(p, rng);
  key.A = std::move(A);
  key.R = std::move(R);
  key.s.resize(p.n_lwe);
  for (auto& v : key.s) v = rng.below(p.q);
  key.e.assign(p.m_lwe, 0);
  if (e_inf != 0) {
    // One coordinate pinned at the requested magnitude, rest bounded by it.
    for (auto& v : key.e)
      v = int64_t(rng.below(uint64_t(2 * e_inf + 1))) - e_inf;
    key.e[rng.below(p.m_lwe)] = rng.next_bit() ? e_inf : -e_inf;
  }
  key.v = mat_t_vec(key.A, key.s, p.q);
  for (uint32_t i = 0; i < p.m_lwe; ++i)
    key.v[i] = mod_q_signed(int64_t(key.v[i]) + key.e[i], p.q);
  return key;
}

std::vector<int64_t> sample_truncated_gaussian(const LweParams& p, Rng& rng) {
  const auto& cdf = p.noise_cdf();
  std::vector<int64_t> e0(p.m_lwe);
  for (auto& v : e0) {
    double u = rng.next_unit();
    size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi) / 2;
      if (u < cdf[mid]) hi = mid;
      else lo = mid + 1;
    }
    v = int64_t(lo) - p.e0_max;
  }
  return e0;
}

ModVec embed(const LweParams& p, const BitVec& x) {
  if (x.size() != p.w_pre) throw std::invalid_argument("embed: preimage width mismatch");
  ModVec out(p.n_lwe);
  for (uint32_t d = 0; d < p.n_lwe; ++d) out[d] = x.chunk_u64(size_t(d) * p.k, p.k);
  return out;
}

BitVec unembed(const LweParams& p, const ModVec& v) {
  if (v.size() != p.n_lwe) throw std::invalid_argument("unembed: dimension mismatch");
  BitVec out(p.w_pre);
  for (uint32_t d = 0; d < p.n_lwe; ++d)
    for (uint32_t j = 0; j < p.k; ++j) out.set(size_t(d) * p.k + j, (v[d] >> j) & 1);
  return out;
}

namespace {

ModVec eval_impl(const LweParams& p, const ModMatrix& A, const ModVec& v, bool b,
                 const BitVec& x, const std::vector<int64_t>& e0) {
  ModVec y = mat_t_vec(A, embed(p, x), p.q);
  for (uint32_t i = 0; i < p.m_lwe; ++i) {
    int64_t acc = int64_t(y[i]) + e0[i];
    if (b) acc += int64_t(v[i]);
    y[i] = mod_q_signed(acc, p.q);
  }
  return y;
}

bool check_impl(const LweParams& p, const ModMatrix& A, const ModVec& v, bool b,
                const BitVec& x, const ModVec& y) {
  if (x.size() != p.w_pre || y.size() != p.m_lwe) return false;
  ModVec ax = mat_t_vec(A, embed(p, x), p.q);
  for (uint32_t i = 0; i < p.m_lwe; ++i) {
    int64_t diff = int64_t(y[i]) - int64_t(ax[i]);
    if (b) diff -= int64_t(v[i]);
    if (std::llabs(centered(mod_q_signed(diff, p.q), p.q)) > p.e0_max) return false;
  }
  return true;
}

}  // namespace

ModVec eval_sample(const LweParams& p, const EtcffKeyPair& key, bool b, const BitVec& x,
                   Rng& rng) {
  return eval_impl(p, key.A, key.v, b, x, sample_truncated_gaussian(p, rng));
}

ModVec eval_sample(const LweParams& p, const PublicKey& key, bool b, const BitVec& x,
                   Rng& rng) {
  return eval_impl(p, key.A, key.v, b, x, sample_truncated_gaussian(p, rng));
}

ModVec eval_with_noise(const LweParams& p, const EtcffKeyPair& key, bool b,
                       const BitVec& x, const std::vector<int64_t>& e0) {
  return eval_impl(p, key.A, key.v, b, x, e0);
}

bool check_preimage(const LweParams& p, const EtcffKeyPair& key, bool b, const BitVec& x,
                    const ModVec& y) {
  return check_impl(p, key.A, key.v, b, x, y);
}

bool check_preimage(const LweParams& p, const PublicKey& key, bool b, const BitVec& x,
                    const ModVec& y) {
  return check_impl(p, key.A, key.v, b, x, y);
}

bool trapdoor_key_check(const LweParams& p, const ModMatrix& A, const ModVec& v,
                        const TrapMatrix& R) {
  if (!trapdoor_valid(p, A, R)) return false;
  auto inv = invert(p, A, R, v);
  if (!inv) return true;           // failure branch: injective-style key
  if (inv->e_inf < p.b_f) return true;   // claw-free branch
  if (inv->e_inf > p.b_g) return true;   // injective branch
  return false;                          // forbidden band
}

std::vector<Preimage> recover_preimages(const LweParams& p, const ModMatrix& A,
                                        const ModVec& v, const TrapMatrix& R,
                                        const ModVec& y) {
  std::vector<Preimage> out;
  if (auto inv = invert(p, A, R, y); inv && inv->e_inf <= p.e0_max)
    out.push_back({false, unembed(p, inv->s)});
  ModVec shifted(p.m_lwe);
  for (uint32_t i = 0; i < p.m_lwe; ++i)
    shifted[i] = mod_q_signed(int64_t(y[i]) - int64_t(v[i]), p.q);
  if (auto inv = invert(p, A, R, shifted); inv && inv->e_inf <= p.e0_max)
    out.push_back({true, unembed(p, inv->s)});
  return out;
}

namespace {

constexpr uint8_t kKeyVersion = 1;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t(v >> (8 * i)));
}

uint32_t get_u32(const std::vector<uint8_t>& in, size_t& pos) {
  if (pos + 4 > in.size()) throw std::invalid_argument("truncated buffer");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(in[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace

std::vector<uint8_t> serialize_key(const LweParams& p, const ModMatrix& A,
                                   const ModVec& v) {
  std::vector<uint8_t> out;
  out.push_back(kKeyVersion);
  put_u32(out, A.rows);
  put_u32(out, A.cols);
  for (auto x : A.data) put_u32(out, uint32_t(x));
  put_u32(out, uint32_t(v.size()));
  for (auto x : v) put_u32(out, uint32_t(x));
  (void)p;
  return out;
}

std::vector<uint8_t> serialize_trapdoor(const TrapMatrix& R) {
  std::vector<uint8_t> out;
  out.push_back(kKeyVersion);
  put_u32(out, R.rows);
  put_u32(out, R.cols);
  for (auto x : R.data) put_u32(out, uint32_t(int64_t(x)));
  return out;
}

PublicKey deserialize_key(const LweParams& p, const std::vector<uint8_t>& bytes) {
  size_t pos = 0;
  if (bytes.empty() || bytes[pos++] != kKeyVersion)
    throw std::invalid_argument("bad key version");
  PublicKey key;
  key.A.rows = get_u32(bytes, pos);
  key.A.cols = get_u32(bytes, pos);
  key.A.data.resize(size_t(key.A.rows) * key.A.cols);
  for (auto& x : key.A.data) x = get_u32(bytes, pos);
  key.v.resize(get_u32(bytes, pos));
  for (auto& x : key.v) x = get_u32(bytes, pos);
  for (auto x : key.A.data)
    if (x >= p.q) throw std::invalid_argument("key entry out of modulus range");
  for (auto x : key.v)
    if (x >= p.q) throw std::invalid_argument("key entry out of modulus range");
  return key;
}

TrapMatrix deserialize_trapdoor(const std::vector<uint8_t>& bytes) {
  size_t pos = 0;
  if (bytes.empty() || bytes[pos++] != kKeyVersion)
    throw std::invalid_argument("bad trapdoor version");
  TrapMatrix R;
  R.rows = get_u32(bytes, pos);
  R.cols = get_u32(bytes, pos);
  R.data.resize(size_t(R.rows) * R.cols);
  for (auto& x : R.data) x = int32_t(get_u32(bytes, pos));
  return R;
}

}  // namespace cvzk::etcff

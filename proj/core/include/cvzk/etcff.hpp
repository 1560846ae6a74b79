#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cvzk/bits.hpp"
#include "cvzk/rng.hpp"

namespace cvzk::etcff {

/// Toy-scale LWE parameter set. The modulus is a power of two so that the
/// gadget decode is an exact bit-peel and the preimage domain {0,1}^w_pre
/// maps bijectively onto Z_q^{n_lwe}. Nothing here is cryptographically
/// secure; dimensions are sized for exhaustive checking.
struct LweParams {
  uint32_t n_lwe = 0;    // secret dimension
  uint32_t m_bar = 0;    // left block columns of the wide matrix
  uint32_t k = 0;        // log2(q)
  uint32_t w_gadget = 0; // n_lwe * k
  uint32_t m_lwe = 0;    // m_bar + w_gadget (function output dimension)
  uint64_t q = 0;        // 2^k
  int64_t b_f = 0;       // f-key error bound (strict)
  int64_t e0_max = 0;    // truncation radius of the image noise
  int64_t b_g = 0;       // injective-key distance bound
  int64_t b_invert = 0;  // certified inversion radius (frozen from sigma_r)
  int32_t sigma_r = 0;   // trapdoor entry bound
  double sigma_e0 = 0;   // Gaussian width of the image noise
  uint32_t w_pre = 0;    // preimage bit width = n_lwe * k
  int64_t bf_ratio = 16; // required e0_max / b_f separation

  /// Worst-case infinity-norm amplification of [R; I]^T over honest R.
  int64_t amp_cap() const { return int64_t(m_bar) * sigma_r + 1; }

  void validate() const;

  static LweParams micro();
  static LweParams demo();

  /// Lazily built CDF of the truncated discrete Gaussian on [-e0_max, e0_max].
  const std::vector<double>& noise_cdf() const;

 private:
  mutable std::vector<double> noise_cdf_;
};

/// Values stored in [0, q); q a power of two.
using ModVec = std::vector<uint64_t>;

struct ModMatrix {
  uint32_t rows = 0, cols = 0;
  ModVec data;  // row-major

  uint64_t& at(uint32_t r, uint32_t c) { return data[size_t(r) * cols + c]; }
  uint64_t at(uint32_t r, uint32_t c) const { return data[size_t(r) * cols + c]; }
};

/// Small-entry trapdoor matrix (signed).
struct TrapMatrix {
  uint32_t rows = 0, cols = 0;  // m_bar x w_gadget
  std::vector<int32_t> data;

  int32_t& at(uint32_t r, uint32_t c) { return data[size_t(r) * cols + c]; }
  int32_t at(uint32_t r, uint32_t c) const { return data[size_t(r) * cols + c]; }
};

enum class KeyKind : uint8_t { F, G };

/// Function key (A, v) plus the private trapdoor R; kind and the f-secret
/// are retained for generation-side ground truth in experiments.
struct EtcffKeyPair {
  KeyKind kind = KeyKind::G;
  ModMatrix A;  // wide n_lwe x m_lwe, A = [Abar | G - Abar R]
  ModVec v;     // m_lwe
  TrapMatrix R;
  ModVec s;           // f only: secret with v = A^T s + e
  std::vector<int64_t> e;  // f only: planted error
};

struct InvertResult {
  ModVec s;                // n_lwe
  std::vector<int64_t> e;  // m_lwe, centered representatives
  int64_t e_inf = 0;
};

std::pair<ModMatrix, TrapMatrix> gen_trap(const LweParams& p, Rng& rng);

/// Exact trapdoor inversion: if c = A^T s + e with |e|_inf <= b_invert,
/// returns (s, e); otherwise nullopt.
std::optional<InvertResult> invert(const LweParams& p, const ModMatrix& A,
                                   const TrapMatrix& R, const ModVec& c);

/// Form check plus the norm bound that certifies the inversion radius.
bool trapdoor_valid(const LweParams& p, const ModMatrix& A, const TrapMatrix& R);

EtcffKeyPair keygen(KeyKind kind, const LweParams& p, Rng& rng);

/// Test fixture: f-shaped key with a planted error of given magnitude.
EtcffKeyPair keygen_with_error(const LweParams& p, int64_t e_inf, Rng& rng);

std::vector<int64_t> sample_truncated_gaussian(const LweParams& p, Rng& rng);

ModVec embed(const LweParams& p, const BitVec& x);
BitVec unembed(const LweParams& p, const ModVec& v);

/// y = A^T embed(x) + e0 + b*v with fresh truncated-Gaussian e0.
ModVec eval_sample(const LweParams& p, const EtcffKeyPair& key, bool b, const BitVec& x,
                   Rng& rng);

/// Deterministic variant with caller-supplied noise (test hook).
ModVec eval_with_noise(const LweParams& p, const EtcffKeyPair& key, bool b,
                       const BitVec& x, const std::vector<int64_t>& e0);

bool check_preimage(const LweParams& p, const EtcffKeyPair& key, bool b, const BitVec& x,
                    const ModVec& y);

/// Key-only view used by the prover side (no trapdoor, no secrets).
struct PublicKey {
  ModMatrix A;
  ModVec v;
};

bool check_preimage(const LweParams& p, const PublicKey& key, bool b, const BitVec& x,
                    const ModVec& y);

ModVec eval_sample(const LweParams& p, const PublicKey& key, bool b, const BitVec& x,
                   Rng& rng);

/// Protocol-level trapdoor-and-key check: valid trapdoor plus the f/g
/// trichotomy on v.
bool trapdoor_key_check(const LweParams& p, const ModMatrix& A, const ModVec& v,
                        const TrapMatrix& R);

struct Preimage {
  bool b;
  BitVec x;
};

/// All preimages of y recoverable with the trapdoor (zero, one or two).
std::vector<Preimage> recover_preimages(const LweParams& p, const ModMatrix& A,
                                        const ModVec& v, const TrapMatrix& R,
                                        const ModVec& y);

/// Canonical little-endian serialization with a version header.
std::vector<uint8_t> serialize_key(const LweParams& p, const ModMatrix& A,
                                   const ModVec& v);
std::vector<uint8_t> serialize_trapdoor(const TrapMatrix& R);
PublicKey deserialize_key(const LweParams& p, const std::vector<uint8_t>& bytes);
TrapMatrix deserialize_trapdoor(const std::vector<uint8_t>& bytes);

int64_t centered(uint64_t x, uint64_t q);

}  // namespace cvzk::etcff

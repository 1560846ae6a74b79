#include "cvzk/commitment.hpp"

#include <stdexcept>

namespace cvzk::commitment {

namespace {

uint64_t fold_bytes(const std::vector<uint8_t>& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Per-row coefficient stream: one uniform and one small term per s-bit.
/// The small term realizes the keyed noise expansion; folding it into the
/// row polynomial keeps commit linear in (m, s).
struct RowCoeffs {
  Rng stream;
  uint64_t q;
  explicit RowCoeffs(uint64_t pk_key, uint64_t row, uint64_t qq)
      : stream(Rng(pk_key).child(0x726f77ULL).child(row)), q(qq) {}
  uint64_t next() {
    uint64_t a = stream.next_u64() & (q - 1);
    uint64_t e = stream.next_u64() % 9;  // |E| <= 4
    return (a + e) & (q - 1);
  }
};

}  // namespace

CommitmentScheme gen(const Params& params, Rng& rng) {
  CommitmentScheme scheme;
  scheme.params = params;
  scheme.pk = rng.bytes(32);
  return scheme;
}

std::vector<uint8_t> initiate(const CommitmentScheme& scheme, Rng& rng) {
  return rng.bytes(scheme.params.tag_bytes);
}

CommitmentString commit(const CommitmentScheme& scheme, const std::vector<uint8_t>& tag,
                        const BitVec& message, const BitVec& s) {
  const Params& p = scheme.params;
  if (s.size() != p.s_bits) throw std::invalid_argument("commit: randomness width");
  uint64_t q = p.q();
  uint64_t pk_key = fold_bytes(scheme.pk);
  Rng tag_stream = Rng(pk_key).child(0x746167ULL).child(fold_bytes(tag));

  uint32_t rows = p.rows_for(message.size());
  CommitmentString z(rows);
  for (uint32_t r = 0; r < rows; ++r) {
    uint64_t acc = tag_stream.next_u64() & (q - 1);
    RowCoeffs coeffs(pk_key, r, q);
    for (uint32_t j = 0; j < p.s_bits; ++j) {
      uint64_t c = coeffs.next();
      if (s.get(j)) acc += c;
    }
    for (uint32_t t = 0; t < p.msg_bits_per_coord; ++t) {
      size_t idx = size_t(r) * p.msg_bits_per_coord + t;
      if (idx < message.size() && message.get(idx)) acc += q >> (t + 1);
    }
    z[r] = uint16_t(acc & (q - 1));
  }
  return z;
}

bool verify(const CommitmentScheme& scheme, const std::vector<uint8_t>& tag,
            const CommitmentString& z, const BitVec& message, const BitVec& s) {
  if (s.size() != scheme.params.s_bits) return false;
  if (z.size() != scheme.params.rows_for(message.size())) return false;
  return commit(scheme, tag, message, s) == z;
}

std::vector<uint64_t> row_coefficients(const CommitmentScheme& scheme, uint32_t row) {
  const Params& p = scheme.params;
  RowCoeffs coeffs(fold_bytes(scheme.pk), row, p.q());
  std::vector<uint64_t> out(p.s_bits);
  for (auto& c : out) c = coeffs.next();
  return out;
}

std::vector<uint64_t> tag_values(const CommitmentScheme& scheme,
                                 const std::vector<uint8_t>& tag, uint32_t rows) {
  uint64_t q = scheme.params.q();
  Rng tag_stream = Rng(fold_bytes(scheme.pk)).child(0x746167ULL).child(fold_bytes(tag));
  std::vector<uint64_t> out(rows);
  for (auto& v : out) v = tag_stream.next_u64() & (q - 1);
  return out;
}

std::vector<uint8_t> serialize_commitment(const CommitmentString& z) {
  std::vector<uint8_t> out;
  out.reserve(1 + 2 * z.size());
  out.push_back(1);  // version
  for (uint16_t v : z) {
    out.push_back(uint8_t(v & 0xff));
    out.push_back(uint8_t(v >> 8));
  }
  return out;
}

CommitmentString deserialize_commitment(const std::vector<uint8_t>& bytes) {
  if (bytes.empty() || bytes[0] != 1)
    throw std::invalid_argument("bad commitment version");
  if ((bytes.size() - 1) % 2 != 0)
    throw std::invalid_argument("bad commitment length");
  CommitmentString z((bytes.size() - 1) / 2);
  for (size_t i = 0; i < z.size(); ++i)
    z[i] = uint16_t(bytes[1 + 2 * i]) | (uint16_t(bytes[2 + 2 * i]) << 8);
  return z;
}

}  // namespace cvzk::commitment

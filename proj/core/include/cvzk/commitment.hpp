#pragma once

#include <cstdint>
#include <vector>

#include "cvzk/bits.hpp"
#include "cvzk/rng.hpp"

namespace cvzk::commitment {

/// Parameters of the lattice-shape commitment. z lives in Z_q^rows with
/// msg_bits_per_coord message bits packed into the top bits of each
/// coordinate:
///   z[r] = sum_j s_j * (A_pk[r][j] + E_pk[r][j]) + Delta_pack(m_r) + tag(i)[r]
/// mod q, where A_pk is uniform and E_pk small, both expanded from the
/// public key, and Delta_pack places bit t at weight q / 2^{t+1}. Binding is
/// exact injectivity of (m, s) -> z (exhaustively checkable at micro sizes,
/// statistically overwhelming beyond); concealing is computational and is
/// only smoke-tested.
struct Params {
  uint32_t q_bits = 16;            // modulus 2^16
  uint32_t s_bits = 128;           // randomness width
  uint32_t tag_bytes = 16;         // initial-message width
  uint32_t msg_bits_per_coord = 8;

  uint64_t q() const { return uint64_t(1) << q_bits; }
  uint32_t rows_for(size_t msg_bits) const {
    return uint32_t((msg_bits + msg_bits_per_coord - 1) / msg_bits_per_coord);
  }

  static Params standard() { return {}; }
  static Params micro() {
    Params p;
    p.s_bits = 8;
    p.tag_bytes = 2;
    p.msg_bits_per_coord = 1;
    return p;
  }
};

struct CommitmentScheme {
  Params params;
  std::vector<uint8_t> pk;  // 32-byte seed expanding to all coefficients
};

using CommitmentString = std::vector<uint16_t>;

CommitmentScheme gen(const Params& params, Rng& rng);

/// Fresh session tag mixed into every commitment under this scheme.
std::vector<uint8_t> initiate(const CommitmentScheme& scheme, Rng& rng);

CommitmentString commit(const CommitmentScheme& scheme, const std::vector<uint8_t>& tag,
                        const BitVec& message, const BitVec& s);

bool verify(const CommitmentScheme& scheme, const std::vector<uint8_t>& tag,
            const CommitmentString& z, const BitVec& message, const BitVec& s);

/// reveal() is the identity on its inputs; kept as a named constructor so the
/// message flow reads like the scheme definition.
struct Reveal {
  BitVec message;
  BitVec s;
};
inline Reveal reveal(BitVec message, BitVec s) {
  return {std::move(message), std::move(s)};
}

/// Canonical serialization: version byte then little-endian u16 coordinates.
std::vector<uint8_t> serialize_commitment(const CommitmentString& z);
CommitmentString deserialize_commitment(const std::vector<uint8_t>& bytes);

/// Public coefficient of s-bit j in row r (needed to express commit as an
/// arithmetic circuit).
std::vector<uint64_t> row_coefficients(const CommitmentScheme& scheme, uint32_t row);

/// Public tag summands per row for a given initial message.
std::vector<uint64_t> tag_values(const CommitmentScheme& scheme,
                                 const std::vector<uint8_t>& tag, uint32_t rows);

}  // namespace cvzk::commitment

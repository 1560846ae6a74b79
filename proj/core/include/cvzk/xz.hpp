#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvzk/bits.hpp"
#include "cvzk/labels.hpp"
#include "cvzk/rational.hpp"

namespace cvzk::xz {

enum class InstanceError {
  DuplicateQubit,
  EmptyTerm,
  GapNonPositive,
  IndexOutOfRange,
  ZeroWeight,
  TooManyQubits,
  ParseError,
};

struct InstanceException : std::runtime_error {
  InstanceError code;
  InstanceException(InstanceError c, const std::string& what)
      : std::runtime_error(what), code(c) {}
};

enum class Pauli : uint8_t { X, Z };

struct PauliSupport {
  uint32_t qubit;
  Pauli op;
};

/// One weighted Pauli product acting on one or two qubits.
struct XZTerm {
  Rat weight;
  std::vector<PauliSupport> supports;  // 1 or 2 entries, distinct qubits

  int sign() const { return weight < 0 ? -1 : 1; }
};

/// Cumulative term-sampling distribution, exact rationals, final entry 1.
struct TermDistribution {
  std::vector<Rat> cumulative;
};

class XZHamiltonianInstance {
 public:
  /// Default: a minimal placeholder instance (-Z@0, thresholds -1.5/-0.5).
  XZHamiltonianInstance();
  XZHamiltonianInstance(uint32_t n, std::vector<XZTerm> terms, Rat a, Rat b);

  uint32_t n() const { return n_; }
  const std::vector<XZTerm>& terms() const { return terms_; }
  const Rat& a() const { return a_; }
  const Rat& b() const { return b_; }
  const Rat& weight_sum() const { return weight_sum_; }
  Rat gap() const { return b_ - a_; }

  /// alpha = a / (2 * weight_sum), beta likewise with b.
  Rat alpha() const { return a_ / (2 * weight_sum_); }
  Rat beta() const { return b_ / (2 * weight_sum_); }

 private:
  uint32_t n_;
  std::vector<XZTerm> terms_;
  Rat a_, b_;
  Rat weight_sum_;
};

struct InstanceDesc {
  uint32_t n = 0;
  std::vector<XZTerm> terms;
  Rat a, b;
};

/// Default cap on instance size accepted by the validator; generous relative
/// to the dense-simulation cap because protocol paths never diagonalize.
constexpr uint32_t kDefaultMaxQubits = 24;

XZHamiltonianInstance validate_instance(const InstanceDesc& raw,
                                        uint32_t max_qubits = kDefaultMaxQubits);

/// Parses the plain-text instance format: header line "n a b", then one term
/// per line "d q1 P1 [q2 P2]". '#' starts a comment.
XZHamiltonianInstance parse_instance_text(const std::string& text,
                                          uint32_t max_qubits = kDefaultMaxQubits);

std::string instance_to_text(const XZHamiltonianInstance& inst);

TermDistribution term_distribution(const XZHamiltonianInstance& H);

/// Default per-draw randomness width for mapping coin chunks to term indices.
constexpr uint32_t kDefaultRBits = 32;

/// Deterministic inverse-CDF map from the coin string r (m chunks of
/// r_bits bits, each read LSB-first) to term indices.
std::vector<uint32_t> sample_term_indices(const BitVec& r,
                                          const XZHamiltonianInstance& H,
                                          uint64_t m,
                                          uint32_t r_bits = kDefaultRBits);

/// Smallest m with 2*exp(-m*(beta-alpha)^2/8) <= eps.
uint64_t choose_m(const Rat& a, const Rat& b, const Rat& weight_sum, double eps);

/// True iff count/m is strictly closer to 1/2 - alpha than to 1/2 - beta.
/// Equidistant counts reject.
bool accept_decision(uint64_t count, uint64_t m, const Rat& a, const Rat& b,
                     const Rat& weight_sum);

/// Product-state description of rho_r over m*n qubits: the challenge
/// determined by r passes with certainty when each selected term's support
/// qubits hold the prescribed eigenstates and every other qubit holds |0>.
std::vector<QubitLabel> build_rho_r(const XZHamiltonianInstance& H,
                                    const BitVec& r, uint64_t m,
                                    uint32_t r_bits = kDefaultRBits);

}  // namespace cvzk::xz

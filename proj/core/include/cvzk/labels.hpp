#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvzk {

/// Single-qubit product-state label: a computational or Hadamard basis state.
enum class QubitLabel : uint8_t { Zero, One, Plus, Minus };

/// Measurement basis for a single qubit.
enum class Basis : uint8_t { Z, X };

/// Transversal gate applied to a block: identity or Hadamard.
enum class BlockGate : uint8_t { I, H };

inline char label_char(QubitLabel l) {
  switch (l) {
    case QubitLabel::Zero: return '0';
    case QubitLabel::One: return '1';
    case QubitLabel::Plus: return '+';
    case QubitLabel::Minus: return '-';
  }
  return '?';
}

inline QubitLabel label_from_char(char c) {
  switch (c) {
    case '0': return QubitLabel::Zero;
    case '1': return QubitLabel::One;
    case '+': return QubitLabel::Plus;
    case '-': return QubitLabel::Minus;
  }
  throw std::invalid_argument(std::string("bad qubit label: ") + c);
}

/// Image of a label under the Hadamard gate (0<->+, 1<->-).
inline QubitLabel hadamard_label(QubitLabel l) {
  switch (l) {
    case QubitLabel::Zero: return QubitLabel::Plus;
    case QubitLabel::Plus: return QubitLabel::Zero;
    case QubitLabel::One: return QubitLabel::Minus;
    case QubitLabel::Minus: return QubitLabel::One;
  }
  return l;
}

inline std::string labels_to_string(const std::vector<QubitLabel>& v) {
  std::string s;
  s.reserve(v.size());
  for (auto l : v) s.push_back(label_char(l));
  return s;
}

inline std::vector<QubitLabel> labels_from_string(const std::string& s) {
  std::vector<QubitLabel> v;
  v.reserve(s.size());
  for (char c : s) v.push_back(label_from_char(c));
  return v;
}

}  // namespace cvzk

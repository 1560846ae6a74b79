#include "cvzk/xz.hpp"

#include <cmath>
#include <sstream>

namespace cvzk::xz {

XZHamiltonianInstance::XZHamiltonianInstance()
    : XZHamiltonianInstance(1, {XZTerm{Rat(-1), {{0, Pauli::Z}}}}, Rat(-3, 2),
                            Rat(-1, 2)) {}

XZHamiltonianInstance::XZHamiltonianInstance(uint32_t n, std::vector<XZTerm> terms,
                                             Rat a, Rat b)
    : n_(n), terms_(std::move(terms)), a_(std::move(a)), b_(std::move(b)) {
  weight_sum_ = 0;
  for (const auto& t : terms_) weight_sum_ += rat_abs(t.weight);
}

XZHamiltonianInstance validate_instance(const InstanceDesc& raw, uint32_t max_qubits) {
  if (raw.n == 0 || raw.n > max_qubits)
    throw InstanceException(InstanceError::TooManyQubits,
                            "qubit count outside (0, " + std::to_string(max_qubits) + "]");
  if (!(raw.a < raw.b))
    throw InstanceException(InstanceError::GapNonPositive, "thresholds require a < b");
  if (raw.terms.empty())
    throw InstanceException(InstanceError::EmptyTerm, "instance has no terms");
  for (size_t s = 0; s < raw.terms.size(); ++s) {
    const auto& t = raw.terms[s];
    auto where = "term " + std::to_string(s);
    if (t.supports.empty() || t.supports.size() > 2)
      throw InstanceException(InstanceError::EmptyTerm, where + ": support size must be 1 or 2");
    if (t.weight == 0)
      throw InstanceException(InstanceError::ZeroWeight, where + ": zero weight");
    for (const auto& p : t.supports)
      if (p.qubit >= raw.n)
        throw InstanceException(InstanceError::IndexOutOfRange,
                                where + ": qubit " + std::to_string(p.qubit) + " >= n");
    if (t.supports.size() == 2 && t.supports[0].qubit == t.supports[1].qubit)
      throw InstanceException(InstanceError::DuplicateQubit, where + ": duplicate qubit");
  }
  return XZHamiltonianInstance(raw.n, raw.terms, raw.a, raw.b);
}

XZHamiltonianInstance parse_instance_text(const std::string& text, uint32_t max_qubits) {
  std::istringstream in(text);
  std::string line;
  InstanceDesc desc;
  bool header_done = false;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& msg) -> InstanceException {
      return InstanceException(InstanceError::ParseError,
                               "line " + std::to_string(lineno) + ": " + msg);
    };
    try {
      if (!header_done) {
        if (tok.size() != 3) throw fail("header must be 'n a b'");
        desc.n = uint32_t(std::stoul(tok[0]));
        desc.a = rat_from_decimal(tok[1]);
        desc.b = rat_from_decimal(tok[2]);
        header_done = true;
      } else {
        if (tok.size() != 3 && tok.size() != 5) throw fail("term must be 'd q1 P1 [q2 P2]'");
        XZTerm term;
        term.weight = rat_from_decimal(tok[0]);
        for (size_t i = 1; i + 1 < tok.size(); i += 2) {
          PauliSupport ps;
          ps.qubit = uint32_t(std::stoul(tok[i]));
          if (tok[i + 1] == "X" || tok[i + 1] == "x") ps.op = Pauli::X;
          else if (tok[i + 1] == "Z" || tok[i + 1] == "z") ps.op = Pauli::Z;
          else throw fail("Pauli must be X or Z");
          term.supports.push_back(ps);
        }
        desc.terms.push_back(std::move(term));
      }
    } catch (const InstanceException&) {
      throw;
    } catch (const std::exception& e) {
      throw fail(e.what());
    }
  }
  if (!header_done)
    throw InstanceException(InstanceError::ParseError, "missing header line 'n a b'");
  return validate_instance(desc, max_qubits);
}

namespace {

std::string rat_to_text(const Rat& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

}  // namespace

std::string instance_to_text(const XZHamiltonianInstance& inst) {
  std::ostringstream os;
  os << inst.n() << " " << rat_to_text(inst.a()) << " " << rat_to_text(inst.b()) << "\n";
  for (const auto& t : inst.terms()) {
    os << rat_to_text(t.weight);
    for (const auto& p : t.supports)
      os << " " << p.qubit << " " << (p.op == Pauli::X ? "X" : "Z");
    os << "\n";
  }
  return os.str();
}

TermDistribution term_distribution(const XZHamiltonianInstance& H) {
  TermDistribution d;
  Rat acc = 0;
  for (const auto& t : H.terms()) {
    acc += rat_abs(t.weight) / H.weight_sum();
    d.cumulative.push_back(acc);
  }
  d.cumulative.back() = 1;  // exact by construction; assert cheaply
  return d;
}

std::vector<uint32_t> sample_term_indices(const BitVec& r, const XZHamiltonianInstance& H,
                                          uint64_t m, uint32_t r_bits) {
  if (r.size() != m * r_bits)
    throw InstanceException(InstanceError::ParseError,
                            "coin string length mismatch: want " +
                                std::to_string(m * r_bits) + " bits, got " +
                                std::to_string(r.size()));
  TermDistribution dist = term_distribution(H);
  BigInt scale = BigInt(1) << r_bits;
  std::vector<uint32_t> out;
  out.reserve(m);
  for (uint64_t j = 0; j < m; ++j) {
    uint64_t chunk = r.chunk_u64(j * r_bits, r_bits);
    // Smallest s with chunk < cumulative[s] * 2^r_bits, compared exactly.
    uint32_t idx = uint32_t(dist.cumulative.size()) - 1;
    for (uint32_t s = 0; s < dist.cumulative.size(); ++s) {
      const Rat& c = dist.cumulative[s];
      if (BigInt(chunk) * denominator(c) < numerator(c) * scale) {
        idx = s;
        break;
      }
    }
    out.push_back(idx);
  }
  return out;
}

uint64_t choose_m(const Rat& a, const Rat& b, const Rat& weight_sum, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps outside (0,1)");
  Rat gap = (b - a) / (2 * weight_sum);
  if (gap <= 0)
    throw InstanceException(InstanceError::GapNonPositive, "beta - alpha <= 0");
  long double g = gap.convert_to<long double>();
  auto bound_ok = [&](uint64_t m) {
    return 2.0L * std::exp(-(long double)(m)*g * g / 8.0L) <= (long double)eps;
  };
  long double est = 8.0L * std::log(2.0L / (long double)eps) / (g * g);
  uint64_t m = est <= 1.0L ? 1 : (uint64_t)est;
  while (!bound_ok(m)) ++m;
  while (m > 1 && bound_ok(m - 1)) --m;
  return m;
}

bool accept_decision(uint64_t count, uint64_t m, const Rat& a, const Rat& b,
                     const Rat& weight_sum) {
  if (count > m) throw std::invalid_argument("count > m");
  BigInt cnum(count), cden(m);
  Rat ratio(cnum, cden);
  Rat alpha = a / (2 * weight_sum);
  Rat beta = b / (2 * weight_sum);
  Rat da = rat_abs(ratio - (Rat(1, 2) - alpha));
  Rat db = rat_abs(ratio - (Rat(1, 2) - beta));
  return da < db;
}

std::vector<QubitLabel> build_rho_r(const XZHamiltonianInstance& H, const BitVec& r,
                                    uint64_t m, uint32_t r_bits) {
  auto indices = sample_term_indices(r, H, m, r_bits);
  std::vector<QubitLabel> labels(size_t(m) * H.n(), QubitLabel::Zero);
  auto plus_one = [](Pauli p) { return p == Pauli::X ? QubitLabel::Plus : QubitLabel::Zero; };
  auto minus_one = [](Pauli p) { return p == Pauli::X ? QubitLabel::Minus : QubitLabel::One; };
  for (uint64_t j = 0; j < m; ++j) {
    const XZTerm& term = H.terms()[indices[j]];
    bool want_plus = term.sign() < 0;  // -sign(d_j) == +1
    size_t base = size_t(j) * H.n();
    if (term.supports.size() == 1) {
      const auto& p = term.supports[0];
      labels[base + p.qubit] = want_plus ? plus_one(p.op) : minus_one(p.op);
    } else {
      // First support qubit takes the +1 eigenstate; the second carries the
      // sign of the prescribed product outcome.
      const auto& p1 = term.supports[0];
      const auto& p2 = term.supports[1];
      labels[base + p1.qubit] = plus_one(p1.op);
      labels[base + p2.qubit] = want_plus ? plus_one(p2.op) : minus_one(p2.op);
    }
  }
  return labels;
}

}  // namespace cvzk::xz

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cvzk/qsim.hpp"
#include "cvzk/xz.hpp"

using namespace cvzk;
using namespace cvzk::xz;

namespace {

InstanceDesc simple_desc() {
  InstanceDesc d;
  d.n = 2;
  d.a = rat_from_decimal("-0.9");
  d.b = rat_from_decimal("-0.1");
  XZTerm t;
  t.weight = -1;
  t.supports = {{0, Pauli::Z}, {1, Pauli::Z}};
  d.terms = {t};
  return d;
}

}  // namespace

TEST_CASE("validate_instance accepts a simple instance") {
  auto inst = validate_instance(simple_desc());
  CHECK(inst.weight_sum() == Rat(1));
  CHECK(inst.n() == 2);
  CHECK(inst.gap() == rat_from_decimal("0.8"));
}

TEST_CASE("validate_instance rejects a >= b") {
  auto d = simple_desc();
  d.a = d.b = rat_from_decimal("0.5");
  CHECK_THROWS_WITH_AS(validate_instance(d), doctest::Contains("a < b"),
                       InstanceException);
  try {
    validate_instance(d);
  } catch (const InstanceException& e) {
    CHECK(e.code == InstanceError::GapNonPositive);
  }
}

TEST_CASE("validate_instance rejects out-of-range qubit") {
  auto d = simple_desc();
  d.terms[0].supports[1].qubit = 5;
  try {
    validate_instance(d);
    CHECK(false);
  } catch (const InstanceException& e) {
    CHECK(e.code == InstanceError::IndexOutOfRange);
  }
}

TEST_CASE("validate_instance rejects duplicate qubit and empty term") {
  auto d = simple_desc();
  d.terms[0].supports[1].qubit = 0;
  try {
    validate_instance(d);
    CHECK(false);
  } catch (const InstanceException& e) {
    CHECK(e.code == InstanceError::DuplicateQubit);
  }
  d = simple_desc();
  d.terms[0].supports.clear();
  try {
    validate_instance(d);
    CHECK(false);
  } catch (const InstanceException& e) {
    CHECK(e.code == InstanceError::EmptyTerm);
  }
}

TEST_CASE("text format round trip and parse errors") {
  std::string text = "2 -0.9 -0.1\n-1 0 Z 1 Z\n0.5 1 X\n";
  auto inst = parse_instance_text(text);
  CHECK(inst.terms().size() == 2);
  CHECK(inst.weight_sum() == rat_from_decimal("1.5"));
  auto round = parse_instance_text(instance_to_text(inst));
  CHECK(round.terms().size() == 2);
  CHECK(round.a() == inst.a());
  CHECK_THROWS_AS(parse_instance_text("2 1 2\n-1 0 Y\n"), InstanceException);
  CHECK_THROWS_AS(parse_instance_text(""), InstanceException);
}

TEST_CASE("term_distribution formula") {
  auto d = simple_desc();
  d.terms[0].weight = 1;
  XZTerm t2 = d.terms[0];
  t2.weight = -3;
  t2.supports = {{0, Pauli::X}};
  d.terms.push_back(t2);
  auto inst = validate_instance(d);
  auto dist = term_distribution(inst);
  REQUIRE(dist.cumulative.size() == 2);
  CHECK(dist.cumulative[0] == Rat(1, 4));
  CHECK(dist.cumulative[1] == Rat(1));

  // single term
  auto single = validate_instance(simple_desc());
  CHECK(term_distribution(single).cumulative == std::vector<Rat>{Rat(1)});

  // weights (2, 2, 4) -> pi = (1/4, 1/4, 1/2)
  InstanceDesc d3 = simple_desc();
  d3.terms.clear();
  for (int w : {2, 2, 4}) {
    XZTerm t;
    t.weight = w;
    t.supports = {{0, Pauli::Z}};
    d3.terms.push_back(t);
  }
  auto dist3 = term_distribution(validate_instance(d3));
  CHECK(dist3.cumulative[0] == Rat(1, 4));
  CHECK(dist3.cumulative[1] == Rat(1, 2));
  CHECK(dist3.cumulative[2] == Rat(1));
}

TEST_CASE("sum of term probabilities is exactly one") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    InstanceDesc d;
    d.n = 3;
    d.a = Rat(-1);
    d.b = Rat(1);
    size_t terms = 1 + rng.below(6);
    for (size_t s = 0; s < terms; ++s) {
      XZTerm t;
      t.weight = Rat(int64_t(rng.below(200)) - 100, 1 + int64_t(rng.below(9)));
      if (t.weight == 0) t.weight = 1;
      t.supports = {{uint32_t(rng.below(3)), rng.next_bit() ? Pauli::X : Pauli::Z}};
      d.terms.push_back(t);
    }
    auto inst = validate_instance(d);
    auto dist = term_distribution(inst);
    CHECK(dist.cumulative.back() == Rat(1));
    Rat sum = 0;
    Rat prev = 0;
    for (const auto& c : dist.cumulative) {
      sum += c - prev;
      prev = c;
    }
    CHECK(sum == Rat(1));
  }
}

TEST_CASE("sample_term_indices degenerate and midpoint cases") {
  auto single = validate_instance(simple_desc());
  BitVec r(3 * 32);
  for (size_t i = 0; i < r.size(); i += 3) r.set(i, true);
  auto idx = sample_term_indices(r, single, 3);
  CHECK(idx == std::vector<uint32_t>{0, 0, 0});

  InstanceDesc d = simple_desc();
  d.terms.push_back(d.terms[0]);
  d.terms[1].weight = 1;
  auto two = validate_instance(d);
  BitVec low(32);  // chunk value 0
  CHECK(sample_term_indices(low, two, 1)[0] == 0);
  BitVec high(32);
  high.set(31, true);  // 2^31 = midpoint
  CHECK(sample_term_indices(high, two, 1)[0] == 1);
  BitVec just_below(32);
  for (int i = 0; i < 31; ++i) just_below.set(i, true);  // 2^31 - 1
  CHECK(sample_term_indices(just_below, two, 1)[0] == 0);

  CHECK_THROWS_AS(sample_term_indices(BitVec(31), two, 1), InstanceException);
}

TEST_CASE("sample_term_indices matches exact CDF oracle over all 8-bit chunks") {
  InstanceDesc d = simple_desc();
  d.terms[0].weight = 1;
  XZTerm t2 = d.terms[0];
  t2.weight = 3;
  d.terms.push_back(t2);
  auto inst = validate_instance(d);
  // Oracle: smallest s with chunk < cdf_s * 256, exact rationals.
  auto dist = term_distribution(inst);
  for (uint32_t chunk = 0; chunk < 256; ++chunk) {
    uint32_t expect = 1;
    for (uint32_t s = 0; s < dist.cumulative.size(); ++s) {
      if (BigInt(chunk) * denominator(dist.cumulative[s]) <
          numerator(dist.cumulative[s]) * 256) {
        expect = s;
        break;
      }
    }
    BitVec r(8);
    for (int i = 0; i < 8; ++i) r.set(i, (chunk >> i) & 1);
    CHECK(sample_term_indices(r, inst, 1, 8)[0] == expect);
  }
  // Spec anchors: chunk 0x3F -> 0, chunk 0x40 -> 1.
  BitVec r1(8), r2(8);
  for (int i = 0; i < 8; ++i) r1.set(i, (0x3F >> i) & 1);
  for (int i = 0; i < 8; ++i) r2.set(i, (0x40 >> i) & 1);
  CHECK(sample_term_indices(r1, inst, 1, 8)[0] == 0);
  CHECK(sample_term_indices(r2, inst, 1, 8)[0] == 1);
}

TEST_CASE("choose_m closed-form anchors") {
  // beta - alpha = 0.1, eps = 2e^-2 -> m = 1600. Realize the gap via
  // weight_sum 1/2: alpha = a, beta = b.
  Rat half(1, 2);
  CHECK(choose_m(Rat(0), rat_from_decimal("0.1"), half, 2 * std::exp(-2.0)) == 1600);
  CHECK(choose_m(Rat(0), Rat(1), half, 2 * std::exp(-8.0)) == 64);
  uint64_t m = choose_m(Rat(0), rat_from_decimal("0.2"), half, 0.01);
  CHECK(m == 1060);
  // Independent minimality check of the Azuma bound at m and m-1.
  auto bound = [](uint64_t mm) { return 2.0L * std::exp(-0.04L * (long double)mm / 8.0L); };
  CHECK(bound(m) <= 0.01L);
  CHECK(bound(m - 1) > 0.01L);
}

TEST_CASE("choose_m monotonicity") {
  Rat half(1, 2);
  // Non-increasing in eps: shrinking eps can only grow m.
  uint64_t prev = 0;
  for (double eps : {0.3, 0.1, 0.01, 0.001}) {
    uint64_t m = choose_m(Rat(0), rat_from_decimal("0.25"), half, eps);
    CHECK(m >= prev);
    prev = m;
  }
  prev = UINT64_MAX;
  for (const char* gap : {"0.05", "0.1", "0.2", "0.5"}) {
    uint64_t m = choose_m(Rat(0), rat_from_decimal(gap), half, 0.01);
    CHECK(m <= prev);
    prev = m;
  }
  CHECK_THROWS_AS(choose_m(Rat(1), Rat(0), half, 0.1), InstanceException);
}

TEST_CASE("accept_decision exact boundary behaviour") {
  // weight_sum = 1/2 so alpha = a, beta = b; accept point 1/2 - a.
  Rat ws(1, 2);
  Rat a(-1, 2), b(0);  // accept point 1, reject point 1/2
  CHECK(accept_decision(100, 100, a, b, ws));      // exactly the accept point
  CHECK_FALSE(accept_decision(50, 100, a, b, ws)); // exactly the reject point
  CHECK_FALSE(accept_decision(75, 100, a, b, ws)); // exact midpoint rejects
  CHECK(accept_decision(76, 100, a, b, ws));
  CHECK_FALSE(accept_decision(74, 100, a, b, ws));
}

TEST_CASE("accept_decision orientation sanity") {
  Rng rng(3);
  for (int i = 0; i < 40; ++i) {
    int64_t an = -int64_t(rng.below(100)) - 1;
    Rat a(an, 100);
    Rat b = a + Rat(1 + int64_t(rng.below(50)), 100);
    Rat ws(1 + int64_t(rng.below(5)), 1);
    if (Rat(1, 2) - a / (2 * ws) <= (Rat(1) - (a + b) / (4 * ws)) / 1) {
      // always true given alpha < beta; count = m accepts whenever the accept
      // point is above the midpoint, which holds since alpha < beta
    }
    CHECK(accept_decision(1000, 1000, a, b, ws));
  }
}

TEST_CASE("build_rho_r places prescribed eigenstates") {
  // +1 * X@0 Z@1: -sign = -1, so first support '+', second support '1'.
  InstanceDesc d;
  d.n = 2;
  d.a = Rat(-1);
  d.b = Rat(1);
  XZTerm t;
  t.weight = 1;
  t.supports = {{0, Pauli::X}, {1, Pauli::Z}};
  d.terms = {t};
  auto inst = validate_instance(d);
  auto labels = build_rho_r(inst, BitVec(32), 1);
  REQUIRE(labels.size() == 2);
  CHECK(labels[0] == QubitLabel::Plus);
  CHECK(labels[1] == QubitLabel::One);

  // -1 * Z@0 Z@1: -sign = +1, both +1 eigenstates of Z.
  auto inst2 = validate_instance(simple_desc());
  auto labels2 = build_rho_r(inst2, BitVec(32), 1);
  CHECK(labels2[0] == QubitLabel::Zero);
  CHECK(labels2[1] == QubitLabel::Zero);

  // untouched qubit stays |0>
  d.n = 3;
  auto inst3 = validate_instance(d);
  auto labels3 = build_rho_r(inst3, BitVec(32), 1);
  CHECK(labels3[2] == QubitLabel::Zero);
}

TEST_CASE("rho_r passes its own challenge with certainty") {
  // Mixed X/Z instance, several copies; measuring each selected term on the
  // prescribed labels must match -sign(d) every time.
  std::string text = "3 -2.9 -0.5\n-1 0 X 1 Z\n2 1 Z 2 Z\n-0.5 2 X\n";
  auto inst = parse_instance_text(text);
  Rng rng(11);
  uint64_t m = 6;
  for (int trial = 0; trial < 30; ++trial) {
    BitVec r = rng.bits(m * 32);
    auto labels = build_rho_r(inst, r, m);
    auto indices = sample_term_indices(r, inst, m);
    uint64_t count = 0;
    for (uint64_t j = 0; j < m; ++j) {
      const auto& term = inst.terms()[indices[j]];
      std::vector<QubitLabel> copy(labels.begin() + j * inst.n(),
                                   labels.begin() + (j + 1) * inst.n());
      std::vector<Basis> bases(inst.n(), Basis::Z);
      for (const auto& p : term.supports)
        bases[p.qubit] = (p.op == Pauli::X) ? Basis::X : Basis::Z;
      BitVec out = qsim::sample_measurements(copy, bases, rng);
      int prod = 1;
      for (const auto& p : term.supports) prod *= out.get(p.qubit) ? -1 : 1;
      if (prod == -term.sign()) ++count;
    }
    CHECK(count == m);
  }
}

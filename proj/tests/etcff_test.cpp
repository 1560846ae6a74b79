#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "cvzk/etcff.hpp"
#include "cvzk/stats.hpp"

using namespace cvzk;
using namespace cvzk::etcff;

namespace {

/// Exhaustive decoder: scan every s in Z_q^{n_lwe} (micro scale only).
std::optional<InvertResult> brute_invert(const LweParams& p, const ModMatrix& A,
                                         const ModVec& c) {
  std::optional<InvertResult> best;
  std::vector<uint64_t> s(p.n_lwe, 0);
  uint64_t total = 1;
  for (uint32_t d = 0; d < p.n_lwe; ++d) total *= p.q;
  for (uint64_t enc = 0; enc < total; ++enc) {
    uint64_t acc = enc;
    for (uint32_t d = 0; d < p.n_lwe; ++d) {
      s[d] = acc % p.q;
      acc /= p.q;
    }
    int64_t e_inf = 0;
    std::vector<int64_t> e(p.m_lwe);
    for (uint32_t i = 0; i < p.m_lwe; ++i) {
      uint64_t as = 0;
      for (uint32_t r = 0; r < p.n_lwe; ++r) as += A.at(r, i) * s[r];
      int64_t diff = centered((c[i] + p.q * 4 - (as & (p.q - 1))) & (p.q - 1), p.q);
      e[i] = diff;
      e_inf = std::max<int64_t>(e_inf, std::llabs(diff));
    }
    if (e_inf <= p.b_invert) {
      InvertResult r;
      r.s = s;
      r.e = e;
      r.e_inf = e_inf;
      // unique within the radius, so first hit is the answer
      best = r;
      break;
    }
  }
  return best;
}

std::set<std::pair<bool, std::string>> brute_preimages(const LweParams& p,
                                                       const ModMatrix& A,
                                                       const ModVec& v, const ModVec& y) {
  std::set<std::pair<bool, std::string>> out;
  PublicKey pk{A, v};
  for (int b = 0; b < 2; ++b) {
    for (uint64_t xv = 0; xv < (uint64_t(1) << p.w_pre); ++xv) {
      BitVec x(p.w_pre);
      for (uint32_t i = 0; i < p.w_pre; ++i) x.set(i, (xv >> i) & 1);
      if (check_preimage(p, pk, b, x, y)) out.insert({bool(b), x.to_string()});
    }
  }
  return out;
}

}  // namespace

TEST_CASE("parameter presets validate") {
  auto micro = LweParams::micro();
  auto demo = LweParams::demo();
  CHECK(micro.q == 2048);
  CHECK(micro.b_invert >= micro.b_g);
  CHECK(demo.m_lwe == 32);
  CHECK(int64_t(demo.q) > 4 * demo.b_invert);
}

TEST_CASE("gen_trap produces valid trapdoors with the right shape") {
  auto p = LweParams::micro();
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    auto [A, R] = gen_trap(p, rng);
    CHECK(A.cols == p.m_lwe);
    CHECK(A.rows == p.n_lwe);
    CHECK(trapdoor_valid(p, A, R));
  }
}

TEST_CASE("Abar marginal uniformity (bytewise chi-square)") {
  auto p = LweParams::micro();
  Rng rng(2);
  std::vector<uint64_t> counts(256, 0);
  int draws = 0;
  while (draws < 10000) {
    auto [A, R] = gen_trap(p, rng);
    for (uint32_t r = 0; r < p.n_lwe; ++r)
      for (uint32_t c = 0; c < p.m_bar; ++c) {
        counts[A.at(r, c) & 0xff]++;
        ++draws;
      }
  }
  std::vector<double> expected(256, double(draws) / 256.0);
  CHECK(stats::chi_square_gof(counts, expected) > 0.01);
}

TEST_CASE("invert recovers exact (s, e) and matches brute force") {
  auto p = LweParams::micro();
  Rng rng(3);
  auto [A, R] = gen_trap(p, rng);

  // c = As exactly
  ModVec s0(p.n_lwe);
  for (auto& v : s0) v = rng.below(p.q);
  ModVec c(p.m_lwe);
  for (uint32_t i = 0; i < p.m_lwe; ++i) {
    uint64_t acc = 0;
    for (uint32_t r = 0; r < p.n_lwe; ++r) acc += A.at(r, i) * s0[r];
    c[i] = acc & (p.q - 1);
  }
  auto res = invert(p, A, R, c);
  REQUIRE(res.has_value());
  CHECK(res->s == s0);
  CHECK(res->e_inf == 0);

  // random bounded noise: exact recovery on every trial
  for (int trial = 0; trial < 300; ++trial) {
    ModVec s(p.n_lwe);
    for (auto& v : s) v = rng.below(p.q);
    std::vector<int64_t> e(p.m_lwe);
    for (auto& v : e)
      v = int64_t(rng.below(uint64_t(2 * p.e0_max + 1))) - p.e0_max;
    ModVec cc(p.m_lwe);
    for (uint32_t i = 0; i < p.m_lwe; ++i) {
      int64_t acc = e[i];
      for (uint32_t r = 0; r < p.n_lwe; ++r) acc += int64_t(A.at(r, i) * s[r]);
      cc[i] = uint64_t(acc & int64_t(p.q - 1));
    }
    auto rr = invert(p, A, R, cc);
    REQUIRE(rr.has_value());
    CHECK(rr->s == s);
    CHECK(rr->e == e);
  }

  // uniform random c: agreement with the exhaustive oracle, success or fail
  int failures = 0, brute_failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    ModVec cc(p.m_lwe);
    for (auto& v : cc) v = rng.below(p.q);
    auto fast = invert(p, A, R, cc);
    auto brute = brute_invert(p, A, cc);
    CHECK(fast.has_value() == brute.has_value());
    if (fast && brute) {
      CHECK(fast->s == brute->s);
      CHECK(fast->e == brute->e);
    }
    failures += !fast.has_value();
    brute_failures += !brute.has_value();
  }
  CHECK(failures == brute_failures);
  CHECK(failures > 190);  // uniform c almost never decodes at these params
}

TEST_CASE("trapdoor_valid rejects tampering") {
  auto p = LweParams::micro();
  Rng rng(4);
  auto [A, R] = gen_trap(p, rng);
  CHECK(trapdoor_valid(p, A, R));
  auto bigR = R;
  bigR.at(0, 0) = int32_t(p.q / 2);
  CHECK_FALSE(trapdoor_valid(p, A, bigR));
  auto badA = A;
  badA.at(0, p.m_lwe - 1) = (badA.at(0, p.m_lwe - 1) + 1) & (p.q - 1);
  CHECK_FALSE(trapdoor_valid(p, badA, R));
}

TEST_CASE("keygen honest keys pass trapdoor_key_check; forbidden band fails") {
  auto p = LweParams::micro();
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    auto f = keygen(KeyKind::F, p, rng);
    CHECK(trapdoor_key_check(p, f.A, f.v, f.R));
    auto g = keygen(KeyKind::G, p, rng);
    CHECK(trapdoor_key_check(p, g.A, g.v, g.R));
  }
  for (int i = 0; i < 50; ++i) {
    auto bad = keygen_with_error(p, (p.b_f + p.b_g) / 2, rng);
    CHECK_FALSE(trapdoor_key_check(p, bad.A, bad.v, bad.R));
  }
}

TEST_CASE("truncated gaussian: bounds, symmetry, pmf ratio") {
  auto p = LweParams::micro();
  Rng rng(6);
  const int draws = 20000;
  double sum = 0;
  std::vector<uint64_t> hist(2 * p.e0_max + 1, 0);
  int total_coords = 0;
  for (int i = 0; i < draws / int(p.m_lwe) + 1; ++i) {
    auto e0 = sample_truncated_gaussian(p, rng);
    for (auto v : e0) {
      CHECK(std::llabs(v) <= p.e0_max);
      sum += double(v);
      hist[size_t(v + p.e0_max)]++;
      ++total_coords;
    }
  }
  // mean ~ 0 within 4 sigma of the sampler's true std
  double var = 0;
  {
    double z = 0;
    std::vector<double> pmf(2 * p.e0_max + 1);
    for (int64_t v = -p.e0_max; v <= p.e0_max; ++v) {
      pmf[size_t(v + p.e0_max)] =
          std::exp(-M_PI * double(v) * double(v) / (p.sigma_e0 * p.sigma_e0));
      z += pmf[size_t(v + p.e0_max)];
    }
    for (int64_t v = -p.e0_max; v <= p.e0_max; ++v)
      var += double(v) * double(v) * pmf[size_t(v + p.e0_max)] / z;
  }
  double se = std::sqrt(var * total_coords);
  CHECK(std::abs(sum) < 4 * se);
  // pmf ratio p(0)/p(e0_max) ~ exp(pi e0_max^2 / s^2)
  double expect_ratio = std::exp(M_PI * double(p.e0_max) * double(p.e0_max) /
                                 (p.sigma_e0 * p.sigma_e0));
  (void)expect_ratio;  // tails are too rare to estimate cheaply here; the
                       // acceptance suite checks the ratio at 10^6 draws
  CHECK(hist[size_t(p.e0_max)] > 0);  // center cell populated
}

TEST_CASE("eval/check preimage contracts") {
  auto p = LweParams::micro();
  Rng rng(7);
  auto f = keygen(KeyKind::F, p, rng);

  // b = 0 with zero noise: y = A^T x exactly
  BitVec x = rng.bits(p.w_pre);
  std::vector<int64_t> zero_noise(p.m_lwe, 0);
  ModVec y0 = eval_with_noise(p, f, false, x, zero_noise);
  ModVec ax = y0;  // by construction
  CHECK(check_preimage(p, f, false, x, y0));

  // honest samples always verify
  for (int i = 0; i < 100; ++i) {
    BitVec xi = rng.bits(p.w_pre);
    bool b = rng.next_bit();
    ModVec y = eval_sample(p, f, b, xi, rng);
    CHECK(check_preimage(p, f, b, xi, y));
  }

  // boundary: shift one coordinate by e0_max + 1
  ModVec shifted = y0;
  shifted[0] = (shifted[0] + uint64_t(p.e0_max + 1)) & (p.q - 1);
  CHECK_FALSE(check_preimage(p, f, false, x, shifted));
  ModVec edge = y0;
  edge[0] = (edge[0] + uint64_t(p.e0_max)) & (p.q - 1);
  CHECK(check_preimage(p, f, false, x, edge));
}

TEST_CASE("f-key claw: (0,x) and (1, x-s) share support") {
  auto p = LweParams::micro();
  Rng rng(8);
  auto f = keygen(KeyKind::F, p, rng);
  for (int i = 0; i < 100; ++i) {
    BitVec x = rng.bits(p.w_pre);
    ModVec xv = embed(p, x);
    ModVec xs(p.n_lwe);
    for (uint32_t d = 0; d < p.n_lwe; ++d)
      xs[d] = (xv[d] + p.q - f.s[d]) & (p.q - 1);
    BitVec x_shift = unembed(p, xs);
    ModVec y = eval_sample(p, f, false, x, rng);
    // at micro params e = 0, so both preimages always verify
    CHECK(check_preimage(p, f, false, x, y));
    CHECK(check_preimage(p, f, true, x_shift, y));
  }
}

TEST_CASE("recover_preimages equals brute-force support enumeration") {
  auto p = LweParams::micro();
  Rng rng(9);
  auto f = keygen(KeyKind::F, p, rng);
  auto g = keygen(KeyKind::G, p, rng);
  int f_two = 0;
  for (int trial = 0; trial < 40; ++trial) {
    BitVec x = rng.bits(p.w_pre);
    bool b = rng.next_bit();
    for (const auto* key : {&f, &g}) {
      ModVec y = eval_sample(p, *key, b, x, rng);
      auto fast = recover_preimages(p, key->A, key->v, key->R, y);
      auto brute = brute_preimages(p, key->A, key->v, y);
      std::set<std::pair<bool, std::string>> fast_set;
      for (const auto& pre : fast) fast_set.insert({pre.b, pre.x.to_string()});
      CHECK(fast_set == brute);
      if (key == &f && fast.size() == 2) ++f_two;
      if (key == &g) CHECK(fast.size() == 1);
    }
  }
  CHECK(f_two == 40);  // e = 0 at micro: the claw always exists

  // g keys: single preimage for every honest sample
  for (int trial = 0; trial < 100; ++trial) {
    BitVec x = rng.bits(p.w_pre);
    bool b = rng.next_bit();
    ModVec y = eval_sample(p, g, b, x, rng);
    auto pre = recover_preimages(p, g.A, g.v, g.R, y);
    REQUIRE(pre.size() == 1);
    CHECK(pre[0].b == b);
    CHECK(pre[0].x == x);
  }
}

TEST_CASE("g-key injectivity at micro params") {
  auto p = LweParams::micro();
  Rng rng(10);
  auto g = keygen(KeyKind::G, p, rng);
  // For a sample of domain points, the center y has exactly one accepting
  // preimage over the whole domain.
  for (int trial = 0; trial < 60; ++trial) {
    BitVec x = rng.bits(p.w_pre);
    bool b = rng.next_bit();
    std::vector<int64_t> zero(p.m_lwe, 0);
    ModVec y = eval_with_noise(p, g, b, x, zero);
    auto brute = brute_preimages(p, g.A, g.v, y);
    CHECK(brute.size() == 1);
  }
}

TEST_CASE("two-to-one overlap distance shrinks with planted error") {
  auto p = LweParams::demo();
  Rng rng(11);
  // With larger ||e|| the preimage pair's images drift apart; measure the
  // failure rate of claw recovery as a proxy for statistical distance.
  double prev_fail = -1;
  for (int64_t e_inf : {int64_t(0), p.e0_max / 2, p.e0_max}) {
    auto key = keygen_with_error(p, e_inf, rng);
    int missing = 0;
    const int trials = 300;
    for (int i = 0; i < trials; ++i) {
      BitVec x = rng.bits(p.w_pre);
      ModVec y = eval_sample(p, key, false, x, rng);
      auto pre = recover_preimages(p, key.A, key.v, key.R, y);
      if (pre.size() < 2) ++missing;
    }
    double fail = double(missing) / trials;
    CHECK(fail >= prev_fail - 0.05);
    prev_fail = fail;
  }
}

namespace {

std::vector<uint8_t> from_hex(const std::string& hex) {
  std::vector<uint8_t> out;
  for (size_t i = 0; i + 1 < hex.size(); i += 2)
    out.push_back(uint8_t(std::stoul(hex.substr(i, 2), nullptr, 16)));
  return out;
}

}  // namespace

TEST_CASE("serialization round trip and frozen fixture") {
  auto p = LweParams::micro();
  Rng rng(12);
  auto key = keygen(KeyKind::F, p, rng);
  auto bytes = serialize_key(p, key.A, key.v);
  auto back = deserialize_key(p, bytes);
  CHECK(back.A.data == key.A.data);
  CHECK(back.v == key.v);
  auto tbytes = serialize_trapdoor(key.R);
  auto tback = deserialize_trapdoor(tbytes);
  CHECK(tback.data == key.R.data);
  // stable header
  CHECK(bytes[0] == 1);
  CHECK_THROWS_AS(deserialize_key(p, std::vector<uint8_t>{9, 0}), std::invalid_argument);

  // frozen corpus fixture: a seed-12 micro key must serialize bit-exactly
  std::ifstream fixture("fixtures/etcff_key_micro.hex");
  REQUIRE(fixture.good());
  std::string key_hex, trap_hex;
  std::getline(fixture, key_hex);
  std::getline(fixture, trap_hex);
  CHECK(bytes == from_hex(key_hex));
  CHECK(tbytes == from_hex(trap_hex));
}

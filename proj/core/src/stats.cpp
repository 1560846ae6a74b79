#include "cvzk/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cvzk::stats {

Interval wilson(uint64_t successes, uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  double n = double(trials);
  double p = double(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = p + z2 / (2.0 * n);
  double margin = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {(center - margin) / denom, (center + margin) / denom};
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

double chi_square_pvalue(double chi2, size_t dof) {
  if (dof == 0) return 1.0;
  if (chi2 <= 0.0) return 1.0;
  return gamma_q(double(dof) / 2.0, chi2 / 2.0);
}

double chi_square_gof(const std::vector<uint64_t>& observed,
                      const std::vector<double>& expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("chi_square_gof: size mismatch");
  double chi2 = 0.0;
  size_t dof = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    double diff = double(observed[i]) - expected[i];
    chi2 += diff * diff / expected[i];
    ++dof;
  }
  if (dof <= 1) return 1.0;
  return chi_square_pvalue(chi2, dof - 1);
}

double chi_square_two_sample(const std::vector<uint64_t>& a,
                             const std::vector<uint64_t>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("chi_square_two_sample: size mismatch");
  double na = 0, nb = 0;
  for (auto v : a) na += double(v);
  for (auto v : b) nb += double(v);
  if (na == 0 || nb == 0) return 1.0;
  double chi2 = 0.0;
  size_t dof = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    double tot = double(a[i]) + double(b[i]);
    if (tot == 0) continue;
    double ea = tot * na / (na + nb);
    double eb = tot * nb / (na + nb);
    double da = double(a[i]) - ea;
    double db = double(b[i]) - eb;
    chi2 += da * da / ea + db * db / eb;
    ++dof;
  }
  if (dof <= 1) return 1.0;
  return chi_square_pvalue(chi2, dof - 1);
}

double fisher_aggregate(const std::vector<double>& pvalues) {
  if (pvalues.empty()) return 1.0;
  double stat = 0.0;
  for (double p : pvalues) {
    double pc = std::max(p, 1e-300);
    stat += -2.0 * std::log(pc);
  }
  return chi_square_pvalue(stat, 2 * pvalues.size());
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv_distance: size mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < p.size(); ++i) acc += std::fabs(p[i] - q[i]);
  return acc / 2.0;
}

}  // namespace cvzk::stats

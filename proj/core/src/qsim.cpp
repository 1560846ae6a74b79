#include "cvzk/qsim.hpp"

#include <algorithm>
#include <cmath>

namespace cvzk::qsim {

namespace {

void check_qubits(uint32_t n) {
  if (n > kMaxQubits)
    throw TooManyQubits("dense simulation capped at " + std::to_string(kMaxQubits) +
                        " qubits, got " + std::to_string(n));
}

Cplx label_amp(QubitLabel l, bool bit) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  switch (l) {
    case QubitLabel::Zero: return bit ? 0.0 : 1.0;
    case QubitLabel::One: return bit ? 1.0 : 0.0;
    case QubitLabel::Plus: return inv_sqrt2;
    case QubitLabel::Minus: return bit ? -inv_sqrt2 : inv_sqrt2;
  }
  return 0.0;
}

}  // namespace

StateVector StateVector::basis(uint32_t n, uint64_t index) {
  check_qubits(n);
  StateVector s;
  s.n = n;
  s.amplitudes = CVec::Zero(int64_t(1) << n);
  s.amplitudes[Eigen::Index(index)] = 1.0;
  return s;
}

StateVector StateVector::from_labels(const std::vector<QubitLabel>& labels) {
  uint32_t n = uint32_t(labels.size());
  check_qubits(n);
  StateVector s;
  s.n = n;
  int64_t dim = int64_t(1) << n;
  s.amplitudes = CVec::Ones(dim);
  for (int64_t x = 0; x < dim; ++x) {
    Cplx amp = 1.0;
    for (uint32_t q = 0; q < n; ++q) amp *= label_amp(labels[q], (x >> q) & 1);
    s.amplitudes[x] = amp;
  }
  return s;
}

PauliProjectorSet make_projectors(uint32_t N, const std::vector<BitVec>& d0,
                                  const std::vector<BitVec>& d1) {
  check_qubits(N);
  size_t dim = size_t(1) << N;
  PauliProjectorSet p;
  p.N = N;
  p.pi0.assign(dim, 0);
  p.pi1.assign(dim, 0);
  p.delta0.assign(dim, 0);
  p.delta1.assign(dim, 0);
  for (const auto& w : d0) p.pi0[w.chunk_u64(0, N)] = 1;
  for (const auto& w : d1) p.pi1[w.chunk_u64(0, N)] = 1;
  for (size_t x = 0; x < dim; ++x) {
    bool odd = std::popcount(x) & 1;
    (odd ? p.delta1 : p.delta0)[x] = 1;
  }
  return p;
}

Eigen::MatrixXd hamiltonian_matrix(const xz::XZHamiltonianInstance& H) {
  check_qubits(H.n());
  int64_t dim = int64_t(1) << H.n();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& term : H.terms()) {
    double w = rat_to_double(term.weight);
    // P|x> = sign * |x ^ flip>: X flips the bit, Z contributes (-1)^bit.
    uint64_t flip = 0;
    uint64_t zmask = 0;
    for (const auto& p : term.supports) {
      if (p.op == xz::Pauli::X) flip |= (uint64_t(1) << p.qubit);
      else zmask |= (uint64_t(1) << p.qubit);
    }
    for (int64_t x = 0; x < dim; ++x) {
      double sgn = (std::popcount(uint64_t(x) & zmask) & 1) ? -1.0 : 1.0;
      M(x ^ int64_t(flip), x) += w * sgn;
    }
  }
  return M;
}

std::pair<StateVector, double> ground_state(const xz::XZHamiltonianInstance& H) {
  Eigen::MatrixXd M = hamiltonian_matrix(H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  StateVector s;
  s.n = H.n();
  s.amplitudes = solver.eigenvectors().col(0).cast<Cplx>();
  return {std::move(s), solver.eigenvalues()[0]};
}

namespace {

void apply_hadamard(CVec& amps, uint32_t qubit) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  int64_t stride = int64_t(1) << qubit;
  int64_t dim = amps.size();
  for (int64_t base = 0; base < dim; base += 2 * stride) {
    for (int64_t i = base; i < base + stride; ++i) {
      Cplx a = amps[i];
      Cplx b = amps[i + stride];
      amps[i] = (a + b) * inv_sqrt2;
      amps[i + stride] = (a - b) * inv_sqrt2;
    }
  }
}

}  // namespace

BitVec sample_measurements(const StateVector& state, const std::vector<Basis>& bases,
                           Rng& rng) {
  if (bases.size() != state.n) throw DimensionMismatch("bases length != qubit count");
  CVec amps = state.amplitudes;
  for (uint32_t q = 0; q < state.n; ++q)
    if (bases[q] == Basis::X) apply_hadamard(amps, q);
  // Exact joint sampling: one uniform draw against the cumulative of |amp|^2.
  double total = amps.squaredNorm();
  double u = rng.next_unit() * total;
  double acc = 0.0;
  int64_t dim = amps.size();
  int64_t picked = dim - 1;
  for (int64_t x = 0; x < dim; ++x) {
    acc += std::norm(amps[x]);
    if (u < acc) {
      picked = x;
      break;
    }
  }
  BitVec out(state.n);
  for (uint32_t q = 0; q < state.n; ++q) out.set(q, (picked >> q) & 1);
  return out;
}

BitVec sample_measurements(const std::vector<QubitLabel>& labels,
                           const std::vector<Basis>& bases, Rng& rng) {
  if (bases.size() != labels.size()) throw DimensionMismatch("bases length != label count");
  BitVec out(labels.size());
  for (size_t q = 0; q < labels.size(); ++q) {
    QubitLabel l = labels[q];
    if (bases[q] == Basis::X) l = hadamard_label(l);
    switch (l) {
      case QubitLabel::Zero: out.set(q, false); break;
      case QubitLabel::One: out.set(q, true); break;
      default: out.set(q, rng.next_bit()); break;
    }
  }
  return out;
}

namespace {

// Pauli-tensor overlaps <P^{(x)N}, sigma> for P in {I,X,Y,Z}.
struct PauliOverlaps {
  Cplx i, x, y, z;
};

PauliOverlaps overlaps(const CMat& sigma, uint32_t N) {
  int64_t dim = int64_t(1) << N;
  if (sigma.rows() != dim || sigma.cols() != dim)
    throw DimensionMismatch("sigma dimension != 2^N");
  PauliOverlaps o{0, 0, 0, 0};
  const Cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int64_t v = 0; v < dim; ++v) {
    int64_t vb = (dim - 1) ^ v;  // bitwise complement within N bits
    int pop = std::popcount(uint64_t(v));
    o.i += sigma(v, v);
    o.z += double((pop & 1) ? -1 : 1) * sigma(v, v);
    // Tr(X^N sigma) = sum_v <v|X^N|vb> sigma(vb, v) = sum_v sigma(vb, v).
    o.x += sigma(vb, v);
    // <v| Y^N |vb> = i^N * (-1)^{popcount(vb)}.
    Cplx phase = kIPow[N % 4] * double(((N - pop) & 1) ? -1 : 1);
    o.y += phase * sigma(vb, v);
  }
  return o;
}

}  // namespace

CMat xi_channel(const CMat& sigma, uint32_t N) {
  check_qubits(N);
  PauliOverlaps o = overlaps(sigma, N);
  CMat out(2, 2);
  const Cplx iunit(0, 1);
  // (tI*I + tX*X + tY*Y + tZ*Z) / 2
  out(0, 0) = (o.i + o.z) / 2.0;
  out(1, 1) = (o.i - o.z) / 2.0;
  out(0, 1) = (o.x - iunit * o.y) / 2.0;
  out(1, 0) = (o.x + iunit * o.y) / 2.0;
  return out;
}

CMat xi_adjoint(const CMat& tau, uint32_t N) {
  check_qubits(N);
  if (tau.rows() != 2 || tau.cols() != 2) throw DimensionMismatch("tau must be 2x2");
  const Cplx iunit(0, 1);
  Cplx ti = tau(0, 0) + tau(1, 1);
  Cplx tz = tau(0, 0) - tau(1, 1);
  Cplx tx = tau(0, 1) + tau(1, 0);
  Cplx ty = iunit * (tau(0, 1) - tau(1, 0));  // Tr(Y tau)
  int64_t dim = int64_t(1) << N;
  const Cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  CMat out = CMat::Zero(dim, dim);
  for (int64_t v = 0; v < dim; ++v) {
    int64_t vb = (dim - 1) ^ v;
    int pop = std::popcount(uint64_t(v));
    out(v, v) += (ti + double((pop & 1) ? -1 : 1) * tz) / 2.0;
    // X^N and Y^N contribute on the anti-diagonal: (Y^N)[vb,v] = i^N (-1)^{|v|}.
    Cplx yphase = kIPow[N % 4] * double((pop & 1) ? -1 : 1);
    out(vb, v) += (tx + ty * yphase) / 2.0;
  }
  return out;
}

Eigen::MatrixXd hadamard_tensor(uint32_t N) {
  check_qubits(N);
  int64_t dim = int64_t(1) << N;
  double scale = 1.0 / std::sqrt(double(dim));
  Eigen::MatrixXd H(dim, dim);
  for (int64_t x = 0; x < dim; ++x)
    for (int64_t y = 0; y < dim; ++y)
      H(x, y) = (std::popcount(uint64_t(x) & uint64_t(y)) & 1) ? -scale : scale;
  return H;
}

StateVector logical_state(QubitLabel label, uint32_t N, const std::vector<BitVec>& d0,
                          const std::vector<BitVec>& d1) {
  check_qubits(N);
  StateVector s;
  s.n = N;
  s.amplitudes = CVec::Zero(int64_t(1) << N);
  auto add = [&](const std::vector<BitVec>& set, double coeff) {
    for (const auto& w : set) s.amplitudes[Eigen::Index(w.chunk_u64(0, N))] += coeff;
  };
  switch (label) {
    case QubitLabel::Zero: add(d0, 1.0); break;
    case QubitLabel::One: add(d1, 1.0); break;
    case QubitLabel::Plus: add(d0, 1.0); add(d1, 1.0); break;
    case QubitLabel::Minus: add(d0, 1.0); add(d1, -1.0); break;
  }
  s.amplitudes.normalize();
  return s;
}

CMat decode_M(const EncodedOneQubit& encoded) {
  // Steps 1 and 2 of M (re-apply the pad, un-permute) cancel exactly against
  // the encoding, and step 3 drops the trap half, so only Xi_N remains.
  return xi_channel(encoded.code, encoded.N);
}

namespace {

CMat permute_qubits(const CMat& rho, const std::vector<uint32_t>& perm) {
  uint32_t n = uint32_t(perm.size());
  int64_t dim = int64_t(1) << n;
  if (rho.rows() != dim) throw DimensionMismatch("rho dimension != 2^(2N)");
  auto map_index = [&](int64_t x) {
    int64_t y = 0;
    for (uint32_t p = 0; p < n; ++p)
      if ((x >> p) & 1) y |= int64_t(1) << perm[p];
    return y;
  };
  CMat out = CMat::Zero(dim, dim);
  for (int64_t r = 0; r < dim; ++r)
    for (int64_t c = 0; c < dim; ++c) out(map_index(r), map_index(c)) = rho(r, c);
  return out;
}

CMat apply_pauli_pad(const CMat& rho, const BitVec& a, const BitVec& b) {
  uint32_t n = uint32_t(a.size());
  int64_t dim = int64_t(1) << n;
  uint64_t xmask = 0;
  for (uint32_t q = 0; q < n; ++q)
    if (a.get(q)) xmask |= uint64_t(1) << q;
  CMat out(dim, dim);
  auto zsign = [&](int64_t x) {
    int c = 0;
    for (uint32_t q = 0; q < n; ++q)
      if (b.get(q) && ((x >> q) & 1)) ++c;
    return (c & 1) ? -1.0 : 1.0;
  };
  for (int64_t r = 0; r < dim; ++r)
    for (int64_t c = 0; c < dim; ++c)
      out(r ^ int64_t(xmask), c ^ int64_t(xmask)) = zsign(r) * zsign(c) * rho(r, c);
  return out;
}

CMat trace_out_upper(const CMat& rho, uint32_t keep, uint32_t drop) {
  int64_t kd = int64_t(1) << keep;
  int64_t dd = int64_t(1) << drop;
  CMat out = CMat::Zero(kd, kd);
  for (int64_t r = 0; r < kd; ++r)
    for (int64_t c = 0; c < kd; ++c)
      for (int64_t t = 0; t < dd; ++t) out(r, c) += rho(r + (t << keep), c + (t << keep));
  return out;
}

}  // namespace

CMat decode_M_dense(const CMat& rho, uint32_t N, const std::vector<uint32_t>& permutation,
                    const BitVec& pad_a, const BitVec& pad_b) {
  check_qubits(2 * N);
  if (permutation.size() != 2 * N || pad_a.size() != 2 * N || pad_b.size() != 2 * N)
    throw DimensionMismatch("pads/permutation must cover 2N positions");
  CMat unpadded = apply_pauli_pad(rho, pad_a, pad_b);
  // Undo pi: position pi(p) returns to p.
  std::vector<uint32_t> inv(2 * N);
  for (uint32_t p = 0; p < 2 * N; ++p) inv[permutation[p]] = p;
  CMat unpermuted = permute_qubits(unpadded, inv);
  CMat code = trace_out_upper(unpermuted, N, N);
  return xi_channel(code, N);
}

CMat kron(const CMat& low, const CMat& high) {
  CMat out(low.rows() * high.rows(), low.cols() * high.cols());
  for (Eigen::Index hr = 0; hr < high.rows(); ++hr)
    for (Eigen::Index hc = 0; hc < high.cols(); ++hc)
      out.block(hr * low.rows(), hc * low.cols(), low.rows(), low.cols()) =
          high(hr, hc) * low;
  return out;
}

CMat encode_block_dense(const CMat& code, const std::vector<QubitLabel>& traps,
                        const std::vector<uint32_t>& permutation, const BitVec& pad_a,
                        const BitVec& pad_b) {
  uint32_t N = uint32_t(traps.size());
  check_qubits(2 * N);
  StateVector trap_state = StateVector::from_labels(traps);
  CMat trap_dm = trap_state.amplitudes * trap_state.amplitudes.adjoint();
  CMat joint = kron(code, trap_dm);  // code on qubits 0..N-1, traps above
  CMat permuted = permute_qubits(joint, permutation);
  return apply_pauli_pad(permuted, pad_a, pad_b);
}

SoundnessMax soundness_bound_max() {
  auto f = [](double pt, double ph) {
    return 0.5 * (1.0 - pt + (1.0 - ph) * (ph + std::sqrt(pt)));
  };
  SoundnessMax best{0, 0, -1};
  int grid = 400;
  for (int i = 0; i <= grid; ++i)
    for (int j = 0; j <= grid; ++j) {
      double pt = double(i) / grid, ph = double(j) / grid;
      double v = f(pt, ph);
      if (v > best.value) best = {pt, ph, v};
    }
  // Local refinement by coordinate descent with shrinking step.
  double step = 1.0 / grid;
  while (step > 1e-10) {
    bool improved = false;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) {
        double pt = std::clamp(best.p_t + dx * step, 0.0, 1.0);
        double ph = std::clamp(best.p_h + dy * step, 0.0, 1.0);
        double v = f(pt, ph);
        if (v > best.value) {
          best = {pt, ph, v};
          improved = true;
        }
      }
    if (!improved) step /= 2;
  }
  return best;
}

StateVector random_state(uint32_t n, Rng& rng) {
  check_qubits(n);
  StateVector s;
  s.n = n;
  int64_t dim = int64_t(1) << n;
  s.amplitudes = CVec(dim);
  for (int64_t x = 0; x < dim; ++x) {
    // Box-Muller from the deterministic stream.
    double u1 = std::max(rng.next_unit(), 1e-300);
    double u2 = rng.next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    s.amplitudes[x] = Cplx(r * std::cos(2 * M_PI * u2), r * std::sin(2 * M_PI * u2));
  }
  s.amplitudes.normalize();
  return s;
}

CMat random_density(uint32_t n, Rng& rng) {
  check_qubits(n);
  int64_t dim = int64_t(1) << n;
  CMat G(dim, dim);
  for (int64_t r = 0; r < dim; ++r)
    for (int64_t c = 0; c < dim; ++c) {
      double u1 = std::max(rng.next_unit(), 1e-300);
      double u2 = rng.next_unit();
      double rad = std::sqrt(-2.0 * std::log(u1));
      G(r, c) = Cplx(rad * std::cos(2 * M_PI * u2), rad * std::sin(2 * M_PI * u2));
    }
  CMat rho = G * G.adjoint();
  rho /= rho.trace();
  return rho;
}

}  // namespace cvzk::qsim

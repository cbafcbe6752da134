#include "qfirob/expansion.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "qfirob/divided_difference.hpp"
#include "qfirob/error.hpp"
#include "qfirob/qfi.hpp"

namespace qfirob {

namespace {

// Dividing an S difference by the gap w amplifies rounding by ~1 / (|w| t),
// so only pairs below this bound need explicit kernel sums.
constexpr double kPartnerGap = 1e-3;

// Duhamel kernel of one split of an order-n chain. xs are the energies along
// the left chain (D end first, ending at i) and ys along the right chain
// (ending at j): a sum of exp divided differences over the monotone lattice
// paths through the gaps x_a - y_b. It is a divided difference in each set
// separately, with K[S+p+q] = -i (K[S+p] - K[S+q]) / (E_p - E_q).
Complex chain_kernel(std::span<const double> xs, std::span<const double> ys,
                     double t) {
  const int left = static_cast<int>(xs.size()) - 1;
  const int right = static_cast<int>(ys.size()) - 1;
  const int n = left + right;
  std::array<Complex, 8> nodes{};
  Complex sum = 0.0;
  for (unsigned m = 0; m < (1u << n); ++m) {
    if (std::popcount(m) != left) continue;
    std::size_t x = 0, y = 0;
    nodes[0] = kI * (xs[0] - ys[0]);
    for (int step = 0; step < n; ++step) {
      if (m & (1u << step)) {
        ++x;
      } else {
        ++y;
      }
      nodes[static_cast<std::size_t>(step + 1)] = kI * (xs[x] - ys[y]);
    }
    nodes[static_cast<std::size_t>(n + 1)] = 0.0;
    sum += exp_divided_difference(
        std::span(nodes.data(), static_cast<std::size_t>(n + 2)), t);
  }
  return right % 2 ? -sum : sum;
}

Complex chain_kernel(std::initializer_list<double> xs,
                     std::initializer_list<double> ys, double t) {
  return chain_kernel(std::span(xs.begin(), xs.size()),
                      std::span(ys.begin(), ys.size()), t);
}

// Clean-spectrum data shared by every term of one expansion.
struct EigenContext {
  SpectralDecomposition spectrum;
  KernelEvaluator ev;
  Index d;
  CMatrix T;
  std::vector<Complex> S;  // S[(i d + j) d + k]
  CMatrix inv_w;           // 1 / w_ik for separated pairs, else 0
  std::vector<std::vector<Index>> partners;  // k with |w_ik| t < kPartnerGap

  EigenContext(SpectralDecomposition s, double t)
      : spectrum(std::move(s)), ev(spectrum.eigenvalues, t), d(spectrum.dim()) {
    T.resize(d, d);
    inv_w = CMatrix::Zero(d, d);
    partners.resize(static_cast<std::size_t>(d));
    S.resize(static_cast<std::size_t>(d * d * d));
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        T(i, j) = ev.T(i, j);
        if (ev.coincide(i, j) || std::abs(ev.w(i, j)) * t < kPartnerGap) {
          partners[static_cast<std::size_t>(i)].push_back(j);
        } else {
          inv_w(i, j) = 1.0 / ev.w(i, j);
        }
        for (Index k = 0; k < d; ++k) S[idx(i, j, k)] = ev.S(i, j, k);
      }
    }
  }

  std::size_t idx(Index i, Index j, Index k) const {
    return static_cast<std::size_t>((i * d + j) * d + k);
  }
  Complex s(Index i, Index j, Index k) const { return S[idx(i, j, k)]; }

  // Kernel values on near pairs, shared by every disorder term. For partner
  // slot p of i (k = partners[i][p]) and all (j, l):
  //   near_r[i][(p d + j) d + l]    = R_ijkl
  //   near_rbar[i][(p d + j) d + l] = Rbar_ijkl
  // and for partner slot p of j (l = partners[j][p]) and all (i, k):
  //   near_rt[j][(p d + i) d + k]   = R_lijk
  std::vector<std::vector<Complex>> near_r, near_rbar, near_rt;

  void cache_near_kernels() {
    near_r.resize(static_cast<std::size_t>(d));
    near_rbar.resize(static_cast<std::size_t>(d));
    near_rt.resize(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) {
      const auto& ps = partners[static_cast<std::size_t>(i)];
      auto& r = near_r[static_cast<std::size_t>(i)];
      auto& rb = near_rbar[static_cast<std::size_t>(i)];
      auto& rt = near_rt[static_cast<std::size_t>(i)];
      r.resize(ps.size() * static_cast<std::size_t>(d * d));
      rb.resize(r.size());
      rt.resize(r.size());
      for (std::size_t p = 0; p < ps.size(); ++p) {
        for (Index a = 0; a < d; ++a) {
          for (Index b = 0; b < d; ++b) {
            const std::size_t at = (p * static_cast<std::size_t>(d) +
                                    static_cast<std::size_t>(a)) *
                                       static_cast<std::size_t>(d) +
                                   static_cast<std::size_t>(b);
            r[at] = ev.R(i, a, ps[p], b);
            rb[at] = ev.Rbar(i, a, ps[p], b);
            rt[at] = ev.R(ps[p], a, i, b);
          }
        }
      }
    }
  }
};

CMatrix zeroth_order(const EigenContext& c, const CMatrix& D) {
  return D.cwiseProduct(c.T);
}

// [G1]_ij = sum_k N_ik D_kj S_ijk + D_ik N_kj conj(S_jik)
CMatrix first_order(const EigenContext& c, const CMatrix& D, const CMatrix& N) {
  const Index d = c.d;
  CMatrix g(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      Complex acc = 0.0;
      for (Index k = 0; k < d; ++k) {
        acc += N(i, k) * D(k, j) * c.s(i, j, k) +
               D(i, k) * N(k, j) * std::conj(c.s(j, i, k));
      }
      g(i, j) = acc;
    }
  }
  return g;
}

// [G2]_ij = sum_kl N_ik N_kl D_lj R_ijkl + N_ik D_kl N_lj conj(Rbar_ijkl)
//         + D_ik N_kl N_lj conj(R_lijk).
// For well-separated (i, k) R and Rbar are differences of S kernels divided by
// the gap, which splits each sum into products of d x d matrices with one
// S-weighted index; near pairs use the kernels directly.
CMatrix second_order_factored(const EigenContext& c, const CMatrix& D,
                              const CMatrix& N) {
  const Index d = c.d;
  const CMatrix NW = N.cwiseProduct(c.inv_w);
  const CMatrix P = NW * N;
  const CMatrix Pd = NW * D;
  const CMatrix Y = N * NW;

  CMatrix Q(d, d), Qd(d, d), X(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index k = 0; k < d; ++k) {
      Complex q = 0.0, qd = 0.0;
      for (Index l = 0; l < d; ++l) {
        q += N(k, l) * D(l, j) * c.s(k, j, l);
        qd += D(k, l) * N(l, j) * std::conj(c.s(l, k, j));
      }
      Q(k, j) = q;
      Qd(k, j) = qd;
    }
  }
  for (Index i = 0; i < d; ++i) {
    for (Index l = 0; l < d; ++l) {
      Complex x = 0.0;
      for (Index k = 0; k < d; ++k) x += D(i, k) * N(k, l) * std::conj(c.s(l, i, k));
      X(i, l) = x;
    }
  }

  CMatrix g = -(NW * Q) - (NW * Qd) + X * NW;
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      Complex acc = 0.0;
      for (Index l = 0; l < d; ++l) {
        acc += P(i, l) * D(l, j) * c.s(i, j, l) +
               Pd(i, l) * N(l, j) * std::conj(c.s(l, i, j));
      }
      for (Index k = 0; k < d; ++k) {
        acc -= D(i, k) * std::conj(c.s(j, i, k)) * Y(k, j);
      }
      const auto& pi = c.partners[static_cast<std::size_t>(i)];
      for (std::size_t p = 0; p < pi.size(); ++p) {
        const Index k = pi[p];
        const Complex* r = &c.near_r[static_cast<std::size_t>(i)][(p * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(d)];
        const Complex* rb = &c.near_rbar[static_cast<std::size_t>(i)][(p * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)) * static_cast<std::size_t>(d)];
        for (Index l = 0; l < d; ++l) {
          acc += N(i, k) * (N(k, l) * D(l, j) * r[l] +
                            D(k, l) * N(l, j) * std::conj(rb[l]));
        }
      }
      const auto& pj = c.partners[static_cast<std::size_t>(j)];
      for (std::size_t p = 0; p < pj.size(); ++p) {
        const Index l = pj[p];
        const Complex* rt = &c.near_rt[static_cast<std::size_t>(j)][(p * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)) * static_cast<std::size_t>(d)];
        for (Index k = 0; k < d; ++k) {
          acc += D(i, k) * N(k, l) * N(l, j) * std::conj(rt[k]);
        }
      }
      g(i, j) += acc;
    }
  }
  return g;
}

CMatrix second_order_materialized(const KernelTensors& k, const CMatrix& D,
                                  const CMatrix& N) {
  const Index d = k.dim;
  CMatrix g(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      Complex acc = 0.0;
      for (Index a = 0; a < d; ++a) {
        for (Index b = 0; b < d; ++b) {
          acc += N(i, a) * N(a, b) * D(b, j) * k.r(i, j, a, b) +
                 N(i, a) * D(a, b) * N(b, j) * std::conj(k.rbar(i, j, a, b)) +
                 D(i, a) * N(a, b) * N(b, j) * std::conj(k.r(b, i, j, a));
        }
      }
      g(i, j) = acc;
    }
  }
  return g;
}

CMatrix first_order_materialized(const KernelTensors& k, const CMatrix& D,
                                 const CMatrix& N) {
  const Index d = k.dim;
  CMatrix g(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      Complex acc = 0.0;
      for (Index a = 0; a < d; ++a) {
        acc += N(i, a) * D(a, j) * k.s(i, j, a) +
               D(i, a) * N(a, j) * std::conj(k.s(j, i, a));
      }
      g(i, j) = acc;
    }
  }
  return g;
}

// [G3]_ij = i^3 sum over the four placements of D in a chain of three N's,
// each weighted by a five-energy chain kernel. Splitting the kernel across
// one adjacent pair of summed indices (p, q) with p, q separated leaves
// four-energy kernels of three shapes and moves the dropped index into a
// matrix product with N_pq / (E_p - E_q); near pairs keep the full kernel.
CMatrix third_order_factored(const EigenContext& c, const CMatrix& D,
                             const CMatrix& N) {
  const Index d = c.d;
  const RVector& e = c.spectrum.eigenvalues;
  const double t = c.ev.time();
  const CMatrix NW = N.cwiseProduct(c.inv_w);
  const CMatrix NWD = NW * D, NNW = N * NW, NWN = NW * N, DNW = D * NW;

  CMatrix g(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      Complex split = 0.0;
      for (Index u = 0; u < d; ++u) {
        for (Index v = 0; v < d; ++v) {
          const Complex w1 = N(i, u) * (N(u, v) * NWD(v, j) - NNW(u, v) * D(v, j));
          const Complex w2 = (N(i, u) * (NWD(u, v) - DNW(u, v)) - NNW(i, u) * D(u, v)) * N(v, j) +
                             N(i, u) * D(u, v) * NWN(v, j);
          const Complex w3 = (D(i, u) * NWN(u, v) - DNW(i, u) * N(u, v)) * N(v, j);
          if (w1 != 0.0) split += w1 * chain_kernel({e(v), e(u), e(i)}, {e(j)}, t);
          if (w2 != 0.0) split += w2 * chain_kernel({e(u), e(i)}, {e(v), e(j)}, t);
          if (w3 != 0.0) split += w3 * chain_kernel({e(i)}, {e(u), e(v), e(j)}, t);
        }
      }
      Complex near = 0.0;
      for (Index p = 0; p < d; ++p) {
        for (Index q : c.partners[static_cast<std::size_t>(p)]) {
          const Complex npq = N(p, q);
          if (npq == 0.0) continue;
          for (Index r = 0; r < d; ++r) {
            const Complex c30 = N(i, r) * N(r, p) * D(q, j);
            const Complex c21 = N(i, p) * D(q, r) * N(r, j);
            const Complex c12 = N(i, r) * D(r, p) * N(q, j);
            const Complex c03 = D(i, p) * N(q, r) * N(r, j);
            if (c30 != 0.0) near += npq * c30 * chain_kernel({e(q), e(p), e(r), e(i)}, {e(j)}, t);
            if (c21 != 0.0) near += npq * c21 * chain_kernel({e(q), e(p), e(i)}, {e(r), e(j)}, t);
            if (c12 != 0.0) near += npq * c12 * chain_kernel({e(r), e(i)}, {e(p), e(q), e(j)}, t);
            if (c03 != 0.0) near += npq * c03 * chain_kernel({e(i)}, {e(p), e(q), e(r), e(j)}, t);
          }
        }
      }
      // i^3 = -i, and each split carries -i.
      g(i, j) = -kI * (-kI * split + near);
    }
  }
  return g;
}

// Asymmetry is judged against max(|A|, scale) so that coefficients which
// vanish by cancellation are not rejected for their rounding noise.
HermitianMatrix to_working_basis(const SpectralDecomposition& s,
                                 const CMatrix& eigen, double scale) {
  const CMatrix a = s.from_eigenbasis(eigen);
  const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
  const double ref = std::max(a.cwiseAbs().maxCoeff(), scale);
  if (asym > 1e-9 * ref) {
    throw Error(ErrorKind::NonHermitianInput,
                "expansion coefficient asymmetry " + format_double(asym / ref));
  }
  return HermitianMatrix(0.5 * (a + a.adjoint()));
}

}  // namespace

CMatrix dyson_coefficient_eigen(const RVector& energies, const CMatrix& D,
                                const CMatrix& N, double t, int order) {
  if (order < 1 || order > 3) {
    throw Error(ErrorKind::UnsupportedOrder,
                "Dyson coefficient of order " + std::to_string(order));
  }
  const Index d = energies.size();
  const int n = order;
  CMatrix out = CMatrix::Zero(d, d);
  std::array<Index, 4> a{};  // left chain a_0 .. a_L, a_L = i
  std::array<Index, 4> b{};  // right chain b_0 .. b_R, b_R = j
  std::array<Index, 3> inner{};
  std::array<Complex, 5> nodes{};

  for (int left = 0; left <= n; ++left) {
    const int right = n - left;
    std::vector<unsigned> masks;
    for (unsigned m = 0; m < (1u << n); ++m) {
      if (std::popcount(m) == left) masks.push_back(m);
    }
    const double sign = (right % 2 == 0) ? 1.0 : -1.0;
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        a[static_cast<std::size_t>(left)] = i;
        b[static_cast<std::size_t>(right)] = j;
        inner.fill(0);
        while (true) {
          for (int x = 0; x < left; ++x) a[static_cast<std::size_t>(x)] = inner[static_cast<std::size_t>(x)];
          for (int y = 0; y < right; ++y) b[static_cast<std::size_t>(y)] = inner[static_cast<std::size_t>(left + y)];
          Complex coef = D(a[0], b[0]);
          for (int x = 1; x <= left; ++x) coef *= N(a[static_cast<std::size_t>(x)], a[static_cast<std::size_t>(x - 1)]);
          for (int y = 1; y <= right; ++y) coef *= N(b[static_cast<std::size_t>(y - 1)], b[static_cast<std::size_t>(y)]);
          if (coef != Complex(0.0)) {
            Complex kernel = 0.0;
            for (unsigned m : masks) {
              std::size_t x = 0, y = 0;
              nodes[0] = kI * (energies(a[0]) - energies(b[0]));
              for (int step = 0; step < n; ++step) {
                if (m & (1u << step)) {
                  ++x;
                } else {
                  ++y;
                }
                nodes[static_cast<std::size_t>(step + 1)] =
                    kI * (energies(a[x]) - energies(b[y]));
              }
              nodes[static_cast<std::size_t>(n + 1)] = 0.0;
              kernel += exp_divided_difference(
                  std::span(nodes.data(), static_cast<std::size_t>(n + 2)), t);
            }
            out(i, j) += sign * coef * kernel;
          }
          int pos = 0;
          while (pos < n && ++inner[static_cast<std::size_t>(pos)] == d) {
            inner[static_cast<std::size_t>(pos)] = 0;
            ++pos;
          }
          if (pos == n) break;
        }
      }
    }
  }
  Complex prefactor = 1.0;
  for (int k = 0; k < n; ++k) prefactor *= kI;
  return prefactor * out;
}

ExpansionTerms build_expansion(const HermitianMatrix& h0,
                               const HermitianMatrix& dtheta_h,
                               std::span<const HermitianMatrix> ops, double t,
                               int order, ContractionRoute route) {
  if (order != 2 && order != 3) {
    throw Error(ErrorKind::UnsupportedOrder,
                "expansion order " + std::to_string(order));
  }
  if (dtheta_h.dim() != h0.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "dtheta_h dim");
  }
  for (const auto& op : ops) {
    if (op.dim() != h0.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "disorder operator dim");
    }
  }
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidSpec, "time must be positive");

  EigenContext c(eigh(h0), t);
  if (route == ContractionRoute::factored && !ops.empty()) c.cache_near_kernels();
  const SpectralDecomposition& s = c.spectrum;
  std::optional<KernelTensors> tensors;
  if (route == ContractionRoute::materialized) tensors = build_kernels(s, t);

  const CMatrix D = s.to_eigenbasis(dtheta_h.matrix());
  ExpansionTerms out;
  out.time = t;
  const double d_scale = t * D.cwiseAbs().maxCoeff();
  out.g0 = to_working_basis(s, zeroth_order(c, D), d_scale);
  if (order == 3) out.g3.emplace();
  for (const auto& op : ops) {
    const CMatrix N = s.to_eigenbasis(op.matrix());
    const double n_scale = t * N.cwiseAbs().maxCoeff();
    const double s1 = d_scale * n_scale, s2 = s1 * n_scale;
    if (tensors) {
      out.g1.push_back(to_working_basis(s, first_order_materialized(*tensors, D, N), s1));
      out.g2.push_back(to_working_basis(s, second_order_materialized(*tensors, D, N), s2));
    } else {
      out.g1.push_back(to_working_basis(s, first_order(c, D, N), s1));
      out.g2.push_back(to_working_basis(s, second_order_factored(c, D, N), s2));
    }
    if (order == 3) {
      out.g3->push_back(s.from_eigenbasis(
          tensors ? dyson_coefficient_eigen(s.eigenvalues, D, N, t, 3)
                  : third_order_factored(c, D, N)));
    }
  }
  return out;
}

ExpansionTerms build_expansion(const DisorderedProbeSpec& spec, int order,
                               ContractionRoute route) {
  const auto ops = spec.term_operators();
  return build_expansion(clean_hamiltonian(spec), spec.dtheta_h(), ops,
                         spec.encoding_time(), order, route);
}

Complex PureStateFunctional::mean(const CMatrix& x) const {
  return braket(psi_, x);
}

Complex PureStateFunctional::product(const CMatrix& x, const CMatrix& y) const {
  if (x.rows() != psi_.dim() || y.rows() != psi_.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "expectation operand dims");
  }
  const CVector& v = psi_.amplitudes();
  return (x.adjoint() * v).dot(y * v);
}

namespace {

// Sums complex pieces and checks the imaginary residue against their scale.
class RealAccumulator {
 public:
  void add(Complex z) {
    sum_ += z;
    scale_ += std::abs(z);
  }
  double value(const char* what) const {
    if (std::abs(sum_.imag()) > 1e-9 * std::max(1.0, scale_)) {
      throw Error(ErrorKind::NonHermitianInput,
                  std::string(what) + " has imaginary residue " +
                      std::to_string(sum_.imag()));
    }
    return sum_.real();
  }

 private:
  Complex sum_ = 0.0;
  double scale_ = 0.0;
};

void require_term(const ExpansionTerms& terms, std::size_t n) {
  if (n >= terms.term_count()) {
    throw Error(ErrorKind::DimensionMismatch,
                "term index " + std::to_string(n) + " out of range");
  }
}

}  // namespace

double tilde_g1(const ExpansionTerms& terms, const ExpectationFunctional& f,
                std::size_t n) {
  require_term(terms, n);
  const CMatrix& g0 = terms.g0.matrix();
  const CMatrix& g1 = terms.g1[n].matrix();
  RealAccumulator acc;
  acc.add(f.product(g0, g1));
  acc.add(f.product(g1, g0));
  acc.add(-2.0 * f.mean(g0) * f.mean(g1));
  return acc.value("first-order variance coefficient");
}

double tilde_g2(const ExpansionTerms& terms, const ExpectationFunctional& f,
                std::size_t n) {
  require_term(terms, n);
  const CMatrix& g0 = terms.g0.matrix();
  const CMatrix& g1 = terms.g1[n].matrix();
  const CMatrix& g2 = terms.g2[n].matrix();
  const Complex m1 = f.mean(g1);
  RealAccumulator acc;
  acc.add(f.product(g1, g1));
  acc.add(f.product(g0, g2));
  acc.add(f.product(g2, g0));
  acc.add(-2.0 * f.mean(g0) * f.mean(g2));
  acc.add(-m1 * m1);
  return acc.value("second-order variance coefficient");
}

double tilde_g3(const ExpansionTerms& terms, const ExpectationFunctional& f,
                std::size_t n) {
  require_term(terms, n);
  if (!terms.g3) {
    throw Error(ErrorKind::MissingThirdOrder, "expansion built at order 2");
  }
  const CMatrix& g0 = terms.g0.matrix();
  const CMatrix& g1 = terms.g1[n].matrix();
  const CMatrix& g2 = terms.g2[n].matrix();
  const CMatrix& g3 = (*terms.g3)[n];
  RealAccumulator acc;
  acc.add(f.product(g0, g3));
  acc.add(f.product(g3, g0));
  acc.add(f.product(g1, g2));
  acc.add(f.product(g2, g1));
  acc.add(-2.0 * f.mean(g0) * f.mean(g3));
  acc.add(-2.0 * f.mean(g1) * f.mean(g2));
  return acc.value("third-order variance coefficient");
}

double tilde_g2(const ExpansionTerms& terms, const PureState& psi,
                std::size_t n) {
  return tilde_g2(terms, PureStateFunctional(psi), n);
}

std::string_view to_string(ProbeClass c) {
  switch (c) {
    case ProbeClass::DIP:
      return "DIP";
    case ProbeClass::DSP:
      return "DSP";
    case ProbeClass::DEP:
      return "DEP";
  }
  return "DIP";
}

RobustnessReport make_report(const ExpansionTerms& terms,
                             const ExpectationFunctional& f) {
  const CMatrix& g0 = terms.g0.matrix();
  const Complex m0 = f.mean(g0);
  RealAccumulator var;
  var.add(f.product(g0, g0));
  var.add(-m0 * m0);
  RobustnessReport r;
  r.f0 = 4.0 * var.value("clean variance");
  if (!(r.f0 > kMinCleanQfi)) {
    throw Error(ErrorKind::ZeroCleanQfi,
                "clean QFI " + std::to_string(r.f0) + " <= 1e-14");
  }
  for (std::size_t n = 0; n < terms.term_count(); ++n) {
    r.c2_per_term.push_back(4.0 * tilde_g2(terms, f, n) / r.f0);
    r.c2_total += r.c2_per_term.back();
  }
  if (std::abs(r.c2_total) < kClassificationEps) {
    r.classification = ProbeClass::DIP;
  } else if (r.c2_total > 0.0) {
    r.classification = ProbeClass::DEP;
  } else {
    r.classification = ProbeClass::DSP;
    r.sigma_max = 1.0 / std::sqrt(std::abs(r.c2_total));
  }
  if (terms.g3) {
    r.c3_per_term.emplace();
    double c3 = 0.0;
    for (std::size_t n = 0; n < terms.term_count(); ++n) {
      r.c3_per_term->push_back(4.0 * tilde_g3(terms, f, n) / r.f0);
      c3 += r.c3_per_term->back();
    }
    r.c3_total = c3;
    if (r.classification != ProbeClass::DIP) r.c32 = c3 / r.c2_total;
  }
  return r;
}

RobustnessReport robustness_report(const DisorderedProbeSpec& spec, int order) {
  const ExpansionTerms terms = build_expansion(spec, order);
  return make_report(terms, PureStateFunctional(spec.initial_state()));
}

double predicted_marker(const RobustnessReport& report,
                        std::span<const double> sigmas,
                        std::optional<std::span<const double>> gammas) {
  const std::size_t n_terms = report.c2_per_term.size();
  if (sigmas.size() != n_terms) {
    throw Error(ErrorKind::LengthMismatch, "sigma vector length");
  }
  double g = 0.0;
  for (std::size_t n = 0; n < n_terms; ++n) {
    g += sigmas[n] * sigmas[n] * report.c2_per_term[n];
  }
  if (gammas) {
    if (!report.c3_per_term) {
      throw Error(ErrorKind::MissingThirdOrder,
                  "skewness supplied but report has no third-order data");
    }
    if (gammas->size() != n_terms) {
      throw Error(ErrorKind::LengthMismatch, "skewness vector length");
    }
    for (std::size_t n = 0; n < n_terms; ++n) {
      g += (*gammas)[n] * sigmas[n] * sigmas[n] * sigmas[n] *
           (*report.c3_per_term)[n];
    }
  }
  return g;
}

ResilienceOptimum optimize_resilience(
    const DisorderedProbeSpec& spec, const StateFamily& family,
    const std::vector<std::vector<double>>& grid) {
  if (grid.empty()) throw Error(ErrorKind::EmptyGrid, "no candidate states");
  const ExpansionTerms terms = build_expansion(spec, 2);
  std::vector<double> sigmas;
  for (const auto& term : spec.disorder_terms()) {
    sigmas.push_back(term.distribution.sigma());
  }
  std::optional<ResilienceOptimum> best;
  for (const auto& params : grid) {
    const PureState psi = family(params);
    RobustnessReport report;
    try {
      report = make_report(terms, PureStateFunctional(psi));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ZeroCleanQfi) continue;
      throw;
    }
    const double g = std::abs(predicted_marker(report, sigmas));
    if (!best || g < best->abs_marker) best = ResilienceOptimum{params, g};
  }
  if (!best) {
    throw Error(ErrorKind::ZeroCleanQfi, "every candidate has zero clean QFI");
  }
  return *best;
}

}  // namespace qfirob

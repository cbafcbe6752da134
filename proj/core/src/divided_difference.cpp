#include "qfirob/divided_difference.hpp"

#include <array>
#include <cmath>

#include "qfirob/error.hpp"

namespace qfirob {

namespace {

constexpr std::size_t kMaxNodes = 8;
using Nodes = std::array<Complex, kMaxNodes>;

// Nodes within radius 1/t of their centroid c: shifted Taylor series
//   f[z] = e^{ct} t^n sum_m h_m(u) / (n + m)!,  u = (z - c) t,
// with h_m the complete homogeneous symmetric polynomials.
Complex clustered(const Nodes& z, std::size_t count, Complex c, double t) {
  const std::size_t n = count - 1;
  Nodes u{};
  Nodes h{};
  double rho = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    u[j] = (z[j] - c) * t;
    h[j] = 1.0;
    rho = std::max(rho, std::abs(u[j]));
  }
  double inv_fact = 1.0;  // 1 / (n + m)!
  for (std::size_t k = 2; k <= n; ++k) inv_fact /= static_cast<double>(k);
  Complex sum = inv_fact;  // m = 0: h_0 = 1
  // |h_m(u) / (n + m)!| <= rho^m / (m! n!), which bounds the tail.
  double bound = 1.0;
  for (std::size_t k = 2; k <= n; ++k) bound /= static_cast<double>(k);
  for (std::size_t m = 1; m < 80; ++m) {
    h[0] *= u[0];
    for (std::size_t j = 1; j < count; ++j) h[j] = h[j - 1] + u[j] * h[j];
    inv_fact /= static_cast<double>(n + m);
    const Complex term = h[n] * inv_fact;
    sum += term;
    bound *= rho / static_cast<double>(m);
    if (bound * bound <= 1e-36 * std::norm(sum)) break;
  }
  double tn = 1.0;
  for (std::size_t k = 0; k < n; ++k) tn *= t;
  return std::exp(c * t) * tn * sum;
}

Complex divided_difference(const Nodes& z, std::size_t count, double t) {
  if (count == 1) return std::exp(z[0] * t);
  Complex c = 0.0;
  for (std::size_t j = 0; j < count; ++j) c += z[j];
  c /= static_cast<double>(count);
  double radius = 0.0;
  for (std::size_t j = 0; j < count; ++j) radius = std::max(radius, std::abs(z[j] - c));
  if (radius * t <= 1.0) return clustered(z, count, c, t);

  // Split on the farthest pair: f[S] = (f[S \ b] - f[S \ a]) / (z_a - z_b).
  std::size_t a = 0, b = 1;
  double widest = -1.0;
  for (std::size_t p = 0; p < count; ++p) {
    for (std::size_t q = p + 1; q < count; ++q) {
      if (std::abs(z[p] - z[q]) > widest) {
        widest = std::abs(z[p] - z[q]);
        a = p;
        b = q;
      }
    }
  }
  Nodes without_a{}, without_b{};
  std::size_t ia = 0, ib = 0;
  for (std::size_t j = 0; j < count; ++j) {
    if (j != a) without_a[ia++] = z[j];
    if (j != b) without_b[ib++] = z[j];
  }
  return (divided_difference(without_b, count - 1, t) -
          divided_difference(without_a, count - 1, t)) /
         (z[a] - z[b]);
}

}  // namespace

Complex exp_divided_difference(std::span<const Complex> nodes, double t) {
  const std::size_t m = nodes.size();
  if (m == 0 || m > kMaxNodes) {
    throw Error(ErrorKind::UnsupportedOrder, "divided difference node count");
  }
  // Single-linkage clusters at scale 1/t: nodes in different clusters are at
  // least 1/t apart, so Newton differences across clusters are well scaled.
  std::array<std::size_t, kMaxNodes> label{};
  for (std::size_t a = 0; a < m; ++a) label[a] = a;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      if (label[a] != label[b] && std::norm(nodes[a] - nodes[b]) * (t * t) < 1.0) {
        const std::size_t from = label[a], to = label[b];
        for (std::size_t c = 0; c < m; ++c) {
          if (label[c] == from) label[c] = to;
        }
      }
    }
  }
  // Cluster-contiguous order; a segment of the table then lies inside one
  // cluster or has its two ends in different clusters.
  Nodes z{};
  std::array<std::size_t, kMaxNodes> group{};
  std::size_t filled = 0;
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t a = 0; a < m; ++a) {
      if (label[a] != c) continue;
      z[filled] = nodes[a];
      group[filled++] = c;
    }
  }

  Nodes table{};
  for (std::size_t a = 0; a < m; ++a) table[a] = std::exp(z[a] * t);
  for (std::size_t level = 1; level < m; ++level) {
    for (std::size_t a = 0; a + level < m; ++a) {
      if (group[a] != group[a + level]) {
        table[a] = (table[a + 1] - table[a]) / (z[a + level] - z[a]);
        continue;
      }
      Nodes seg{};
      Complex c = 0.0;
      for (std::size_t k = 0; k <= level; ++k) {
        seg[k] = z[a + k];
        c += seg[k];
      }
      c /= static_cast<double>(level + 1);
      double radius = 0.0;
      for (std::size_t k = 0; k <= level; ++k) radius = std::max(radius, std::norm(seg[k] - c));
      table[a] = radius * (t * t) <= 1.0 ? clustered(seg, level + 1, c, t)
                                   : divided_difference(seg, level + 1, t);
    }
  }
  return table[0];
}

Complex nested_phase_integral(std::span<const double> freqs, double t) {
  Nodes nodes{};
  if (freqs.size() + 1 > kMaxNodes) {
    throw Error(ErrorKind::UnsupportedOrder, "nested integral depth");
  }
  double cumulative = 0.0;
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    cumulative += freqs[k];
    nodes[k + 1] = kI * cumulative;
  }
  return exp_divided_difference(std::span(nodes.data(), freqs.size() + 1), t);
}

}  // namespace qfirob

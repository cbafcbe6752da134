#pragma once

// Divided differences of x -> exp(x t). These are the time-ordered phase
// integrals that appear at every order of the Dyson expansion:
//   int_{t > s_1 > ... > s_n > 0} prod_k e^{(z_{k-1} - z_k) s_k} ... ,
// evaluated stably at coincident and nearly coincident nodes.

#include <span>

#include "qfirob/linalg.hpp"

namespace qfirob {

// f[z_0, ..., z_n] for f(x) = exp(x t). Symmetric in the nodes; coincident
// nodes give the confluent (derivative) limit.
Complex exp_divided_difference(std::span<const Complex> nodes, double t);

// int_0^t ds_0 e^{i w_0 s_0} int_0^{s_0} ds_1 e^{i w_1 s_1} ... (depth =
// freqs.size()), equal to the divided difference at the nodes
// 0, i w_0, i (w_0 + w_1), ...
Complex nested_phase_integral(std::span<const double> freqs, double t);

}  // namespace qfirob

#pragma once

#include <memory>
#include <vector>

#include "bandstat/rational.hpp"

namespace bandstat::combinatorics {

// gamma(k) = P(|T_1 + ... + T_k| <= 1/2) for T_i iid uniform(-1/2, 1/2),
// as the exact alternating Irwin-Hall sum.  Throws argument_error for k < 1.
rational gamma(int k);

// Snapshot of gamma(1..k_max) as doubles, shared and grown on demand.
// Entry [k] holds gamma(k); entry [0] is unused (set to 0).
std::shared_ptr<const std::vector<double>> gamma_table(int k_max);

// (1/2pi) int_R (sin(x/2)/(x/2))^(k+1) dx: the characteristic-function route
// to gamma(k).  `order` counts the 2*pi panels integrated directly before
// the closed-form sine-power tail takes over.
double gamma_by_quadrature(int k, int order = 32);

// Number of Dyck paths of length l+m whose height after step l equals k.
// Zero when parity or range forbids; argument_error when l+m is odd.
bigint dyck_count(int l, int m, int k);

// Catalan number C_p, the total Dyck path count of length 2p.
bigint catalan(int p);

// C_{l,m} = sum_k dyck_count(l,m,k) * gamma(k+1), exact.
rational c_lm(int l, int m);

// <x^l, x^m> = (sqrt 2)^(l+m+2) * C_{l,m}; zero for odd l+m.
double monomial_inner(int l, int m);

}  // namespace bandstat::combinatorics

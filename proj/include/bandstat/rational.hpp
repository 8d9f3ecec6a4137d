#pragma once

#include <gmpxx.h>

#include <string>

namespace bandstat {

// Exact rational arithmetic for the combinatorial values (gamma_k, C_{l,m});
// the alternating Irwin-Hall sum cancels catastrophically in doubles beyond
// k ~ 25, so everything stays rational until the float boundary.
using rational = mpq_class;
using bigint = mpz_class;

inline double to_double(const rational& q) { return q.get_d(); }

inline std::string to_string(const rational& q) { return q.get_str(); }

}  // namespace bandstat

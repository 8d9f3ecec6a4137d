#include "bandstat/combinatorics.hpp"

#include <cmath>
#include <mutex>

#include "bandstat/errors.hpp"
#include "bandstat/integrate.hpp"

namespace bandstat::combinatorics {

rational gamma(int k) {
    if (k < 1) throw argument_error("gamma: k must be >= 1");
    // gamma_k = (1/(2^k k!)) * sum_s (-1)^s binom(k+1, s) (k+1-2s)^k,
    // s = 0 .. floor((k+1)/2); the s = (k+1)/2 term vanishes when present.
    bigint acc = 0;
    for (int s = 0; 2 * s <= k + 1; ++s) {
        bigint binom, base;
        mpz_bin_uiui(binom.get_mpz_t(), k + 1, s);
        mpz_ui_pow_ui(base.get_mpz_t(), k + 1 - 2 * s, k);
        if (s % 2 == 0)
            acc += binom * base;
        else
            acc -= binom * base;
    }
    bigint den;
    mpz_fac_ui(den.get_mpz_t(), k);
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), k);
    rational out(acc, den);
    out.canonicalize();
    return out;
}

std::shared_ptr<const std::vector<double>> gamma_table(int k_max) {
    if (k_max < 1) throw argument_error("gamma_table: k_max must be >= 1");
    static std::mutex mu;
    static std::shared_ptr<const std::vector<double>> current;
    std::lock_guard<std::mutex> lock(mu);
    if (!current || static_cast<int>(current->size()) <= k_max) {
        int hi = std::max(k_max, 256);
        auto fresh = std::make_shared<std::vector<double>>();
        fresh->reserve(hi + 1);
        fresh->push_back(0.0);
        for (int k = 1; k <= hi; ++k) fresh->push_back(to_double(gamma(k)));
        current = std::move(fresh);
    }
    return current;
}

double gamma_by_quadrature(int k, int order) {
    if (k < 1) throw argument_error("gamma_by_quadrature: k must be >= 1");
    if (order < 13)
        throw argument_error("gamma_by_quadrature: order must be >= 13 "
                             "(closed-form tail needs its argument >= 40)");
    const int p = k + 1;
    auto sincp = [p](double t) {
        double u = (t == 0.0) ? 1.0 : std::sin(t / 2) / (t / 2);
        return std::pow(u, p);
    };
    double acc = 0.0;
    for (int j = 0; j < order; ++j) {
        acc += integrate::integrate_adaptive(sincp, 2 * M_PI * j,
                                             2 * M_PI * (j + 1), 1e-14)
                   .value;
    }
    // int_T^inf sinc(t/2)^p dt = 2 int_{T/2}^inf (sin v / v)^p dv.
    // For p > 16 the tail is below S^(1-p)/(p-1) < 1e-31 at S >= 40 and the
    // closed form would only add cancellation noise, so it is dropped.
    double tail = 0.0;
    if (p <= 16) tail = 2.0 * integrate::sin_power_tail(p, order * M_PI);
    return (acc + tail) / M_PI;
}

bigint dyck_count(int l, int m, int k) {
    if (l < 0 || m < 0 || k < 0)
        throw argument_error("dyck_count: l, m, k must be nonnegative");
    if ((l + m) % 2 != 0) throw argument_error("dyck_count: l+m must be even");
    if (k > l || k > m || (l + k) % 2 != 0 || (m + k) % 2 != 0) return 0;
    // (k+1)^2 / ((l+1)(m+1)) * binom(l+1, (l+k+2)/2) * binom(m+1, (m+k+2)/2)
    bigint bl, bm;
    mpz_bin_uiui(bl.get_mpz_t(), l + 1, (l + k + 2) / 2);
    mpz_bin_uiui(bm.get_mpz_t(), m + 1, (m + k + 2) / 2);
    bigint num = bigint(k + 1) * bigint(k + 1) * bl * bm;
    bigint den = bigint(l + 1) * bigint(m + 1);
    bigint out;
    if (mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t()) == 0)
        throw numeric_error("dyck_count: product form not integral");
    mpz_divexact(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return out;
}

bigint catalan(int p) {
    if (p < 0) throw argument_error("catalan: p must be nonnegative");
    bigint binom;
    mpz_bin_uiui(binom.get_mpz_t(), 2 * p, p);
    bigint out;
    mpz_divexact_ui(out.get_mpz_t(), binom.get_mpz_t(), p + 1);
    return out;
}

rational c_lm(int l, int m) {
    if (l < 0 || m < 0) throw argument_error("c_lm: l, m must be nonnegative");
    if ((l + m) % 2 != 0) return rational(0);
    rational acc(0);
    for (int k = (l % 2 == 0) ? 0 : 1; k <= std::min(l, m); k += 2) {
        bigint d = dyck_count(l, m, k);
        if (d != 0) acc += rational(d) * gamma(k + 1);
    }
    return acc;
}

double monomial_inner(int l, int m) {
    if (l < 0 || m < 0)
        throw argument_error("monomial_inner: l, m must be nonnegative");
    if ((l + m) % 2 != 0) return 0.0;
    // (sqrt 2)^(l+m+2) is the exact integer 2^((l+m+2)/2) for even l+m.
    rational scale(1);
    mpz_mul_2exp(scale.get_num_mpz_t(), scale.get_num_mpz_t(),
                 (l + m + 2) / 2);
    return to_double(rational(scale * c_lm(l, m)));
}

}  // namespace bandstat::combinatorics

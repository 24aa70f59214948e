#include "qpd/qcalc.hpp"

#include <cmath>
#include <cstdlib>

namespace qpd {

QPoly q_number_poly(int n) {
    if (n < 0) throw std::invalid_argument("q_number_poly: negative n");
    // [n] = 1 + q + ... + q^{n-1}
    return QPoly(std::vector<mpz_class>(static_cast<size_t>(n), mpz_class(1)));
}

QPoly q_factorial_poly(int n) {
    if (n < 0) throw std::invalid_argument("q_factorial_poly: negative n");
    QPoly acc = QPoly::constant(1);
    for (int k = 1; k <= n; ++k) acc *= q_number_poly(k);
    return acc;
}

QPoly q_falling_factorial_poly(int n, int s) {
    if (n < 0 || s < 0) throw std::invalid_argument("q_falling_factorial_poly: negative argument");
    if (s > n) throw std::domain_error("q_falling_factorial_poly: s exceeds n");
    QPoly acc = QPoly::constant(1);
    for (int j = 0; j < s; ++j) acc *= q_number_poly(n - j);
    return acc;
}

QPoly q_binomial_poly(int n, int k) {
    if (n < 0 || k < 0) throw std::invalid_argument("q_binomial_poly: negative argument");
    if (k > n) throw std::domain_error("q_binomial_poly: k exceeds n");
    // Pascal-type recursion C(i,j) = C(i-1,j-1) + q^j C(i-1,j), rolled over
    // one row in descending j.  Division-free, so coefficients stay integer.
    std::vector<QPoly> row(static_cast<size_t>(k) + 1);
    row[0] = QPoly::constant(1);
    for (int i = 1; i <= n; ++i) {
        const int jmax = i < k ? i : k;
        for (int j = jmax; j >= 1; --j)
            row[static_cast<size_t>(j)] =
                row[static_cast<size_t>(j) - 1] + row[static_cast<size_t>(j)].shifted(j);
    }
    return row[static_cast<size_t>(k)];
}

SeriesSum q_exp(double x, const FloatContext& ctx) {
    const double q = ctx.q();
    if (q < 1.0 && std::abs(x) * (1.0 - q) >= 1.0)
        throw std::domain_error("q_exp: |x|(1-q) >= 1, series diverges for q < 1");
    double acc = 0.0, term = 1.0, qn = 0.0;
    int n = 0;
    while (std::abs(term) >= ctx.epsilon()) {
        acc += term;
        ++n;
        if (n > ctx.term_cap()) throw std::runtime_error("q_exp: term cap exceeded");
        qn = 1.0 + q * qn;   // [n]
        term *= x / qn;
    }
    return {acc, n};
}

SeriesSum q_exp_dual(double x, const FloatContext& ctx) {
    const double q = ctx.q();
    if (q > 1.0 && std::abs(x) * (q - 1.0) >= q)
        throw std::domain_error("q_exp_dual: |x|(q-1) >= q, series diverges for q > 1");
    double acc = 0.0, term = 1.0, qn = 0.0, qpow = 1.0;
    int n = 0;
    while (std::abs(term) >= ctx.epsilon()) {
        acc += term;
        ++n;
        if (n > ctx.term_cap()) throw std::runtime_error("q_exp_dual: term cap exceeded");
        qn = 1.0 + q * qn;        // [n]
        term *= qpow * x / qn;    // q^{n(n-1)/2} accrues one factor q^{n-1} per step
        qpow *= q;
    }
    return {acc, n};
}

mpf_class q_exp_mpf(const mpf_class& x, const mpq_class& q, int term_cap, int prec_bits) {
    const auto prec = static_cast<mp_bitcnt_t>(prec_bits);
    mpf_class qf(q, prec);
    mpf_class acc(0, prec), term(1, prec), qn(0, prec), step(0, prec);
    mpf_class rel(1, prec);
    mpf_div_2exp(rel.get_mpf_t(), rel.get_mpf_t(), static_cast<mp_bitcnt_t>(prec_bits / 2));
    int n = 0;
    while (abs(term) >= rel * (1 + abs(acc))) {
        acc += term;
        ++n;
        if (n > term_cap) throw std::runtime_error("q_exp_mpf: term cap exceeded");
        qn = 1 + qf * qn;
        step = x / qn;
        term *= step;
    }
    return acc;
}

} // namespace qpd

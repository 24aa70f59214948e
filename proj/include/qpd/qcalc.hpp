#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <utility>

#include "qpd/power_series.hpp"
#include "qpd/qpoly.hpp"

namespace qpd {

enum class Backend { exact_rational, symbolic, float64 };

/* Evaluation context for the q-calculus: the deformation parameter q > 0
 * plus the truncation threshold and term cap shared by every series
 * routine.  Instantiate with double (float64 backend) or mpq_class (exact
 * rational backend); symbolic results come from the QPoly routines below.
 * Contexts are immutable. */
template <class Scalar>
class QContext {
public:
    explicit QContext(Scalar q, double epsilon = 1e-14, int term_cap = 10000)
        : q_(std::move(q)), epsilon_(epsilon), term_cap_(term_cap) {
        if (!(q_ > Scalar(0))) throw std::domain_error("QContext: q must be positive");
        if (!(epsilon_ >= 0)) throw std::domain_error("QContext: epsilon must be nonnegative");
        if (term_cap_ < 1) throw std::domain_error("QContext: term cap must be at least 1");
    }

    const Scalar& q() const { return q_; }
    double epsilon() const { return epsilon_; }
    int term_cap() const { return term_cap_; }

    // q = 1 collapses every q-quantity to its classical counterpart.
    bool classical() const { return q_ == Scalar(1); }

private:
    Scalar q_;
    double epsilon_;
    int term_cap_;
};

using FloatContext = QContext<double>;
using ExactContext = QContext<mpq_class>;

namespace detail {

template <class S>
S pow_int(S base, int e) {
    S acc(1);
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

} // namespace detail

// [n] = (1 - q^n)/(1 - q); [n] = n at q = 1, and [0] = 0.
template <class S>
S q_number(int n, const QContext<S>& ctx) {
    if (n < 0) throw std::invalid_argument("q_number: negative n");
    if (n == 0) return S(0);
    if (ctx.classical()) return S(n);
    return (S(1) - detail::pow_int(ctx.q(), n)) / (S(1) - ctx.q());
}

// [n]! = [1][2]...[n], with [0]! = 1.  Built by the recursion
// [k] = 1 + q [k-1], so exact backends never divide.
template <class S>
S q_factorial(int n, const QContext<S>& ctx) {
    if (n < 0) throw std::invalid_argument("q_factorial: negative n");
    S acc(1);
    S qk(0);
    for (int k = 1; k <= n; ++k) {
        qk = S(1) + ctx.q() * qk;
        acc *= qk;
    }
    return acc;
}

// [n][n-1]...[n-s+1]: the s-term falling product, evaluated without the
// [n]!/[n-s]! quotient so intermediates stay near the result.
template <class S>
S q_falling_factorial(int n, int s, const QContext<S>& ctx) {
    if (n < 0 || s < 0) throw std::invalid_argument("q_falling_factorial: negative argument");
    if (s > n) throw std::domain_error("q_falling_factorial: s exceeds n");
    S acc(1);
    for (int j = 0; j < s; ++j) acc *= q_number(n - j, ctx);
    return acc;
}

// Returns the pair ([n-s], ([n]-[s])/q^s); the two sides agree for s < n.
template <class S>
std::pair<S, S> q_shift_identity(int n, int s, const QContext<S>& ctx) {
    if (n < 0 || s < 0) throw std::invalid_argument("q_shift_identity: negative argument");
    if (s >= n) throw std::domain_error("q_shift_identity: requires s < n");
    S lhs = q_number(n - s, ctx);
    S rhs = (q_number(n, ctx) - q_number(s, ctx)) / detail::pow_int(ctx.q(), s);
    return {lhs, rhs};
}

// Gaussian binomial [n]!/([k]![n-k]!), via prod_j [n-k+j]/[j] with the
// symmetric reduction k -> n-k, keeping magnitudes near the result.
template <class S>
S q_binomial(int n, int k, const QContext<S>& ctx) {
    if (n < 0 || k < 0) throw std::invalid_argument("q_binomial: negative argument");
    if (k > n) throw std::domain_error("q_binomial: k exceeds n");
    if (k > n - k) k = n - k;
    S acc(1);
    for (int j = 1; j <= k; ++j)
        acc = acc * q_number(n - k + j, ctx) / q_number(j, ctx);
    return acc;
}

// Symbolic forms as integer polynomials in q.
QPoly q_number_poly(int n);
QPoly q_factorial_poly(int n);
QPoly q_falling_factorial_poly(int n, int s);
QPoly q_binomial_poly(int n, int k);

// A truncated series value plus the number of terms accumulated before
// the |term| < epsilon cutoff fired.
struct SeriesSum {
    double value = 0.0;
    int terms = 0;
};

/* e_q(x) = sum_n x^n/[n]!.  Diverges when q < 1 and |x|(1-q) >= 1
 * (the [n] saturate at 1/(1-q)); converges for every x when q >= 1.
 * Throws std::domain_error off-domain, std::runtime_error when the term
 * cap is exhausted first. */
SeriesSum q_exp(double x, const FloatContext& ctx);

/* The dual exponential e_{1/q}(x) = sum_n q^{n(n-1)/2} x^n/[n]!, using
 * [n]_{1/q}! = q^{-n(n-1)/2} [n]_q! to stay in base-q quantities.
 * Converges for every x when q <= 1; needs |x|(q-1) < q when q > 1.
 * Satisfies e_q(x) e_{1/q}(-x) = 1 on the common domain. */
SeriesSum q_exp_dual(double x, const FloatContext& ctx);

/* High-precision e_q(x) backing the exact-backend Dobinsky routines:
 * GMP floating point at prec_bits, accumulated until the next term falls
 * below 2^-(prec_bits/2) relative to the running sum. */
mpf_class q_exp_mpf(const mpf_class& x, const mpq_class& q, int term_cap, int prec_bits = 512);

// D_q f: coefficient n of the result is [n+1] c_{n+1}; the truncation
// order drops by one (a constant maps to the zero series of order 0).
template <class S>
PowerSeries<S> q_derivative(const PowerSeries<S>& series, const QContext<S>& ctx) {
    const int out_order = series.order() > 0 ? series.order() - 1 : 0;
    PowerSeries<S> out(out_order);
    S qn(0);
    for (int n = 0; n <= out_order; ++n) {
        qn = S(1) + ctx.q() * qn;   // [n+1]
        out.set_coefficient(n, qn * series.coefficient(n + 1));
    }
    return out;
}

} // namespace qpd

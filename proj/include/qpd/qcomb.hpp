#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <utility>

#include "qpd/qcalc.hpp"

namespace qpd {

/* Triangle of the deformed Stirling coefficients C(r,s), built from the
 * recursion C(r+1,s) = q^{s-1} C(r,s-1) + [s] C(r,s) with seed C(1,1) = 1.
 * Entries are integer polynomials in q with nonnegative coefficients; at
 * q = 1 they reduce to the Stirling numbers of the second kind.  They
 * expand powers of a q-number over falling products:
 *   [N]^r = sum_s C(r,s) [N][N-1]...[N-s+1]. */
class StirlingTable {
public:
    explicit StirlingTable(int r_max);

    int r_max() const { return static_cast<int>(rows_.size()); }

    // Zero polynomial for s = 0 or s > r; throws for r or s out of range.
    const QPoly& entry(int r, int s) const;

private:
    std::vector<std::vector<QPoly>> rows_;   // rows_[r-1][s-1], 1 <= s <= r
};

StirlingTable build_stirling_table(int r_max);

// Process-wide cached table (r_max at least 16, grown on demand).
// The returned table is immutable and safe to read concurrently.
std::shared_ptr<const StirlingTable> shared_stirling_table(int r_max);

QPoly q_stirling_poly(int r, int s);

template <class S>
S q_stirling(int r, int s, const QContext<S>& ctx) {
    return q_stirling_poly(r, s).evaluate(ctx.q());
}

// Both sides of the falling-product expansion of [N]^r, symbolically.
// Equal polynomials for every r >= 1, N >= 1; terms with s > N drop out
// because the falling product acquires an [0] = 0 factor.
std::pair<QPoly, QPoly> verify_falling_expansion(int r, int N);

// Row sums B(r) = sum_s C(r,s); the deformed Bell numbers.
QPoly q_bell_poly(int r);

template <class S>
S q_bell(int r, const QContext<S>& ctx) {
    return q_bell_poly(r).evaluate(ctx.q());
}

/* Dobinsky form B(r) = (1/e_q(1)) sum_N [N]^r/[N]!.  The float64 overload
 * runs at context precision; the exact-context overload evaluates the
 * series in GMP floating point at prec_bits, which keeps the truncation
 * defect far below double round-off even when B(r) is large. */
double q_bell_dobinsky(int r, const FloatContext& ctx);
mpf_class q_bell_dobinsky(int r, const ExactContext& ctx, int prec_bits = 512);

/* lambda-weighted Dobinsky pair: first = sum_s C(r,s) lambda^s,
 * second = (1/e_q(lambda)) sum_N [N]^r lambda^N/[N]!.  The two agree on
 * the convergence domain of e_q(lambda). */
std::pair<double, double> dobinsky_generating(int r, double lambda, const FloatContext& ctx);
std::pair<mpf_class, mpf_class> dobinsky_generating(int r, const mpq_class& lambda,
                                                    const ExactContext& ctx, int prec_bits = 512);

/* CSV triangle export, one row per (r,s): columns r, s, polynomial in
 * ascending powers, and the value at q when a numeric q is given (the
 * value column is left empty in symbolic mode). */
void write_stirling_csv(std::ostream& out, const StirlingTable& table,
                        std::optional<double> q_value = std::nullopt);

} // namespace qpd

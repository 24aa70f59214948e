#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "qpd/qcalc.hpp"
#include "qpd/rng.hpp"

namespace qpd {

/* Deformed Poisson law P(n) = e_{1/q}(-lambda) lambda^n/[n]!.
 *
 * Admissible parameters: lambda > 0 with lambda(1-q) < 1 when q < 1 and
 * lambda(q-1) < q when q > 1; on that domain the prefactor equals
 * 1/e_q(lambda) and is strictly positive, so every P(n) is a genuine
 * probability.  The constructor rejects anything else.
 *
 * The prefactor and a pmf/cdf table covering all but 1e-12 of the mass
 * are computed once and cached; models are immutable afterwards.
 * Sampling takes a caller-owned generator, so one model can serve many
 * streams concurrently. */
class QPoissonModel {
public:
    // tail_cap 0 lets the table grow adaptively (hard cap ctx.term_cap()).
    QPoissonModel(double lambda, FloatContext ctx, int tail_cap = 0);

    double lambda() const { return lambda_; }
    double q() const { return ctx_.q(); }
    const FloatContext& context() const { return ctx_; }
    int tail_cap() const { return static_cast<int>(pmf_.size()) - 1; }
    double prefactor() const { return prefactor_; }

    double pmf(int n) const;
    // |sum_n P(n) - 1| over the cached table.
    double normalization_defect() const;

    // E[n] = sum [n] P(n); equals lambda on the whole admissible domain.
    double mean() const;
    // E[n]^r = sum [n]^r P(n).
    double moment(int r) const;
    // E([n][n-1]...[n-k+1]) = lambda^k.
    double factorial_moment(int k) const;
    // sum_s C(r,s) lambda^s; agrees with moment(r).
    double moment_via_stirling(int r) const;

    // Coefficient of u^n is P(n), n <= order.
    PowerSeries<double> generating_series(int order) const;

    // Inverse-cdf draw over the cached table.
    int sample(std::mt19937_64& rng) const;

private:
    FloatContext ctx_;
    double lambda_;
    double prefactor_;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
    std::vector<double> qn_;   // qn_[n] = [n]
};

/* (u D_q)^r acting on a truncated series: coefficient n maps to [n]^r c_n.
 * Applying it to the generating series and evaluating at u = 1 reproduces
 * moment(r). */
template <class S>
PowerSeries<S> apply_u_dq_operator(const PowerSeries<S>& series, int r, const QContext<S>& ctx) {
    if (r < 0) throw std::invalid_argument("apply_u_dq_operator: negative power");
    PowerSeries<S> out(series.order());
    S qn(0);
    for (int n = 0; n <= series.order(); ++n) {
        if (n > 0) qn = S(1) + ctx.q() * qn;   // [n]
        out.set_coefficient(n, detail::pow_int(qn, r) * series.coefficient(n));
    }
    return out;
}

/* Moment routes through the generating series: (u D_q)^r applied to the
 * series and evaluated at u = 1 reproduces moment(r); applying D_q s
 * times and evaluating at u = 1 reproduces factorial_moment(s).  The
 * truncation order is grown until the dropped weighted tail is far below
 * the comparison tolerances. */
double moment_via_operator(const QPoissonModel& model, int r);
double factorial_moment_via_series(const QPoissonModel& model, int s);

struct MomentReport {
    int r = 0;
    double analytic = 0.0;
    double via_stirling = 0.0;
    double empirical = 0.0;    // NaN when sampling was skipped
    double std_error = 0.0;    // NaN when sampling was skipped
};

struct MomentReportSet {
    double q = 0.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    long long samples = 0;
    std::vector<MomentReport> rows;
};

/* Draws `samples` variates (none if samples == 0) and reports, for each
 * r = 1..r_max, the analytic moment, the Stirling route, the sample mean
 * of [n]^r and its standard error.  Deterministic for a fixed seed. */
MomentReportSet empirical_moment_report(const QPoissonModel& model, int r_max,
                                        long long samples, std::uint64_t seed = kDefaultSeed);

/* Pearson statistic for observed counts over cells {0..cells-1, tail}
 * against the model pmf.  Deterministic for a fixed seed; at the default
 * 16 low cells the 0.999 quantile of the reference chi-square law (16
 * degrees of freedom) is 39.252354790768464. */
double chi_square_statistic(const QPoissonModel& model, long long samples,
                            std::uint64_t seed = kDefaultSeed, int cells = 16);

inline constexpr double kChiSquare999Df16 = 39.252354790768464;

// JSON schema: {q, lambda, rows: [{r, analytic, via_stirling, empirical,
// stderr}], seed, samples}; skipped empirical columns serialize as null.
void write_json(std::ostream& out, const MomentReportSet& set);
// CSV columns: q,lambda,seed,samples,r,analytic,via_stirling,empirical,
// stderr; skipped empirical columns are left empty.
void write_csv(std::ostream& out, const MomentReportSet& set);

} // namespace qpd

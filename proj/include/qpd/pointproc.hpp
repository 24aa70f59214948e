#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "qpd/qcalc.hpp"
#include "qpd/qcomb.hpp"
#include "qpd/qdist.hpp"
#include "qpd/rng.hpp"

namespace qpd {

enum class DensityKind { uniform, piecewise_linear };

/* Normalized one-particle energy density on a bounded support: flat, or
 * piecewise linear between breakpoints.  Integrals are exact trapezoids
 * and sampling inverts the cumulative segment-wise in closed form, so no
 * quadrature error reaches the checks downstream. */
class DensityModel {
public:
    static DensityModel uniform(double lo, double hi);
    // xs strictly increasing (>= 2 entries), ys >= 0 with positive total
    // mass; the shape is normalized to integrate to one.
    static DensityModel piecewise_linear(std::vector<double> xs, std::vector<double> ys);

    DensityKind kind() const { return kind_; }
    double lower() const { return xs_.front(); }
    double upper() const { return xs_.back(); }

    // Density value; zero outside the support.
    double operator()(double e) const;
    // Exact integral over [lo, hi], which must sit inside the support.
    double integral(double lo, double hi) const;
    double sample(std::mt19937_64& rng) const;

private:
    DensityModel(DensityKind kind, std::vector<double> xs, std::vector<double> ys);
    DensityKind kind_;
    std::vector<double> xs_, ys_, cum_;
};

/* Exactly N points, energies i.i.d. from the density; q deforms the
 * counting combinatorics attached to ordered h-tuples. */
struct FixedNProcess {
    int particle_count;
    DensityModel density;
    FloatContext ctx;
};

/* Coefficient [N][N-1]...[N-m+1] carried by the m-point product density
 * of the N-point process; requires 1 <= m <= N. */
template <class S>
S product_density_coefficient(int N, int m, const QContext<S>& ctx) {
    if (m < 1) throw std::invalid_argument("product_density_coefficient: m must be >= 1");
    return q_falling_factorial(N, m, ctx);
}

double product_density_coefficient(const FixedNProcess& process, int m);

/* r-th deformed moment of the count inside a sub-range holding mass p:
 * sum_s C(r,s) [N][N-1]...[N-s+1] p^s, terms with s > N absent. */
template <class S>
S moment_over_range_coefficient(int N, int r, const S& p, const QContext<S>& ctx) {
    if (N < 1) throw std::invalid_argument("moment_over_range_coefficient: N must be >= 1");
    if (r < 1) throw std::invalid_argument("moment_over_range_coefficient: r must be >= 1");
    auto table = shared_stirling_table(r);
    S acc(0), ps(1);
    const int s_max = r < N ? r : N;
    for (int s = 1; s <= s_max; ++s) {
        ps = ps * p;
        acc += table->entry(r, s).evaluate(ctx.q()) * q_falling_factorial(N, s, ctx) * ps;
    }
    return acc;
}

double moment_over_range(const FixedNProcess& process, int r, double lo, double hi);

/* Two routes to the h-point coefficient: the direct falling product
 * [N][N-1]...[N-h+1], and the top-order weight [N]! marginalized over the
 * unobserved N-h coordinates, which divides by their [N-h]! orderings.
 * The pair is identically equal for 1 <= h < N. */
template <class S>
std::pair<S, S> verify_marginalization(int N, int h, const QContext<S>& ctx) {
    if (h < 1 || h >= N) throw std::domain_error("verify_marginalization: requires 1 <= h < N");
    S direct = q_falling_factorial(N, h, ctx);
    S marginalized = q_factorial(N, ctx) / q_factorial(N - h, ctx);
    return {direct, marginalized};
}

std::pair<double, double> verify_marginalization(const FixedNProcess& process, int h);

/* Family of configuration weights over the total count, each point i.i.d.
 * from the density.  The h-point product density reconstructs as
 *   f_h(E_1..E_h) = sum_{N>=h} w_N [N][N-1]...[N-h+1] prod_i f0(E_i),
 * with the N = h term included.  Under the deformed Poisson weights the
 * sum collapses to lambda^h prod_i f0(E_i). */
class JanossyFamily {
public:
    static JanossyFamily from_qpoisson(const QPoissonModel& model, DensityModel density);
    // Weights are normalized to unit sum; the family is finite, so
    // reconstruction truncates nothing.
    static JanossyFamily from_weights(std::vector<double> weights, DensityModel density,
                                      FloatContext ctx);

    int n_max() const { return static_cast<int>(weights_.size()) - 1; }
    double weight(int n) const;
    const DensityModel& density() const { return density_; }
    const FloatContext& context() const { return ctx_; }
    bool has_poisson_tail() const { return poisson_tail_; }
    double lambda() const { return lambda_; }

private:
    JanossyFamily(std::vector<double> weights, DensityModel density, FloatContext ctx,
                  bool poisson_tail, double lambda);
    std::vector<double> weights_;
    DensityModel density_;
    FloatContext ctx_;
    bool poisson_tail_;
    double lambda_;
};

/* Weight attached to seeing exactly h points, recovered through the
 * configuration-integral route; the values sum to one over h. */
double janossy_normalizer(const JanossyFamily& family, int h);

struct JanossyReconstruction {
    double value = 0.0;
    // Bound on the dropped remainder (zero for finite families), by
    // geometric domination of the term ratios past the last summed term.
    double tail_bound = 0.0;
};

JanossyReconstruction janossy_to_product_density(const JanossyFamily& family, int h,
                                                 std::span<const double> points);

/* Classical (q = 1) Monte Carlo over replicates of the N-point process:
 * count moments over requested ranges, one-point density over a uniform
 * bin grid, two-point density over disjoint bin pairs, each with standard
 * errors against the analytic values.  Replicates are split over 32
 * deterministically sub-seeded blocks reduced in index order, so results
 * are byte-stable for a fixed seed regardless of scheduling. */
struct RangeMomentRow {
    double lo = 0.0, hi = 0.0;
    double mass = 0.0;
    int r = 0;
    double empirical = 0.0;
    double analytic = 0.0;
    double std_error = 0.0;
};

struct BinDensityRow {
    double lo = 0.0, hi = 0.0;
    double estimate = 0.0;
    double expected = 0.0;
    double std_error = 0.0;
};

struct PairDensityRow {
    int i = 0, j = 0;
    double estimate = 0.0;
    double expected = 0.0;
    double std_error = 0.0;
};

struct EstimateReport {
    int particle_count = 0;
    long long samples = 0;
    std::uint64_t seed = 0;
    int blocks = 0;
    std::vector<double> bin_edges;
    std::vector<RangeMomentRow> moments;
    std::vector<BinDensityRow> f1;
    std::vector<PairDensityRow> f2;
};

EstimateReport mc_estimate_classical(int particle_count, const DensityModel& density,
                                     std::span<const std::pair<double, double>> ranges,
                                     int r_max, long long samples,
                                     std::uint64_t seed = kDefaultSeed, int bins = 10);

void write_csv(std::ostream& out, const EstimateReport& report);
void write_json(std::ostream& out, const EstimateReport& report);

} // namespace qpd

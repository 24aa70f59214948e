#include "qpd/identities.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "qpd/pointproc.hpp"
#include "qpd/qcalc.hpp"
#include "qpd/qcomb.hpp"
#include "qpd/qdist.hpp"

namespace qpd {

namespace {

constexpr std::array<double, 6> kFloatQ = {0.3, 0.5, 0.9, 1.0, 1.5, 2.0};
constexpr std::array<double, 4> kFloatLambda = {0.25, 0.5, 1.0, 2.0};

bool admissible(double q, double lambda) {
    if (q < 1.0) return lambda * (1.0 - q) < 1.0;
    if (q > 1.0) return lambda * (q - 1.0) < q;
    return true;
}

std::vector<mpq_class> exact_q_grid() {
    return {mpq_class(3, 10), mpq_class(1, 2), mpq_class(9, 10), mpq_class(3, 2), mpq_class(2)};
}

void push(std::vector<IdentityRow>& rows, std::string name, std::string detail,
          double defect, double tolerance) {
    IdentityRow row;
    row.name = std::move(name);
    row.detail = std::move(detail);
    row.defect = defect;
    row.tolerance = tolerance;
    row.pass = defect <= tolerance;
    rows.push_back(std::move(row));
}

// Classical Stirling numbers of the second kind by their own recursion,
// independent of the deformed table.
long classical_stirling(int r, int s) {
    if (s < 0 || s > r) return 0;
    if (r == 0) return s == 0 ? 1 : 0;
    std::vector<std::vector<long>> S(static_cast<size_t>(r) + 1,
                                          std::vector<long>(static_cast<size_t>(r) + 1, 0));
    S[0][0] = 1;
    for (int i = 1; i <= r; ++i)
        for (int j = 1; j <= i; ++j)
            S[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                S[static_cast<size_t>(i) - 1][static_cast<size_t>(j) - 1] +
                static_cast<long>(j) * S[static_cast<size_t>(i) - 1][static_cast<size_t>(j)];
    return S[static_cast<size_t>(r)][static_cast<size_t>(s)];
}

} // namespace

std::vector<IdentityRow> run_identity_checks(const IdentityOptions& options) {
    std::vector<IdentityRow> rows;

    {   // [n] = 1 + q[n-1], exact backend
        int bad = 0;
        for (const auto& q : exact_q_grid()) {
            ExactContext ctx(q);
            for (int n = 1; n <= 30; ++n)
                if (q_number(n, ctx) != 1 + q * q_number(n - 1, ctx)) ++bad;
        }
        push(rows, "q-number-recursion", "exact q in {3/10,1/2,9/10,3/2,2}, n <= 30", bad, 0.0);
    }

    {   // [n-s] = ([n]-[s])/q^s, exact backend
        int bad = 0;
        for (const auto& q : exact_q_grid()) {
            ExactContext ctx(q);
            for (int n = 1; n <= 20; ++n)
                for (int s = 0; s < n; ++s) {
                    auto [lhs, rhs] = q_shift_identity(n, s, ctx);
                    if (lhs != rhs) ++bad;
                }
        }
        push(rows, "q-shift-identity", "exact grid, 0 <= s < n <= 20", bad, 0.0);
    }

    {   // Gaussian binomial symmetry, symbolic
        int bad = 0;
        for (int n = 1; n <= 20; ++n)
            for (int k = 0; k <= n; ++k)
                if (!(q_binomial_poly(n, k) == q_binomial_poly(n, n - k))) ++bad;
        push(rows, "q-binomial-symmetry", "symbolic, 0 <= k <= n <= 20", bad, 0.0);
    }

    {   // r-fold D_q of u^n at u = 1 equals the falling product
        int bad = 0;
        for (const auto& q : exact_q_grid()) {
            ExactContext ctx(q);
            for (int n = 1; n <= 8; ++n)
                for (int r = 1; r <= n; ++r) {
                    PowerSeries<mpq_class> s(n);
                    s.set_coefficient(n, mpq_class(1));
                    for (int k = 0; k < r; ++k) s = q_derivative(s, ctx);
                    if (s.evaluate(mpq_class(1)) != q_falling_factorial(n, r, ctx)) ++bad;
                }
        }
        push(rows, "q-derivative-power", "exact grid, 1 <= r <= n <= 8", bad, 0.0);
    }

    {   // q = 1 reduces every quantity to its classical value
        int bad = 0;
        ExactContext one(mpq_class(1));
        mpq_class fact = 1;
        for (int n = 1; n <= 12; ++n) {
            fact *= n;
            if (q_number(n, one) != n) ++bad;
            if (q_factorial(n, one) != fact) ++bad;
            for (int k = 0; k <= n; ++k) {
                mpq_class c = q_binomial(n, k, one);
                mpq_class classical = 1;
                for (int j = 1; j <= k; ++j) classical = classical * (n - k + j) / j;
                if (c != classical) ++bad;
            }
        }
        push(rows, "classical-reduction", "q = 1, n <= 12", bad, 0.0);
    }

    {   // [N]^r = sum_s C(r,s) [N]...[N-s+1], symbolic
        int bad = 0;
        for (int r = 1; r <= 8; ++r)
            for (int N = 1; N <= 8; ++N) {
                auto [lhs, rhs] = verify_falling_expansion(r, N);
                if (!(lhs == rhs)) ++bad;
            }
        push(rows, "falling-expansion", "symbolic, r <= 8, N <= 8", bad, 0.0);
    }

    {   // Small closed-form table entries
        int bad = 0;
        auto expect = [&bad](const QPoly& got, std::vector<long> coeffs) {
            std::vector<mpz_class> c(coeffs.begin(), coeffs.end());
            if (!(got == QPoly(std::move(c)))) ++bad;
        };
        expect(q_stirling_poly(2, 1), {1});
        expect(q_stirling_poly(2, 2), {0, 1});             // q
        expect(q_stirling_poly(3, 2), {0, 2, 1});          // 2q + q^2
        expect(q_stirling_poly(3, 3), {0, 0, 0, 1});       // q^3
        expect(q_stirling_poly(4, 2), {0, 3, 3, 1});       // 3q + 3q^2 + q^3
        expect(q_stirling_poly(4, 3), {0, 0, 0, 3, 2, 1}); // 3q^3 + 2q^4 + q^5
        expect(q_stirling_poly(4, 4), {0, 0, 0, 0, 0, 0, 1});
        push(rows, "stirling-tabulated", "closed-form entries through r = 4", bad, 0.0);
    }

    {   // q = 1 column equals the classical Stirling numbers
        int bad = 0;
        auto table = shared_stirling_table(10);
        for (int r = 1; r <= 10; ++r)
            for (int s = 1; s <= r; ++s)
                if (table->entry(r, s).eval_at_one() != classical_stirling(r, s)) ++bad;
        push(rows, "stirling-classical", "q = 1 against the classical recursion, r <= 10", bad, 0.0);
    }

    {   // Bell row sums at q = 1
        static constexpr std::array<long, 8> kBell = {1, 2, 5, 15, 52, 203, 877, 4140};
        int bad = 0;
        for (int r = 1; r <= 8; ++r)
            if (q_bell_poly(r).eval_at_one() != kBell[static_cast<size_t>(r) - 1]) ++bad;
        push(rows, "bell-classical", "q = 1 row sums, r <= 8", bad, 0.0);
    }

    {   // e_q(x) e_{1/q}(-x) = 1 on the admissible float grid
        double defect = 0.0;
        for (double q : kFloatQ) {
            FloatContext ctx(q);
            for (double x : {0.1, 0.5, 1.0, 2.0}) {
                if (q < 1.0 && x * (1.0 - q) >= 1.0) continue;
                if (q > 1.0 && x * (q - 1.0) >= q) continue;
                const double p = q_exp(x, ctx).value * q_exp_dual(-x, ctx).value;
                defect = std::max(defect, std::abs(p - 1.0));
            }
        }
        push(rows, "euler-product", "float q in {0.3..2}, admissible x in {0.1,0.5,1,2}", defect, 1e-10);
    }

    {   // Row sums against the high-precision series form
        double defect = 0.0;
        for (const auto& q : exact_q_grid()) {
            ExactContext ctx(q);
            for (int r = 1; r <= 8; ++r) {
                mpf_class dob = q_bell_dobinsky(r, ctx);
                mpf_class bell(q_bell(r, ctx), 512);
                mpf_class diff = abs(bell - dob);
                defect = std::max(defect, diff.get_d());
            }
        }
        push(rows, "bell-dobinsky", "exact q grid, r <= 8, series at 512 bits", defect, 1e-9);
    }

    {   // lambda-weighted series form against the finite Stirling sum
        double defect = 0.0;
        const std::array<mpq_class, 4> lambdas = {mpq_class(1, 4), mpq_class(1, 2), mpq_class(1),
                                                  mpq_class(2)};
        for (const auto& q : exact_q_grid()) {
            ExactContext ctx(q);
            for (const auto& lam : lambdas) {
                if (q < 1 && lam * (1 - q) >= 1) continue;
                for (int r = 1; r <= 8; ++r) {
                    auto [lhs, rhs] = dobinsky_generating(r, lam, ctx);
                    mpf_class diff = abs(lhs - rhs);
                    defect = std::max(defect, diff.get_d());
                }
            }
        }
        push(rows, "dobinsky-generating", "exact grid, admissible lambda, r <= 8", defect, 1e-9);
    }

    // Shared admissible float grid for the distribution rows.
    std::vector<QPoissonModel> models;
    for (double q : kFloatQ)
        for (double lam : kFloatLambda)
            if (admissible(q, lam)) models.emplace_back(lam, FloatContext(q));

    {
        double defect = 0.0;
        for (const auto& m : models) defect = std::max(defect, m.normalization_defect());
        push(rows, "qpoisson-normalization", "admissible (q,lambda) grid", defect, 1e-10);
    }

    {
        double defect = 0.0;
        for (const auto& m : models) defect = std::max(defect, std::abs(m.mean() - m.lambda()));
        push(rows, "qpoisson-mean", "admissible grid, E[n] = lambda", defect, 1e-10);
    }

    {
        double defect = 0.0;
        for (const auto& m : models) {
            double lp = 1.0;
            for (int k = 1; k <= 6; ++k) {
                lp *= m.lambda();
                defect = std::max(defect, std::abs(m.factorial_moment(k) - lp));
            }
        }
        push(rows, "qpoisson-factorial-moment", "admissible grid, k <= 6", defect, 1e-9);
    }

    {   // direct vs Stirling vs operator routes, pairwise
        double defect = 0.0;
        for (const auto& m : models) {
            for (int r = 1; r <= 4; ++r) {
                const double a = m.moment(r);
                const double b = m.moment_via_stirling(r);
                const double c = moment_via_operator(m, r);
                defect = std::max({defect, std::abs(a - b), std::abs(a - c), std::abs(b - c)});
            }
        }
        push(rows, "qpoisson-moment-routes", "admissible grid, r <= 4, pairwise", defect, 1e-9);
    }

    {   // s-fold D_q of the generating series at u = 1 equals lambda^s
        double defect = 0.0;
        for (const auto& m : models) {
            double lp = 1.0;
            for (int s = 1; s <= 3; ++s) {
                lp *= m.lambda();
                defect = std::max(defect, std::abs(factorial_moment_via_series(m, s) - lp));
            }
        }
        push(rows, "qpoisson-generating-derivative", "admissible grid, s <= 3", defect, 1e-9);
    }

    {   // Whole-range count moment collapses to [N]^r, exact backend
        int bad = 0;
        for (const auto& q : exact_q_grid()) {
            ExactContext ctx(q);
            for (int N = 1; N <= 6; ++N)
                for (int r = 1; r <= 6; ++r) {
                    mpq_class whole = moment_over_range_coefficient(N, r, mpq_class(1), ctx);
                    if (whole != detail::pow_int(q_number(N, ctx), r)) ++bad;
                }
        }
        push(rows, "whole-range-moment", "exact grid, r <= 6, N <= 6, p = 1", bad, 0.0);
    }

    {   // Marginalized route equals the direct falling product, exact
        int bad = 0;
        for (const auto& q : exact_q_grid()) {
            ExactContext ctx(q);
            for (int N = 2; N <= 8; ++N)
                for (int h = 1; h < N; ++h) {
                    auto [direct, marginalized] = verify_marginalization(N, h, ctx);
                    if (direct != marginalized) ++bad;
                }
        }
        push(rows, "marginalization", "exact grid, 1 <= h < N <= 8", bad, 0.0);
    }

    {   // Deformed Poisson weights collapse the reconstruction to lambda^h
        double defect = 0.0;
        const std::array<double, 3> pts = {0.3, 0.7, 1.1};
        for (double q : kFloatQ)
            for (double lam : kFloatLambda) {
                if (!admissible(q, lam)) continue;
                QPoissonModel m(lam, FloatContext(q));
                JanossyFamily fam = JanossyFamily::from_qpoisson(m, DensityModel::uniform(0.0, 2.0));
                double expect = 1.0, lp = 1.0;
                for (int h = 1; h <= 3; ++h) {
                    lp *= lam;
                    expect *= 0.5;   // f0 = 1/2 on [0,2]
                    auto rec = janossy_to_product_density(fam, h, std::span(pts.data(), static_cast<size_t>(h)));
                    defect = std::max(defect, std::abs(rec.value - lp * expect));
                }
            }
        push(rows, "janossy-poisson-collapse", "admissible grid, h <= 3", defect, 1e-8);
    }

    {   // Configuration weights recovered through the normalizer sum to one
        double defect = 0.0;
        for (double q : kFloatQ)
            for (double lam : kFloatLambda) {
                if (!admissible(q, lam)) continue;
                QPoissonModel m(lam, FloatContext(q));
                JanossyFamily fam = JanossyFamily::from_qpoisson(m, DensityModel::uniform(0.0, 2.0));
                long double acc = 0.0L;
                for (int h = 0; h <= fam.n_max(); ++h) acc += janossy_normalizer(fam, h);
                defect = std::max(defect, std::abs(static_cast<double>(acc - 1.0L)));
            }
        push(rows, "janossy-weight-sum", "admissible grid, all h", defect, 1e-10);
    }

    {   // Finite family with a certain count: reconstruction is one term
        double defect = 0.0;
        for (double q : {0.5, 1.0, 2.0}) {
            FloatContext ctx(q);
            DensityModel d = DensityModel::uniform(0.0, 1.0);
            JanossyFamily fam = JanossyFamily::from_weights({0.0, 0.0, 1.0}, d, ctx);
            const double pt[] = {0.25, 0.75};
            auto r1 = janossy_to_product_density(fam, 1, std::span(pt, 1));
            auto r2 = janossy_to_product_density(fam, 2, std::span(pt, 2));
            defect = std::max(defect, std::abs(r1.value - q_number(2, ctx)));
            defect = std::max(defect, std::abs(r2.value - q_factorial(2, ctx)));
            defect = std::max(defect, r1.tail_bound);
            defect = std::max(defect, r2.tail_bound);
        }
        push(rows, "janossy-finite-family", "certain count N = 2, h in {1,2}", defect, 1e-12);
    }

    if (options.include_monte_carlo) {
        {
            QPoissonModel m(1.0, FloatContext(0.5));
            const double stat = chi_square_statistic(m, options.mc_samples, options.seed);
            push(rows, "sampler-chi-square", "q = 0.5, lambda = 1, cells {0..15, tail}", stat,
                 kChiSquare999Df16);
        }
        {
            const std::pair<double, double> range{0.0, 0.3};
            auto report = mc_estimate_classical(10, DensityModel::uniform(0.0, 1.0),
                                                std::span(&range, 1), 2, options.mc_samples,
                                                options.seed);
            double z_mom = 0.0;
            for (const auto& row : report.moments)
                z_mom = std::max(z_mom, std::abs(row.empirical - row.analytic) / row.std_error);
            push(rows, "classical-mc-moment", "N = 10 uniform, range mass 0.3, r <= 2", z_mom, 4.0);
            double z_pair = 0.0;
            for (const auto& row : report.f2)
                z_pair = std::max(z_pair, std::abs(row.estimate - row.expected) / row.std_error);
            push(rows, "classical-mc-pair-density", "N = 10 uniform, all disjoint bin pairs", z_pair,
                 4.0);
        }
    }

    return rows;
}

} // namespace qpd

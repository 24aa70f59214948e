#include "qpd/qdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "qpd/qcomb.hpp"
#include "qpd/textio.hpp"

namespace qpd {

QPoissonModel::QPoissonModel(double lambda, FloatContext ctx, int tail_cap)
    : ctx_(std::move(ctx)), lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::domain_error("QPoissonModel: lambda must be positive and finite");
    const double q = ctx_.q();
    if (q < 1.0 && lambda * (1.0 - q) >= 1.0)
        throw std::domain_error("QPoissonModel: lambda(1-q) >= 1 is inadmissible for q < 1");
    if (q > 1.0 && lambda * (q - 1.0) >= q)
        throw std::domain_error("QPoissonModel: lambda(q-1) >= q is inadmissible for q > 1");
    prefactor_ = q_exp_dual(-lambda, ctx_).value;
    if (!(prefactor_ > 0.0))
        throw std::runtime_error("QPoissonModel: prefactor failed to come out positive");

    double p = prefactor_, qn = 0.0, cum = p;
    pmf_ = {p};
    cdf_ = {cum};
    qn_ = {0.0};
    const int want = tail_cap > 0 ? tail_cap : ctx_.term_cap();
    for (int n = 1; n <= want; ++n) {
        qn = 1.0 + q * qn;
        p *= lambda_ / qn;
        cum += p;
        pmf_.push_back(p);
        cdf_.push_back(cum);
        qn_.push_back(qn);
        if (tail_cap == 0 && cum >= 1.0 - 1e-12) break;
    }
    if (tail_cap == 0 && cum < 1.0 - 1e-12)
        throw std::runtime_error("QPoissonModel: pmf table failed to cover the mass");
}

double QPoissonModel::pmf(int n) const {
    if (n < 0) throw std::invalid_argument("QPoissonModel::pmf: negative n");
    if (n < static_cast<int>(pmf_.size())) return pmf_[static_cast<size_t>(n)];
    double p = pmf_.back(), qn = qn_.back();
    for (int k = static_cast<int>(pmf_.size()); k <= n; ++k) {
        qn = 1.0 + ctx_.q() * qn;
        p *= lambda_ / qn;
    }
    return p;
}

double QPoissonModel::normalization_defect() const {
    long double acc = 0.0L;
    for (double p : pmf_) acc += p;
    return std::abs(static_cast<double>(acc - 1.0L));
}

double QPoissonModel::moment(int r) const {
    if (r < 0) throw std::invalid_argument("QPoissonModel::moment: negative r");
    const double q = ctx_.q();
    long double acc = r == 0 ? static_cast<long double>(prefactor_) : 0.0L;
    double p = prefactor_, qn = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 1;; ++n) {
        if (n > ctx_.term_cap()) throw std::runtime_error("QPoissonModel::moment: term cap exceeded");
        qn = 1.0 + q * qn;
        p *= lambda_ / qn;
        const double t = detail::pow_int(qn, r) * p;
        acc += t;
        if (n > r + 2 && t <= prev && t < 1e-18 * (1.0 + std::abs(static_cast<double>(acc)))) break;
        prev = t;
    }
    return static_cast<double>(acc);
}

double QPoissonModel::mean() const { return moment(1); }

double QPoissonModel::factorial_moment(int k) const {
    if (k < 0) throw std::invalid_argument("QPoissonModel::factorial_moment: negative k");
    if (k == 0) return moment(0);
    // t_n = [n][n-1]...[n-k+1] P(n) obeys t_{n+1} = t_n lambda/[n+1-k].
    long double acc = 0.0L;
    double t = q_factorial(k, ctx_) * pmf(k);
    acc += t;
    double qlo = 0.0;   // [n-k]
    double prev = std::numeric_limits<double>::infinity();
    for (int n = k;;) {
        ++n;
        if (n > ctx_.term_cap())
            throw std::runtime_error("QPoissonModel::factorial_moment: term cap exceeded");
        qlo = 1.0 + ctx_.q() * qlo;
        t *= lambda_ / qlo;
        acc += t;
        if (n > k + 2 && t <= prev && t < 1e-18 * (1.0 + std::abs(static_cast<double>(acc)))) break;
        prev = t;
    }
    return static_cast<double>(acc);
}

double QPoissonModel::moment_via_stirling(int r) const {
    if (r < 1) throw std::invalid_argument("QPoissonModel::moment_via_stirling: r must be >= 1");
    auto table = shared_stirling_table(r);
    double acc = 0.0, lp = 1.0;
    for (int s = 1; s <= r; ++s) {
        lp *= lambda_;
        acc += table->entry(r, s).evaluate(ctx_.q()) * lp;
    }
    return acc;
}

PowerSeries<double> QPoissonModel::generating_series(int order) const {
    PowerSeries<double> out(order);
    double p = prefactor_, qn = 0.0;
    out.set_coefficient(0, p);
    for (int n = 1; n <= order; ++n) {
        qn = 1.0 + ctx_.q() * qn;
        p *= lambda_ / qn;
        out.set_coefficient(n, p);
    }
    return out;
}

int QPoissonModel::sample(std::mt19937_64& rng) const {
    const double u = uniform01(rng);
    auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return static_cast<int>(cdf_.size()) - 1;
    return static_cast<int>(it - cdf_.begin());
}

namespace {

// Smallest order whose dropped tail, weighted by [n]^r, is negligible.
int weighted_tail_order(const QPoissonModel& model, int r) {
    const double q = model.context().q();
    int order = model.tail_cap();
    double p = model.pmf(order);
    double qn = q_number(order, model.context());
    while (order < model.context().term_cap()) {
        if (detail::pow_int(qn, r) * p < 1e-22) break;
        ++order;
        qn = 1.0 + q * qn;
        p *= model.lambda() / qn;
    }
    return order;
}

} // namespace

double moment_via_operator(const QPoissonModel& model, int r) {
    if (r < 0) throw std::invalid_argument("moment_via_operator: negative r");
    const int order = weighted_tail_order(model, r);
    auto weighted = apply_u_dq_operator(model.generating_series(order), r, model.context());
    return weighted.evaluate(1.0);
}

double factorial_moment_via_series(const QPoissonModel& model, int s) {
    if (s < 0) throw std::invalid_argument("factorial_moment_via_series: negative s");
    auto series = model.generating_series(weighted_tail_order(model, s));
    for (int k = 0; k < s; ++k) series = q_derivative(series, model.context());
    return series.evaluate(1.0);
}

MomentReportSet empirical_moment_report(const QPoissonModel& model, int r_max,
                                        long long samples, std::uint64_t seed) {
    if (r_max < 1) throw std::invalid_argument("empirical_moment_report: r_max must be >= 1");
    if (samples < 0) throw std::invalid_argument("empirical_moment_report: negative sample count");
    MomentReportSet set;
    set.q = model.q();
    set.lambda = model.lambda();
    set.seed = seed;
    set.samples = samples;

    std::vector<long double> s1(static_cast<size_t>(r_max) + 1, 0.0L);
    std::vector<long double> s2(static_cast<size_t>(r_max) + 1, 0.0L);
    if (samples > 0) {
        std::mt19937_64 rng(seed);
        std::vector<double> pows(static_cast<size_t>(2 * r_max) + 1, 1.0);
        for (long long i = 0; i < samples; ++i) {
            const int n = model.sample(rng);
            const double v = q_number(n, model.context());
            for (int r = 1; r <= 2 * r_max; ++r) pows[static_cast<size_t>(r)] = pows[static_cast<size_t>(r) - 1] * v;
            for (int r = 1; r <= r_max; ++r) {
                s1[static_cast<size_t>(r)] += pows[static_cast<size_t>(r)];
                s2[static_cast<size_t>(r)] += pows[static_cast<size_t>(2 * r)];
            }
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int r = 1; r <= r_max; ++r) {
        MomentReport row;
        row.r = r;
        row.analytic = model.moment(r);
        row.via_stirling = model.moment_via_stirling(r);
        if (samples > 0) {
            const long double m1 = s1[static_cast<size_t>(r)] / samples;
            const long double m2 = s2[static_cast<size_t>(r)] / samples;
            long double var = m2 - m1 * m1;
            if (var < 0) var = 0;
            row.empirical = static_cast<double>(m1);
            row.std_error = static_cast<double>(std::sqrt(static_cast<double>(var / samples)));
        } else {
            row.empirical = nan;
            row.std_error = nan;
        }
        set.rows.push_back(row);
    }
    return set;
}

double chi_square_statistic(const QPoissonModel& model, long long samples,
                            std::uint64_t seed, int cells) {
    if (cells < 1) throw std::invalid_argument("chi_square_statistic: cells must be >= 1");
    if (samples < 1) throw std::invalid_argument("chi_square_statistic: samples must be >= 1");
    std::vector<long long> obs(static_cast<size_t>(cells) + 1, 0);
    std::mt19937_64 rng(seed);
    for (long long i = 0; i < samples; ++i) {
        const int n = model.sample(rng);
        ++obs[static_cast<size_t>(n < cells ? n : cells)];
    }
    long double stat = 0.0L, cum = 0.0L;
    for (int c = 0; c < cells; ++c) {
        const long double e = static_cast<long double>(samples) * model.pmf(c);
        cum += model.pmf(c);
        const long double d = static_cast<long double>(obs[static_cast<size_t>(c)]) - e;
        stat += d * d / e;
    }
    const long double etail = static_cast<long double>(samples) * (1.0L - cum);
    if (etail > 0) {
        const long double d = static_cast<long double>(obs[static_cast<size_t>(cells)]) - etail;
        stat += d * d / etail;
    }
    return static_cast<double>(stat);
}

void write_json(std::ostream& out, const MomentReportSet& set) {
    nlohmann::ordered_json j;
    j["q"] = set.q;
    j["lambda"] = set.lambda;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : set.rows) {
        nlohmann::ordered_json o;
        o["r"] = row.r;
        o["analytic"] = row.analytic;
        o["via_stirling"] = row.via_stirling;
        if (std::isnan(row.empirical)) {
            o["empirical"] = nullptr;
            o["stderr"] = nullptr;
        } else {
            o["empirical"] = row.empirical;
            o["stderr"] = row.std_error;
        }
        rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    j["seed"] = set.seed;
    j["samples"] = set.samples;
    out << j.dump(2) << '\n';
}

void write_csv(std::ostream& out, const MomentReportSet& set) {
    out << "q,lambda,seed,samples,r,analytic,via_stirling,empirical,stderr\n";
    for (const auto& row : set.rows) {
        out << fmt_g(set.q) << ',' << fmt_g(set.lambda) << ',' << set.seed << ','
            << set.samples << ',' << row.r << ',' << fmt_g(row.analytic) << ','
            << fmt_g(row.via_stirling) << ',';
        if (!std::isnan(row.empirical)) out << fmt_g(row.empirical);
        out << ',';
        if (!std::isnan(row.std_error)) out << fmt_g(row.std_error);
        out << '\n';
    }
}

} // namespace qpd

#include "qpd/qcomb.hpp"

#include <cmath>
#include <mutex>
#include <ostream>

#include "qpd/textio.hpp"

namespace qpd {

StirlingTable::StirlingTable(int r_max) {
    if (r_max < 1) throw std::invalid_argument("StirlingTable: r_max must be at least 1");
    rows_.reserve(static_cast<size_t>(r_max));
    rows_.push_back({QPoly::constant(1)});   // C(1,1) = 1
    for (int r = 2; r <= r_max; ++r) {
        const auto& prev = rows_.back();
        std::vector<QPoly> row(static_cast<size_t>(r));
        for (int s = 1; s <= r; ++s) {
            QPoly v;
            if (s - 1 >= 1 && s - 1 <= r - 1)
                v += prev[static_cast<size_t>(s) - 2].shifted(s - 1);   // q^{s-1} C(r-1,s-1)
            if (s <= r - 1)
                v += q_number_poly(s) * prev[static_cast<size_t>(s) - 1];
            row[static_cast<size_t>(s) - 1] = std::move(v);
        }
        rows_.push_back(std::move(row));
    }
}

const QPoly& StirlingTable::entry(int r, int s) const {
    static const QPoly zero;
    if (r < 1 || r > r_max()) throw std::out_of_range("StirlingTable::entry: r out of range");
    if (s < 0) throw std::out_of_range("StirlingTable::entry: negative s");
    if (s == 0 || s > r) return zero;
    return rows_[static_cast<size_t>(r) - 1][static_cast<size_t>(s) - 1];
}

StirlingTable build_stirling_table(int r_max) { return StirlingTable(r_max); }

std::shared_ptr<const StirlingTable> shared_stirling_table(int r_max) {
    static std::mutex mu;
    static std::shared_ptr<const StirlingTable> cache;
    std::lock_guard<std::mutex> lock(mu);
    int want = r_max < 16 ? 16 : r_max;
    if (!cache || cache->r_max() < want) {
        if (cache && want < 2 * cache->r_max()) want = 2 * cache->r_max();
        cache = std::make_shared<const StirlingTable>(want);
    }
    return cache;
}

QPoly q_stirling_poly(int r, int s) {
    if (r < 1) throw std::invalid_argument("q_stirling_poly: r must be at least 1");
    if (s < 1 || s > r) throw std::domain_error("q_stirling_poly: requires 1 <= s <= r");
    return shared_stirling_table(r)->entry(r, s);
}

std::pair<QPoly, QPoly> verify_falling_expansion(int r, int N) {
    if (r < 1 || N < 1) throw std::invalid_argument("verify_falling_expansion: r, N must be >= 1");
    QPoly lhs = QPoly::constant(1);
    const QPoly base = q_number_poly(N);
    for (int i = 0; i < r; ++i) lhs *= base;
    auto table = shared_stirling_table(r);
    QPoly rhs;
    const int s_max = r < N ? r : N;   // s > N contributes an [0] = 0 factor
    for (int s = 1; s <= s_max; ++s)
        rhs += table->entry(r, s) * q_falling_factorial_poly(N, s);
    return {lhs, rhs};
}

QPoly q_bell_poly(int r) {
    if (r < 1) throw std::invalid_argument("q_bell_poly: r must be at least 1");
    auto table = shared_stirling_table(r);
    QPoly acc;
    for (int s = 1; s <= r; ++s) acc += table->entry(r, s);
    return acc;
}

double q_bell_dobinsky(int r, const FloatContext& ctx) {
    if (r < 1) throw std::invalid_argument("q_bell_dobinsky: r must be at least 1");
    const double q = ctx.q();
    const double norm = q_exp(1.0, ctx).value;   // converges for every q > 0 at x = 1
    double acc = 0.0;
    double qn = 1.0;     // [1]
    double term = 1.0;   // [1]^r/[1]! = 1
    for (int n = 1;; ++n) {
        acc += term;
        if (n >= ctx.term_cap()) throw std::runtime_error("q_bell_dobinsky: term cap exceeded");
        const double qn1 = 1.0 + q * qn;
        term *= detail::pow_int(qn1 / qn, r) / qn1;   // t_{n+1} = t_n ([n+1]/[n])^r / [n+1]
        qn = qn1;
        if (n > r && term < ctx.epsilon()) break;
    }
    return acc / norm;
}

namespace {

mpf_class pow_mpf(const mpf_class& base, int e) {
    mpf_class acc(1, base.get_prec()), b(base);
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

// sum_N [N]^r lambda^N/[N]! at prec_bits, relative cutoff 2^-(prec_bits/2).
mpf_class dobinsky_series_mpf(int r, const mpf_class& lambda, const mpq_class& q,
                              int term_cap, int prec_bits) {
    const auto prec = static_cast<mp_bitcnt_t>(prec_bits);
    mpf_class qf(q, prec);
    mpf_class acc(0, prec), qn(1, prec), qn1(0, prec), term(0, prec), ratio(0, prec);
    term = lambda;   // [1]^r lambda/[1]!
    mpf_class rel(1, prec);
    mpf_div_2exp(rel.get_mpf_t(), rel.get_mpf_t(), static_cast<mp_bitcnt_t>(prec_bits / 2));
    for (int n = 1;; ++n) {
        acc += term;
        if (n >= term_cap) throw std::runtime_error("dobinsky_series_mpf: term cap exceeded");
        qn1 = 1 + qf * qn;
        ratio = qn1 / qn;
        term *= pow_mpf(ratio, r) * lambda / qn1;
        qn = qn1;
        if (n > r && abs(term) < rel * (1 + abs(acc))) break;
    }
    return acc;
}

} // namespace

mpf_class q_bell_dobinsky(int r, const ExactContext& ctx, int prec_bits) {
    if (r < 1) throw std::invalid_argument("q_bell_dobinsky: r must be at least 1");
    const auto prec = static_cast<mp_bitcnt_t>(prec_bits);
    mpf_class one(1, prec);
    mpf_class norm = q_exp_mpf(one, ctx.q(), ctx.term_cap(), prec_bits);
    mpf_class series = dobinsky_series_mpf(r, one, ctx.q(), ctx.term_cap(), prec_bits);
    mpf_class out(0, prec);
    out = series / norm;
    return out;
}

std::pair<double, double> dobinsky_generating(int r, double lambda, const FloatContext& ctx) {
    if (r < 1) throw std::invalid_argument("dobinsky_generating: r must be at least 1");
    if (!(lambda > 0)) throw std::domain_error("dobinsky_generating: lambda must be positive");
    const double q = ctx.q();
    auto table = shared_stirling_table(r);
    double lhs = 0.0, lp = 1.0;
    for (int s = 1; s <= r; ++s) {
        lp *= lambda;
        lhs += table->entry(r, s).evaluate(q) * lp;
    }
    const double norm = q_exp(lambda, ctx).value;   // also enforces the domain
    double acc = 0.0, qn = 1.0, term = lambda;
    for (int n = 1;; ++n) {
        acc += term;
        if (n >= ctx.term_cap()) throw std::runtime_error("dobinsky_generating: term cap exceeded");
        const double qn1 = 1.0 + q * qn;
        term *= detail::pow_int(qn1 / qn, r) * lambda / qn1;
        qn = qn1;
        if (n > r && std::abs(term) < ctx.epsilon()) break;
    }
    return {lhs, acc / norm};
}

std::pair<mpf_class, mpf_class> dobinsky_generating(int r, const mpq_class& lambda,
                                                    const ExactContext& ctx, int prec_bits) {
    if (r < 1) throw std::invalid_argument("dobinsky_generating: r must be at least 1");
    if (!(lambda > 0)) throw std::domain_error("dobinsky_generating: lambda must be positive");
    const mpq_class& q = ctx.q();
    if (q < 1) {
        mpq_class bound = lambda * (1 - q);
        if (bound >= 1) throw std::domain_error("dobinsky_generating: lambda(1-q) >= 1");
    }
    const auto prec = static_cast<mp_bitcnt_t>(prec_bits);
    auto table = shared_stirling_table(r);
    mpq_class lhs_q = 0, lp = 1;
    for (int s = 1; s <= r; ++s) {
        lp *= lambda;
        lhs_q += table->entry(r, s).evaluate(q) * lp;
    }
    mpf_class lhs(lhs_q, prec);
    mpf_class lf(lambda, prec);
    mpf_class norm = q_exp_mpf(lf, q, ctx.term_cap(), prec_bits);
    mpf_class series = dobinsky_series_mpf(r, lf, q, ctx.term_cap(), prec_bits);
    mpf_class rhs(0, prec);
    rhs = series / norm;
    return {lhs, rhs};
}

void write_stirling_csv(std::ostream& out, const StirlingTable& table,
                        std::optional<double> q_value) {
    out << "r,s,polynomial,value\n";
    for (int r = 1; r <= table.r_max(); ++r) {
        for (int s = 1; s <= r; ++s) {
            const QPoly& p = table.entry(r, s);
            out << r << ',' << s << ',' << '"' << p.to_string() << '"' << ',';
            if (q_value) out << fmt_g(p.evaluate(*q_value));
            out << '\n';
        }
    }
}

} // namespace qpd

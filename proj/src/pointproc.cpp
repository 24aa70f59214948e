#include "qpd/pointproc.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "qpd/textio.hpp"

namespace qpd {

DensityModel::DensityModel(DensityKind kind, std::vector<double> xs, std::vector<double> ys)
    : kind_(kind), xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() < 2 || xs_.size() != ys_.size())
        throw std::invalid_argument("DensityModel: need matching breakpoint and value lists, at least 2");
    for (size_t i = 0; i + 1 < xs_.size(); ++i)
        if (!(xs_[i] < xs_[i + 1]))
            throw std::invalid_argument("DensityModel: breakpoints must be strictly increasing");
    for (double y : ys_)
        if (!(y >= 0.0) || !std::isfinite(y))
            throw std::invalid_argument("DensityModel: values must be finite and nonnegative");
    double total = 0.0;
    for (size_t i = 0; i + 1 < xs_.size(); ++i)
        total += 0.5 * (ys_[i] + ys_[i + 1]) * (xs_[i + 1] - xs_[i]);
    if (!(total > 0.0)) throw std::invalid_argument("DensityModel: total mass must be positive");
    for (double& y : ys_) y /= total;
    cum_.assign(xs_.size(), 0.0);
    for (size_t i = 0; i + 1 < xs_.size(); ++i)
        cum_[i + 1] = cum_[i] + 0.5 * (ys_[i] + ys_[i + 1]) * (xs_[i + 1] - xs_[i]);
    cum_.back() = 1.0;
}

DensityModel DensityModel::uniform(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("DensityModel::uniform: need lo < hi");
    return DensityModel(DensityKind::uniform, {lo, hi}, {1.0, 1.0});
}

DensityModel DensityModel::piecewise_linear(std::vector<double> xs, std::vector<double> ys) {
    return DensityModel(DensityKind::piecewise_linear, std::move(xs), std::move(ys));
}

double DensityModel::operator()(double e) const {
    if (e < lower() || e > upper()) return 0.0;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), e);
    size_t i = it == xs_.begin() ? 0 : static_cast<size_t>(it - xs_.begin()) - 1;
    if (i + 1 >= xs_.size()) i = xs_.size() - 2;
    const double h = xs_[i + 1] - xs_[i];
    const double t = (e - xs_[i]) / h;
    return ys_[i] + (ys_[i + 1] - ys_[i]) * t;
}

double DensityModel::integral(double lo, double hi) const {
    if (!(lo <= hi)) throw std::invalid_argument("DensityModel::integral: need lo <= hi");
    if (lo < lower() || hi > upper())
        throw std::domain_error("DensityModel::integral: range leaves the support");
    // F(x) = cum_ at the segment start plus the trapezoid up to x.
    auto F = [&](double x) {
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        size_t i = it == xs_.begin() ? 0 : static_cast<size_t>(it - xs_.begin()) - 1;
        if (i + 1 >= xs_.size()) i = xs_.size() - 2;
        const double h = xs_[i + 1] - xs_[i];
        const double t = x - xs_[i];
        const double slope = (ys_[i + 1] - ys_[i]) / h;
        return cum_[i] + ys_[i] * t + 0.5 * slope * t * t;
    };
    return F(hi) - F(lo);
}

double DensityModel::sample(std::mt19937_64& rng) const {
    const double u = uniform01(rng);
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    size_t i = it == cum_.begin() ? 0 : static_cast<size_t>(it - cum_.begin()) - 1;
    if (i + 1 >= cum_.size()) i = cum_.size() - 2;
    const double h = xs_[i + 1] - xs_[i];
    const double m = u - cum_[i];
    const double y0 = ys_[i];
    const double slope = (ys_[i + 1] - ys_[i]) / h;
    // Solve y0 t + slope t^2/2 = m in the cancellation-free form.
    const double disc = y0 * y0 + 2.0 * slope * m;
    const double root = std::sqrt(disc > 0.0 ? disc : 0.0);
    double t = y0 + root > 0.0 ? 2.0 * m / (y0 + root) : 0.0;
    if (t < 0.0) t = 0.0;
    if (t > h) t = h;
    return xs_[i] + t;
}

double product_density_coefficient(const FixedNProcess& process, int m) {
    return product_density_coefficient(process.particle_count, m, process.ctx);
}

double moment_over_range(const FixedNProcess& process, int r, double lo, double hi) {
    const double p = process.density.integral(lo, hi);
    return moment_over_range_coefficient(process.particle_count, r, p, process.ctx);
}

std::pair<double, double> verify_marginalization(const FixedNProcess& process, int h) {
    return verify_marginalization(process.particle_count, h, process.ctx);
}

JanossyFamily::JanossyFamily(std::vector<double> weights, DensityModel density,
                             FloatContext ctx, bool poisson_tail, double lambda)
    : weights_(std::move(weights)), density_(std::move(density)), ctx_(std::move(ctx)),
      poisson_tail_(poisson_tail), lambda_(lambda) {}

JanossyFamily JanossyFamily::from_qpoisson(const QPoissonModel& model, DensityModel density) {
    std::vector<double> w;
    w.reserve(static_cast<size_t>(model.tail_cap()) + 1);
    for (int n = 0; n <= model.tail_cap(); ++n) w.push_back(model.pmf(n));
    return JanossyFamily(std::move(w), std::move(density), model.context(), true, model.lambda());
}

JanossyFamily JanossyFamily::from_weights(std::vector<double> weights, DensityModel density,
                                          FloatContext ctx) {
    if (weights.empty()) throw std::invalid_argument("JanossyFamily: empty weight list");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("JanossyFamily: weights must be finite and nonnegative");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("JanossyFamily: total weight must be positive");
    for (double& w : weights) w /= total;
    return JanossyFamily(std::move(weights), std::move(density), std::move(ctx), false, 0.0);
}

double JanossyFamily::weight(int n) const {
    if (n < 0) throw std::invalid_argument("JanossyFamily::weight: negative n");
    if (n > n_max()) return 0.0;
    return weights_[static_cast<size_t>(n)];
}

double janossy_normalizer(const JanossyFamily& family, int h) {
    if (h < 0) throw std::invalid_argument("janossy_normalizer: negative h");
    if (h > family.n_max()) throw std::domain_error("janossy_normalizer: h exceeds the family support");
    const double mass = family.density().integral(family.density().lower(), family.density().upper());
    return family.weight(h) * detail::pow_int(mass, h);
}

JanossyReconstruction janossy_to_product_density(const JanossyFamily& family, int h,
                                                 std::span<const double> points) {
    if (h < 1) throw std::invalid_argument("janossy_to_product_density: h must be >= 1");
    if (static_cast<int>(points.size()) != h)
        throw std::invalid_argument("janossy_to_product_density: need exactly h points");
    if (h > family.n_max())
        throw std::domain_error("janossy_to_product_density: h exceeds the family support");
    double fprod = 1.0;
    for (double e : points) {
        if (e < family.density().lower() || e > family.density().upper())
            throw std::domain_error("janossy_to_product_density: point outside the support");
        fprod *= family.density()(e);
    }
    const FloatContext& ctx = family.context();
    const double q = ctx.q();
    // Falling product tracked by ff(N+1,h) = ff(N,h) [N+1]/[N+1-h].
    long double acc = 0.0L;
    double ff = q_factorial(h, ctx);
    double qhi = q_number(h, ctx);   // [N]
    double qlo = 0.0;                // [N-h]
    acc += family.weight(h) * ff;
    for (int N = h + 1; N <= family.n_max(); ++N) {
        qhi = 1.0 + q * qhi;
        qlo = 1.0 + q * qlo;
        ff *= qhi / qlo;
        acc += family.weight(N) * ff;
    }
    double tail = 0.0;
    if (family.has_poisson_tail()) {
        // Past the stored weights the family keeps its closed form, so the
        // series is continued through t(N+1) = t(N) lam/[N+1-h] until the
        // terms stop mattering; only the geometrically dominated remainder
        // is reported as a bound.
        const double lam = family.lambda();
        double t = family.weight(family.n_max()) * ff;
        double qlo_run = qlo;
        double rho = lam / (1.0 + q * qlo_run);
        for (int iter = 0; t > 0.0 && iter < ctx.term_cap(); ++iter) {
            qlo_run = 1.0 + q * qlo_run;
            t *= lam / qlo_run;
            acc += t;
            rho = lam / (1.0 + q * qlo_run);
            if (rho < 1.0 && t < 1e-16 * (1.0 + std::abs(static_cast<double>(acc)))) break;
        }
        tail = rho < 1.0 ? t * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
    }
    return {static_cast<double>(acc) * fprod, tail * std::abs(fprod)};
}

namespace {

struct BlockSums {
    std::vector<long double> mom1, mom2;   // per (range, r)
    std::vector<long double> bin1, bin2;   // per bin
    std::vector<long double> pair1, pair2; // per bin pair i < j

    explicit BlockSums(size_t n_mom, size_t n_bins, size_t n_pairs)
        : mom1(n_mom, 0.0L), mom2(n_mom, 0.0L), bin1(n_bins, 0.0L), bin2(n_bins, 0.0L),
          pair1(n_pairs, 0.0L), pair2(n_pairs, 0.0L) {}

    void add(const BlockSums& o) {
        for (size_t k = 0; k < mom1.size(); ++k) { mom1[k] += o.mom1[k]; mom2[k] += o.mom2[k]; }
        for (size_t k = 0; k < bin1.size(); ++k) { bin1[k] += o.bin1[k]; bin2[k] += o.bin2[k]; }
        for (size_t k = 0; k < pair1.size(); ++k) { pair1[k] += o.pair1[k]; pair2[k] += o.pair2[k]; }
    }
};

BlockSums run_block(std::uint64_t sub_seed, long long replicates, int N,
                    const DensityModel& density,
                    std::span<const std::pair<double, double>> ranges, int r_max, int bins) {
    const size_t n_ranges = ranges.size();
    const size_t n_pairs = static_cast<size_t>(bins) * (bins - 1) / 2;
    BlockSums sums(n_ranges * static_cast<size_t>(r_max), static_cast<size_t>(bins), n_pairs);
    std::mt19937_64 rng(sub_seed);
    const double lo = density.lower();
    const double width = density.upper() - lo;
    std::vector<int> bin_counts(static_cast<size_t>(bins));
    std::vector<int> range_counts(n_ranges);
    for (long long rep = 0; rep < replicates; ++rep) {
        std::fill(bin_counts.begin(), bin_counts.end(), 0);
        std::fill(range_counts.begin(), range_counts.end(), 0);
        for (int k = 0; k < N; ++k) {
            const double x = density.sample(rng);
            int b = static_cast<int>((x - lo) / width * bins);
            if (b < 0) b = 0;
            if (b >= bins) b = bins - 1;
            ++bin_counts[static_cast<size_t>(b)];
            for (size_t ri = 0; ri < n_ranges; ++ri)
                if (x >= ranges[ri].first && x < ranges[ri].second)
                    ++range_counts[ri];
        }
        for (size_t ri = 0; ri < n_ranges; ++ri) {
            double p = 1.0;
            const double c = range_counts[ri];
            for (int r = 1; r <= r_max; ++r) {
                p *= c;
                const size_t k = ri * static_cast<size_t>(r_max) + static_cast<size_t>(r) - 1;
                sums.mom1[k] += p;
                sums.mom2[k] += p * p;
            }
        }
        size_t pk = 0;
        for (int i = 0; i < bins; ++i) {
            const double ci = bin_counts[static_cast<size_t>(i)];
            sums.bin1[static_cast<size_t>(i)] += ci;
            sums.bin2[static_cast<size_t>(i)] += ci * ci;
            for (int j = i + 1; j < bins; ++j, ++pk) {
                const double v = ci * bin_counts[static_cast<size_t>(j)];
                sums.pair1[pk] += v;
                sums.pair2[pk] += v * v;
            }
        }
    }
    return sums;
}

} // namespace

EstimateReport mc_estimate_classical(int particle_count, const DensityModel& density,
                                     std::span<const std::pair<double, double>> ranges,
                                     int r_max, long long samples, std::uint64_t seed, int bins) {
    if (particle_count < 1) throw std::invalid_argument("mc_estimate_classical: need at least one point");
    if (r_max < 1) throw std::invalid_argument("mc_estimate_classical: r_max must be >= 1");
    if (samples < 1) throw std::invalid_argument("mc_estimate_classical: samples must be >= 1");
    if (bins < 2) throw std::invalid_argument("mc_estimate_classical: need at least 2 bins");
    std::vector<double> masses;
    for (const auto& [lo, hi] : ranges) masses.push_back(density.integral(lo, hi));

    constexpr int kBlocks = 32;
    std::vector<std::future<BlockSums>> futures;
    const long long base = samples / kBlocks;
    const long long extra = samples % kBlocks;
    for (int b = 0; b < kBlocks; ++b) {
        const long long reps = base + (b < extra ? 1 : 0);
        if (reps == 0) continue;
        futures.push_back(std::async(std::launch::async, run_block, mix_seed(seed, static_cast<std::uint64_t>(b)),
                                     reps, particle_count, std::cref(density), ranges, r_max, bins));
    }
    const size_t n_pairs = static_cast<size_t>(bins) * (bins - 1) / 2;
    BlockSums total(ranges.size() * static_cast<size_t>(r_max), static_cast<size_t>(bins), n_pairs);
    for (auto& f : futures) total.add(f.get());

    EstimateReport report;
    report.particle_count = particle_count;
    report.samples = samples;
    report.seed = seed;
    report.blocks = kBlocks;
    const double lo = density.lower();
    const double width = (density.upper() - lo) / bins;
    for (int b = 0; b <= bins; ++b) report.bin_edges.push_back(lo + width * b);

    const long double M = static_cast<long double>(samples);
    const FloatContext classical(1.0);
    for (size_t ri = 0; ri < ranges.size(); ++ri) {
        for (int r = 1; r <= r_max; ++r) {
            const size_t k = ri * static_cast<size_t>(r_max) + static_cast<size_t>(r) - 1;
            const long double m1 = total.mom1[k] / M;
            long double var = total.mom2[k] / M - m1 * m1;
            if (var < 0) var = 0;
            RangeMomentRow row;
            row.lo = ranges[ri].first;
            row.hi = ranges[ri].second;
            row.mass = masses[ri];
            row.r = r;
            row.empirical = static_cast<double>(m1);
            row.analytic = moment_over_range_coefficient(particle_count, r, masses[ri], classical);
            row.std_error = std::sqrt(static_cast<double>(var / M));
            report.moments.push_back(row);
        }
    }
    for (int b = 0; b < bins; ++b) {
        const long double m1 = total.bin1[static_cast<size_t>(b)] / M;
        long double var = total.bin2[static_cast<size_t>(b)] / M - m1 * m1;
        if (var < 0) var = 0;
        BinDensityRow row;
        row.lo = report.bin_edges[static_cast<size_t>(b)];
        row.hi = report.bin_edges[static_cast<size_t>(b) + 1];
        const double p = density.integral(row.lo, row.hi);
        row.estimate = static_cast<double>(m1) / width;
        row.expected = particle_count * p / width;
        row.std_error = std::sqrt(static_cast<double>(var / M)) / width;
        report.f1.push_back(row);
    }
    size_t pk = 0;
    for (int i = 0; i < bins; ++i) {
        const double pi = density.integral(report.bin_edges[static_cast<size_t>(i)],
                                           report.bin_edges[static_cast<size_t>(i) + 1]);
        for (int j = i + 1; j < bins; ++j, ++pk) {
            const double pj = density.integral(report.bin_edges[static_cast<size_t>(j)],
                                               report.bin_edges[static_cast<size_t>(j) + 1]);
            const long double m1 = total.pair1[pk] / M;
            long double var = total.pair2[pk] / M - m1 * m1;
            if (var < 0) var = 0;
            PairDensityRow row;
            row.i = i;
            row.j = j;
            row.estimate = static_cast<double>(m1) / (width * width);
            row.expected = static_cast<double>(particle_count) * (particle_count - 1) * (pi / width) * (pj / width);
            row.std_error = std::sqrt(static_cast<double>(var / M)) / (width * width);
            report.f2.push_back(row);
        }
    }
    return report;
}

void write_csv(std::ostream& out, const EstimateReport& report) {
    out << "section,lo,hi,i,j,r,estimate,expected,std_error\n";
    for (const auto& row : report.moments)
        out << "moment," << fmt_g(row.lo) << ',' << fmt_g(row.hi) << ",,," << row.r << ','
            << fmt_g(row.empirical) << ',' << fmt_g(row.analytic) << ',' << fmt_g(row.std_error) << '\n';
    for (const auto& row : report.f1)
        out << "f1," << fmt_g(row.lo) << ',' << fmt_g(row.hi) << ",,,," << fmt_g(row.estimate)
            << ',' << fmt_g(row.expected) << ',' << fmt_g(row.std_error) << '\n';
    for (const auto& row : report.f2)
        out << "f2,,," << row.i << ',' << row.j << ",," << fmt_g(row.estimate) << ','
            << fmt_g(row.expected) << ',' << fmt_g(row.std_error) << '\n';
}

void write_json(std::ostream& out, const EstimateReport& report) {
    nlohmann::ordered_json j;
    j["n"] = report.particle_count;
    j["samples"] = report.samples;
    j["seed"] = report.seed;
    j["blocks"] = report.blocks;
    j["bin_edges"] = report.bin_edges;
    auto moments = nlohmann::ordered_json::array();
    for (const auto& row : report.moments)
        moments.push_back({{"lo", row.lo}, {"hi", row.hi}, {"mass", row.mass}, {"r", row.r},
                           {"empirical", row.empirical}, {"analytic", row.analytic},
                           {"stderr", row.std_error}});
    j["moments"] = std::move(moments);
    auto f1 = nlohmann::ordered_json::array();
    for (const auto& row : report.f1)
        f1.push_back({{"lo", row.lo}, {"hi", row.hi}, {"estimate", row.estimate},
                      {"expected", row.expected}, {"stderr", row.std_error}});
    j["f1"] = std::move(f1);
    auto f2 = nlohmann::ordered_json::array();
    for (const auto& row : report.f2)
        f2.push_back({{"i", row.i}, {"j", row.j}, {"estimate", row.estimate},
                      {"expected", row.expected}, {"stderr", row.std_error}});
    j["f2"] = std::move(f2);
    out << j.dump(2) << '\n';
}

} // namespace qpd

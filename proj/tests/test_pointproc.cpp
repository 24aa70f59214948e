#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "qpd/pointproc.hpp"

using namespace qpd;

TEST_CASE("uniform density") {
    auto d = DensityModel::uniform(0.0, 2.0);
    CHECK(d.kind() == DensityKind::uniform);
    CHECK(d.lower() == 0.0);
    CHECK(d.upper() == 2.0);
    CHECK(d(1.0) == doctest::Approx(0.5));
    CHECK(d(-0.1) == 0.0);
    CHECK(d(2.1) == 0.0);
    CHECK(d.integral(0.0, 2.0) == doctest::Approx(1.0));
    CHECK(d.integral(0.0, 0.6) == doctest::Approx(0.3));
    CHECK(d.integral(0.5, 0.5) == doctest::Approx(0.0));
    CHECK_THROWS_AS(d.integral(-0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(d.integral(1.0, 2.5), std::domain_error);
    CHECK_THROWS_AS(DensityModel::uniform(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("piecewise-linear density") {
    // tent on [0,1]: peak 1 at 1/2, auto-normalized (raw mass 1/2)
    auto d = DensityModel::piecewise_linear({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
    CHECK(d.kind() == DensityKind::piecewise_linear);
    CHECK(d(0.5) == doctest::Approx(2.0));
    CHECK(d(0.25) == doctest::Approx(1.0));
    CHECK(d.integral(0.0, 1.0) == doctest::Approx(1.0));
    CHECK(d.integral(0.0, 0.5) == doctest::Approx(0.5));
    CHECK(d.integral(0.25, 0.75) == doctest::Approx(0.75));   // 1 - 2 * (1/8)
    CHECK_THROWS_AS(DensityModel::piecewise_linear({0.0, 0.0}, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(DensityModel::piecewise_linear({0.0, 1.0}, {-1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(DensityModel::piecewise_linear({0.0, 1.0}, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(DensityModel::piecewise_linear({0.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("density sampling matches the shape") {
    auto d = DensityModel::piecewise_linear({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
    std::mt19937_64 rng(kDefaultSeed);
    const long long M = 200000;
    long double acc = 0.0L, acc2 = 0.0L;
    long long in_left_quarter = 0;
    for (long long i = 0; i < M; ++i) {
        const double x = d.sample(rng);
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        acc += x;
        acc2 += x * x;
        if (x < 0.25) ++in_left_quarter;
    }
    const double mean = static_cast<double>(acc / M);
    const double se = std::sqrt(static_cast<double>((acc2 / M - acc / M * (acc / M)) / M));
    CHECK(std::abs(mean - 0.5) < 4.0 * se);   // symmetric tent
    // P(x < 1/4) = 1/8 for the tent
    const double p = static_cast<double>(in_left_quarter) / M;
    const double pse = std::sqrt(0.125 * 0.875 / M);
    CHECK(std::abs(p - 0.125) < 4.0 * pse);
}

TEST_CASE("product density coefficient") {
    FixedNProcess proc{5, DensityModel::uniform(0.0, 1.0), FloatContext(1.0)};
    CHECK(product_density_coefficient(proc, 1) == doctest::Approx(5.0));
    CHECK(product_density_coefficient(proc, 2) == doctest::Approx(20.0));
    CHECK(product_density_coefficient(proc, 5) == doctest::Approx(120.0));
    ExactContext two(mpq_class(2));
    CHECK(product_density_coefficient(3, 2, two) == 21);   // [3][2]
    CHECK_THROWS_AS(product_density_coefficient(3, 0, two), std::invalid_argument);
    CHECK_THROWS_AS(product_density_coefficient(3, 4, two), std::domain_error);
}

TEST_CASE("count moment over a sub-range") {
    // binomial oracle at q = 1: N = 10, p = 0.3, E n = 3, E n^2 = 11.1
    FixedNProcess proc{10, DensityModel::uniform(0.0, 1.0), FloatContext(1.0)};
    CHECK(moment_over_range(proc, 1, 0.0, 0.3) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(moment_over_range(proc, 2, 0.0, 0.3) == doctest::Approx(11.1).epsilon(1e-12));
    // deformed spot value: N = 2, r = 2, p = 1/2, q = 2:
    // C(2,1)[2]p + C(2,2)[2][1]p^2 = 3/2 + 2 * 3 * 1/4 = 3
    ExactContext two(mpq_class(2));
    CHECK(moment_over_range_coefficient(2, 2, mpq_class(1, 2), two) == 3);
    // whole range collapses to [N]^r, exactly
    for (const auto& q : {mpq_class(1, 2), mpq_class(2)}) {
        ExactContext ctx(q);
        for (int N = 1; N <= 6; ++N)
            for (int r = 1; r <= 6; ++r)
                CHECK(moment_over_range_coefficient(N, r, mpq_class(1), ctx) ==
                      detail::pow_int(q_number(N, ctx), r));
    }
}

TEST_CASE("marginalization routes agree exactly") {
    ExactContext two(mpq_class(2));
    auto [direct, marginalized] = verify_marginalization(3, 1, two);
    CHECK(direct == 7);
    CHECK(marginalized == 7);
    for (const auto& q : {mpq_class(1, 2), mpq_class(2), mpq_class(7, 3)}) {
        ExactContext ctx(q);
        for (int N = 2; N <= 8; ++N)
            for (int h = 1; h < N; ++h) {
                auto [a, b] = verify_marginalization(N, h, ctx);
                CHECK(a == b);
            }
    }
    CHECK_THROWS_AS(verify_marginalization(3, 3, two), std::domain_error);
    CHECK_THROWS_AS(verify_marginalization(3, 0, two), std::domain_error);
    FixedNProcess proc{4, DensityModel::uniform(0.0, 1.0), FloatContext(0.5)};
    auto [fa, fb] = verify_marginalization(proc, 2);
    CHECK(fa == doctest::Approx(fb).epsilon(1e-14));
}

TEST_CASE("janossy family construction") {
    QPoissonModel model(1.0, FloatContext(0.5));
    auto fam = JanossyFamily::from_qpoisson(model, DensityModel::uniform(0.0, 1.0));
    CHECK(fam.n_max() == model.tail_cap());
    CHECK(fam.has_poisson_tail());
    CHECK(fam.weight(0) == doctest::Approx(model.pmf(0)));
    CHECK(fam.weight(fam.n_max() + 5) == 0.0);
    CHECK_THROWS_AS(fam.weight(-1), std::invalid_argument);

    auto finite = JanossyFamily::from_weights({1.0, 3.0}, DensityModel::uniform(0.0, 1.0),
                                              FloatContext(1.0));
    CHECK_FALSE(finite.has_poisson_tail());
    CHECK(finite.weight(0) == doctest::Approx(0.25));   // normalized
    CHECK(finite.weight(1) == doctest::Approx(0.75));
    CHECK_THROWS_AS(JanossyFamily::from_weights({}, DensityModel::uniform(0.0, 1.0),
                                                FloatContext(1.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(JanossyFamily::from_weights({0.0, 0.0}, DensityModel::uniform(0.0, 1.0),
                                                FloatContext(1.0)),
                    std::invalid_argument);
}

TEST_CASE("janossy normalizers recover the weights") {
    QPoissonModel model(1.0, FloatContext(0.5));
    auto fam = JanossyFamily::from_qpoisson(model, DensityModel::uniform(0.0, 2.0));
    for (int h = 0; h <= 5; ++h)
        CHECK(janossy_normalizer(fam, h) == doctest::Approx(model.pmf(h)).epsilon(1e-12));
    long double total = 0.0L;
    for (int h = 0; h <= fam.n_max(); ++h) total += janossy_normalizer(fam, h);
    CHECK(std::abs(static_cast<double>(total) - 1.0) < 1e-10);
    // classical weights give the textbook values
    QPoissonModel classical(1.0, FloatContext(1.0));
    auto cfam = JanossyFamily::from_qpoisson(classical, DensityModel::uniform(0.0, 1.0));
    CHECK(janossy_normalizer(cfam, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(janossy_normalizer(cfam, 2) == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("reconstruction collapses for deformed Poisson weights") {
    const double pts[] = {0.3, 0.7, 1.1};
    for (double q : {0.3, 0.5, 0.9, 1.0, 1.5, 2.0}) {
        for (double lam : {0.5, 1.0, 2.0}) {
            if (q < 1.0 && lam * (1.0 - q) >= 1.0) continue;
            if (q > 1.0 && lam * (q - 1.0) >= q) continue;
            QPoissonModel model(lam, FloatContext(q));
            auto fam = JanossyFamily::from_qpoisson(model, DensityModel::uniform(0.0, 2.0));
            double expect = 1.0;
            for (int h = 1; h <= 3; ++h) {
                expect *= lam * 0.5;   // f0 = 1/2
                auto rec = janossy_to_product_density(fam, h, std::span(pts, static_cast<size_t>(h)));
                CHECK(std::abs(rec.value - expect) < 1e-8);
                CHECK(rec.tail_bound < 1e-8);
            }
        }
    }
}

TEST_CASE("reconstruction includes the N = h term") {
    // all weight on exactly two points: f_1 = [2] f0, f_2 = [2]! f0^2
    for (double q : {0.5, 1.0, 2.0}) {
        FloatContext ctx(q);
        auto fam = JanossyFamily::from_weights({0.0, 0.0, 1.0}, DensityModel::uniform(0.0, 1.0), ctx);
        const double pts[] = {0.25, 0.75};
        auto r1 = janossy_to_product_density(fam, 1, std::span(pts, 1));
        CHECK(r1.value == doctest::Approx(1.0 + q).epsilon(1e-14));
        CHECK(r1.tail_bound == 0.0);
        auto r2 = janossy_to_product_density(fam, 2, std::span(pts, 2));
        CHECK(r2.value == doctest::Approx(1.0 + q).epsilon(1e-14));   // [2]! = [2]
    }
}

TEST_CASE("reconstruction input validation") {
    QPoissonModel model(1.0, FloatContext(0.5));
    auto fam = JanossyFamily::from_qpoisson(model, DensityModel::uniform(0.0, 1.0));
    const double inside[] = {0.5};
    const double outside[] = {1.5};
    CHECK_THROWS_AS(janossy_to_product_density(fam, 0, std::span(inside, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(janossy_to_product_density(fam, 2, std::span(inside, 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(janossy_to_product_density(fam, 1, std::span(outside, 1)), std::domain_error);
    CHECK_THROWS_AS(janossy_normalizer(fam, fam.n_max() + 1), std::domain_error);
}

TEST_CASE("classical monte carlo against the binomial oracle") {
    const std::pair<double, double> range{0.0, 0.3};
    auto report = mc_estimate_classical(10, DensityModel::uniform(0.0, 1.0), std::span(&range, 1),
                                        2, 100000, kDefaultSeed);
    CHECK(report.moments.size() == 2);
    CHECK(report.f1.size() == 10);
    CHECK(report.f2.size() == 45);
    CHECK(report.bin_edges.size() == 11);
    for (const auto& row : report.moments) {
        CHECK(row.std_error > 0.0);
        CHECK(std::abs(row.empirical - row.analytic) < 4.0 * row.std_error);
    }
    CHECK(report.moments[0].analytic == doctest::Approx(3.0));
    CHECK(report.moments[1].analytic == doctest::Approx(11.1));
    for (const auto& row : report.f1) {
        CHECK(row.expected == doctest::Approx(10.0));
        CHECK(std::abs(row.estimate - row.expected) < 4.0 * row.std_error);
    }
    for (const auto& row : report.f2) {
        CHECK(row.expected == doctest::Approx(90.0));
        CHECK(std::abs(row.estimate - row.expected) < 4.0 * row.std_error);
    }
}

TEST_CASE("monte carlo is deterministic for a fixed seed") {
    const std::pair<double, double> range{0.2, 0.8};
    auto a = mc_estimate_classical(5, DensityModel::uniform(0.0, 1.0), std::span(&range, 1), 2,
                                   20000, 99);
    auto b = mc_estimate_classical(5, DensityModel::uniform(0.0, 1.0), std::span(&range, 1), 2,
                                   20000, 99);
    std::ostringstream ja, jb;
    write_json(ja, a);
    write_json(jb, b);
    CHECK(ja.str() == jb.str());
    auto c = mc_estimate_classical(5, DensityModel::uniform(0.0, 1.0), std::span(&range, 1), 2,
                                   20000, 100);
    std::ostringstream jc;
    write_json(jc, c);
    CHECK(ja.str() != jc.str());
}

TEST_CASE("monte carlo input validation") {
    const std::pair<double, double> range{0.0, 0.5};
    auto d = DensityModel::uniform(0.0, 1.0);
    CHECK_THROWS_AS(mc_estimate_classical(0, d, std::span(&range, 1), 2, 100, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_estimate_classical(5, d, std::span(&range, 1), 0, 100, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(mc_estimate_classical(5, d, std::span(&range, 1), 2, 0, 1),
                    std::invalid_argument);
    const std::pair<double, double> bad{-1.0, 0.5};
    CHECK_THROWS_AS(mc_estimate_classical(5, d, std::span(&bad, 1), 2, 100, 1), std::domain_error);
}

TEST_CASE("report serialization") {
    const std::pair<double, double> range{0.0, 0.5};
    auto report = mc_estimate_classical(3, DensityModel::uniform(0.0, 1.0), std::span(&range, 1),
                                        1, 1000, 7, 4);
    std::ostringstream cs;
    write_csv(cs, report);
    CHECK(cs.str().find("section,lo,hi,i,j,r,estimate,expected,std_error\n") == 0);
    CHECK(cs.str().find("moment,") != std::string::npos);
    CHECK(cs.str().find("f1,") != std::string::npos);
    CHECK(cs.str().find("f2,,,0,1,") != std::string::npos);
    std::ostringstream js;
    write_json(js, report);
    auto parsed = nlohmann::json::parse(js.str());
    CHECK(parsed["n"] == 3);
    CHECK(parsed["samples"] == 1000);
    CHECK(parsed["blocks"] == 32);
    CHECK(parsed["bin_edges"].size() == 5);
    CHECK(parsed["moments"].size() == 1);
    CHECK(parsed["f1"].size() == 4);
    CHECK(parsed["f2"].size() == 6);
}

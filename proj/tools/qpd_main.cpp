#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpd/identities.hpp"
#include "qpd/pointproc.hpp"
#include "qpd/qcalc.hpp"
#include "qpd/qcomb.hpp"
#include "qpd/qdist.hpp"
#include "qpd/textio.hpp"

namespace {

using namespace qpd;

// Flag or value problems that CLI11 cannot catch itself; mapped to exit 2.
struct UsageFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_number(const std::string& text, const char* what) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw UsageFailure(std::string(what) + ": not a number: " + text);
    }
    if (pos != text.size()) throw UsageFailure(std::string(what) + ": not a number: " + text);
    return v;
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw UsageFailure(std::string(what) + ": expected \"a,b\", got " + text);
    return {parse_number(text.substr(0, comma), what), parse_number(text.substr(comma + 1), what)};
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    size_t start = 0;
    while (start <= text.size()) {
        size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        out.push_back(parse_number(text.substr(start, comma - start), what));
        start = comma + 1;
    }
    return out;
}

// "x:y,x:y,..." breakpoint list for the piecewise-linear density.
DensityModel parse_density(const std::string& kind, const std::pair<double, double>& support,
                           const std::string& breakpoints) {
    if (kind == "uniform") return DensityModel::uniform(support.first, support.second);
    if (kind != "pwl") throw UsageFailure("--density: expected uniform or pwl");
    if (breakpoints.empty()) throw UsageFailure("--density pwl requires --breakpoints");
    std::vector<double> xs, ys;
    size_t start = 0;
    while (start <= breakpoints.size()) {
        size_t comma = breakpoints.find(',', start);
        if (comma == std::string::npos) comma = breakpoints.size();
        const std::string item = breakpoints.substr(start, comma - start);
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw UsageFailure("--breakpoints: expected \"x:y\" items, got " + item);
        xs.push_back(parse_number(item.substr(0, colon), "--breakpoints"));
        ys.push_back(parse_number(item.substr(colon + 1), "--breakpoints"));
        start = comma + 1;
    }
    return DensityModel::piecewise_linear(std::move(xs), std::move(ys));
}

struct OutputTarget {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit OutputTarget(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open output file: " + path);
        os = &file;
    }
    std::ostream& stream() { return *os; }
};

int run_stirling(int rmax, const std::string& q_text, const std::string& format,
                 const std::string& out_path) {
    std::optional<double> q;
    if (q_text != "symbolic") {
        q = parse_number(q_text, "--q");
        if (!(*q > 0.0)) throw std::domain_error("q must be positive");
    }
    OutputTarget out(out_path);
    auto table = build_stirling_table(rmax);
    if (format == "csv") {
        write_stirling_csv(out.stream(), table, q);
    } else if (format == "json") {
        nlohmann::ordered_json j;
        j["rmax"] = rmax;
        if (q) j["q"] = *q; else j["q"] = "symbolic";
        auto entries = nlohmann::ordered_json::array();
        for (int r = 1; r <= rmax; ++r)
            for (int s = 1; s <= r; ++s) {
                nlohmann::ordered_json e;
                e["r"] = r;
                e["s"] = s;
                e["polynomial"] = table.entry(r, s).to_string();
                if (q) e["value"] = table.entry(r, s).evaluate(*q);
                entries.push_back(std::move(e));
            }
        j["entries"] = std::move(entries);
        out.stream() << j.dump(2) << '\n';
    } else {
        char buf[64];
        if (q)
            out.stream() << "  r   s  value            polynomial\n";
        else
            out.stream() << "  r   s  polynomial\n";
        for (int r = 1; r <= rmax; ++r)
            for (int s = 1; s <= r; ++s) {
                std::snprintf(buf, sizeof buf, "%3d %3d  ", r, s);
                out.stream() << buf;
                if (q) {
                    std::snprintf(buf, sizeof buf, "%-16s ", fmt_g(table.entry(r, s).evaluate(*q)).c_str());
                    out.stream() << buf;
                }
                out.stream() << table.entry(r, s).to_string() << '\n';
            }
    }
    return 0;
}

int run_bell(int rmax, const std::string& q_text, const std::string& format,
             const std::string& out_path) {
    std::optional<double> q;
    if (q_text != "symbolic") {
        q = parse_number(q_text, "--q");
        if (!(*q > 0.0)) throw std::domain_error("q must be positive");
    }
    OutputTarget out(out_path);
    std::ostream& os = out.stream();
    if (format == "json") {
        nlohmann::ordered_json j;
        j["rmax"] = rmax;
        if (q) j["q"] = *q; else j["q"] = "symbolic";
        auto rows = nlohmann::ordered_json::array();
        for (int r = 1; r <= rmax; ++r) {
            nlohmann::ordered_json e;
            e["r"] = r;
            if (q) {
                const double bell = q_bell_poly(r).evaluate(*q);
                const double dob = q_bell_dobinsky(r, FloatContext(*q));
                e["bell"] = bell;
                e["dobinsky"] = dob;
                e["defect"] = std::abs(bell - dob);
            } else {
                e["bell"] = q_bell_poly(r).to_string();
            }
            rows.push_back(std::move(e));
        }
        j["rows"] = std::move(rows);
        os << j.dump(2) << '\n';
        return 0;
    }
    if (format == "csv") {
        if (q) {
            os << "r,bell,dobinsky,defect\n";
            for (int r = 1; r <= rmax; ++r) {
                const double bell = q_bell_poly(r).evaluate(*q);
                const double dob = q_bell_dobinsky(r, FloatContext(*q));
                os << r << ',' << fmt_g(bell) << ',' << fmt_g(dob) << ','
                   << fmt_g(std::abs(bell - dob)) << '\n';
            }
        } else {
            os << "r,polynomial\n";
            for (int r = 1; r <= rmax; ++r)
                os << r << ',' << '"' << q_bell_poly(r).to_string() << '"' << '\n';
        }
        return 0;
    }
    char buf[96];
    if (q) {
        os << "  r  bell             dobinsky         defect\n";
        for (int r = 1; r <= rmax; ++r) {
            const double bell = q_bell_poly(r).evaluate(*q);
            const double dob = q_bell_dobinsky(r, FloatContext(*q));
            std::snprintf(buf, sizeof buf, "%3d  %-16s %-16s %s\n", r, fmt_g(bell).c_str(),
                          fmt_g(dob).c_str(), fmt_g(std::abs(bell - dob)).c_str());
            os << buf;
        }
    } else {
        os << "  r  row sum\n";
        for (int r = 1; r <= rmax; ++r) {
            std::snprintf(buf, sizeof buf, "%3d  ", r);
            os << buf << q_bell_poly(r).to_string() << '\n';
        }
    }
    return 0;
}

int run_poisson(double q, double lambda, int rmax, long long samples, std::uint64_t seed,
                const std::string& format, const std::string& out_path) {
    QPoissonModel model(lambda, FloatContext(q));
    auto set = empirical_moment_report(model, rmax, samples, seed);
    OutputTarget out(out_path);
    std::ostream& os = out.stream();
    if (format == "json") {
        write_json(os, set);
    } else if (format == "csv") {
        write_csv(os, set);
    } else {
        os << "q = " << fmt_g(set.q) << "  lambda = " << fmt_g(set.lambda) << "  seed = " << set.seed
           << "  samples = " << set.samples << '\n';
        os << "  r  analytic         via_stirling     empirical        stderr\n";
        char buf[128];
        for (const auto& row : set.rows) {
            std::snprintf(buf, sizeof buf, "%3d  %-16s %-16s %-16s %s\n", row.r,
                          fmt_g(row.analytic).c_str(), fmt_g(row.via_stirling).c_str(),
                          samples > 0 ? fmt_g(row.empirical).c_str() : "-",
                          samples > 0 ? fmt_g(row.std_error).c_str() : "-");
            os << buf;
        }
    }
    return 0;
}

int run_operator_check(double q, double lambda, int rmax, const std::string& format,
                       const std::string& out_path) {
    QPoissonModel model(lambda, FloatContext(q));
    struct MomRow { int r; double direct, stirling, op, defect; };
    struct FacRow { int s; double expected, series, defect; };
    std::vector<MomRow> moments;
    std::vector<FacRow> factorials;
    double worst = 0.0;
    for (int r = 1; r <= rmax; ++r) {
        MomRow row;
        row.r = r;
        row.direct = model.moment(r);
        row.stirling = model.moment_via_stirling(r);
        row.op = moment_via_operator(model, r);
        row.defect = std::max({std::abs(row.direct - row.stirling),
                               std::abs(row.direct - row.op), std::abs(row.stirling - row.op)});
        worst = std::max(worst, row.defect);
        moments.push_back(row);
    }
    double lp = 1.0;
    for (int s = 1; s <= rmax; ++s) {
        lp *= lambda;
        FacRow row;
        row.s = s;
        row.expected = lp;
        row.series = factorial_moment_via_series(model, s);
        row.defect = std::abs(row.expected - row.series);
        worst = std::max(worst, row.defect);
        factorials.push_back(row);
    }
    OutputTarget out(out_path);
    std::ostream& os = out.stream();
    if (format == "json") {
        nlohmann::ordered_json j;
        j["q"] = q;
        j["lambda"] = lambda;
        auto m = nlohmann::ordered_json::array();
        for (const auto& row : moments)
            m.push_back({{"r", row.r}, {"direct", row.direct}, {"via_stirling", row.stirling},
                         {"via_operator", row.op}, {"defect", row.defect}});
        j["moments"] = std::move(m);
        auto f = nlohmann::ordered_json::array();
        for (const auto& row : factorials)
            f.push_back({{"s", row.s}, {"expected", row.expected}, {"via_series", row.series},
                         {"defect", row.defect}});
        j["factorial"] = std::move(f);
        os << j.dump(2) << '\n';
    } else if (format == "csv") {
        os << "kind,r,direct,via_stirling,via_operator,defect\n";
        for (const auto& row : moments)
            os << "moment," << row.r << ',' << fmt_g(row.direct) << ',' << fmt_g(row.stirling)
               << ',' << fmt_g(row.op) << ',' << fmt_g(row.defect) << '\n';
        for (const auto& row : factorials)
            os << "factorial," << row.s << ',' << fmt_g(row.expected) << ",," << fmt_g(row.series)
               << ',' << fmt_g(row.defect) << '\n';
    } else {
        os << "q = " << fmt_g(q) << "  lambda = " << fmt_g(lambda) << '\n';
        os << "  r  direct           via_stirling     via_operator     defect\n";
        char buf[160];
        for (const auto& row : moments) {
            std::snprintf(buf, sizeof buf, "%3d  %-16s %-16s %-16s %s\n", row.r,
                          fmt_g(row.direct).c_str(), fmt_g(row.stirling).c_str(),
                          fmt_g(row.op).c_str(), fmt_g(row.defect).c_str());
            os << buf;
        }
        os << "  s  lambda^s         via_series       defect\n";
        for (const auto& row : factorials) {
            std::snprintf(buf, sizeof buf, "%3d  %-16s %-16s %s\n", row.s,
                          fmt_g(row.expected).c_str(), fmt_g(row.series).c_str(),
                          fmt_g(row.defect).c_str());
            os << buf;
        }
    }
    return worst <= 1e-9 ? 0 : 1;
}

int run_simulate(int n, const std::vector<std::string>& range_texts, int rmax, long long samples,
                 std::uint64_t seed, int bins, const std::string& density_kind,
                 const std::string& support_text, const std::string& breakpoints,
                 const std::string& format, const std::string& out_path) {
    const auto support = parse_pair(support_text, "--support");
    DensityModel density = parse_density(density_kind, support, breakpoints);
    std::vector<std::pair<double, double>> ranges;
    for (const auto& text : range_texts) ranges.push_back(parse_pair(text, "--range"));
    if (ranges.empty()) ranges.emplace_back(density.lower(), density.lower() + 0.3 * (density.upper() - density.lower()));
    auto report = mc_estimate_classical(n, density, ranges, rmax, samples, seed, bins);
    OutputTarget out(out_path);
    std::ostream& os = out.stream();
    if (format == "json") {
        write_json(os, report);
    } else if (format == "csv") {
        write_csv(os, report);
    } else {
        os << "n = " << report.particle_count << "  samples = " << report.samples << "  seed = "
           << report.seed << "  blocks = " << report.blocks << '\n';
        char buf[160];
        os << "count moments over ranges\n";
        os << "  lo        hi        r  empirical        analytic         stderr\n";
        for (const auto& row : report.moments) {
            std::snprintf(buf, sizeof buf, "  %-9s %-9s %2d  %-16s %-16s %s\n",
                          fmt_g(row.lo, 6).c_str(), fmt_g(row.hi, 6).c_str(), row.r,
                          fmt_g(row.empirical).c_str(), fmt_g(row.analytic).c_str(),
                          fmt_g(row.std_error).c_str());
            os << buf;
        }
        os << "one-point density over bins\n";
        os << "  lo        hi        estimate         expected         stderr\n";
        for (const auto& row : report.f1) {
            std::snprintf(buf, sizeof buf, "  %-9s %-9s %-16s %-16s %s\n", fmt_g(row.lo, 6).c_str(),
                          fmt_g(row.hi, 6).c_str(), fmt_g(row.estimate).c_str(),
                          fmt_g(row.expected).c_str(), fmt_g(row.std_error).c_str());
            os << buf;
        }
        os << "two-point density over bin pairs\n";
        os << "   i   j  estimate         expected         stderr\n";
        for (const auto& row : report.f2) {
            std::snprintf(buf, sizeof buf, "  %2d  %2d  %-16s %-16s %s\n", row.i, row.j,
                          fmt_g(row.estimate).c_str(), fmt_g(row.expected).c_str(),
                          fmt_g(row.std_error).c_str());
            os << buf;
        }
    }
    return 0;
}

int run_janossy(double q, double lambda, int hmax, const std::string& support_text,
                const std::string& density_kind, const std::string& breakpoints,
                const std::string& at_text, const std::string& format,
                const std::string& out_path) {
    const auto support = parse_pair(support_text, "--support");
    DensityModel density = parse_density(density_kind, support, breakpoints);
    QPoissonModel model(lambda, FloatContext(q));
    JanossyFamily family = JanossyFamily::from_qpoisson(model, density);

    std::vector<double> points;
    if (!at_text.empty()) {
        points = parse_list(at_text, "--at");
        hmax = static_cast<int>(points.size());
    } else {
        for (int i = 1; i <= hmax; ++i)
            points.push_back(density.lower() + (density.upper() - density.lower()) * i / (hmax + 1));
    }

    struct Row { int h; double value, expected, defect, tail; };
    std::vector<Row> table;
    const int h_lo = at_text.empty() ? 1 : hmax;
    for (int h = h_lo; h <= hmax; ++h) {
        auto rec = janossy_to_product_density(family, h, std::span(points.data(), static_cast<size_t>(h)));
        double expected = 1.0;
        for (int i = 0; i < h; ++i) expected *= density(points[static_cast<size_t>(i)]);
        expected *= detail::pow_int(lambda, h);
        table.push_back({h, rec.value, expected, std::abs(rec.value - expected), rec.tail_bound});
    }
    long double norm_sum = 0.0L;
    for (int h = 0; h <= family.n_max(); ++h) norm_sum += janossy_normalizer(family, h);

    OutputTarget out(out_path);
    std::ostream& os = out.stream();
    if (format == "json") {
        nlohmann::ordered_json j;
        j["q"] = q;
        j["lambda"] = lambda;
        j["points"] = points;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : table)
            rows.push_back({{"h", row.h}, {"value", row.value}, {"expected", row.expected},
                            {"defect", row.defect}, {"tail_bound", row.tail}});
        j["rows"] = std::move(rows);
        j["normalizer_sum"] = static_cast<double>(norm_sum);
        os << j.dump(2) << '\n';
    } else if (format == "csv") {
        os << "h,value,expected,defect,tail_bound\n";
        for (const auto& row : table)
            os << row.h << ',' << fmt_g(row.value) << ',' << fmt_g(row.expected) << ','
               << fmt_g(row.defect) << ',' << fmt_g(row.tail) << '\n';
        os << "normalizer_sum," << fmt_g(static_cast<double>(norm_sum)) << ",,,\n";
    } else {
        os << "q = " << fmt_g(q) << "  lambda = " << fmt_g(lambda) << '\n';
        os << "  h  value            expected         defect        tail_bound\n";
        char buf[160];
        for (const auto& row : table) {
            std::snprintf(buf, sizeof buf, "%3d  %-16s %-16s %-13s %s\n", row.h,
                          fmt_g(row.value).c_str(), fmt_g(row.expected).c_str(),
                          fmt_g(row.defect).c_str(), fmt_g(row.tail).c_str());
            os << buf;
        }
        os << "normalizer sum = " << fmt_g(static_cast<double>(norm_sum)) << '\n';
    }
    return 0;
}

int run_identity_check(long long samples, std::uint64_t seed, bool skip_mc,
                       const std::string& format, const std::string& out_path) {
    IdentityOptions options;
    options.mc_samples = samples;
    options.seed = seed;
    options.include_monte_carlo = !skip_mc;
    auto rows = run_identity_checks(options);
    OutputTarget out(out_path);
    std::ostream& os = out.stream();
    int failed = 0;
    for (const auto& row : rows)
        if (!row.pass) ++failed;
    if (format == "json") {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& row : rows)
            arr.push_back({{"name", row.name}, {"detail", row.detail}, {"defect", row.defect},
                           {"tolerance", row.tolerance}, {"pass", row.pass}});
        nlohmann::ordered_json j;
        j["checks"] = std::move(arr);
        j["failed"] = failed;
        os << j.dump(2) << '\n';
    } else if (format == "csv") {
        os << "name,detail,defect,tolerance,status\n";
        for (const auto& row : rows)
            os << row.name << ',' << '"' << row.detail << '"' << ',' << fmt_g(row.defect) << ','
               << fmt_g(row.tolerance) << ',' << (row.pass ? "PASS" : "FAIL") << '\n';
    } else {
        char buf[256];
        for (const auto& row : rows) {
            std::snprintf(buf, sizeof buf, "%-32s %-13s %-11s %-4s  %s\n", row.name.c_str(),
                          fmt_g(row.defect, 6).c_str(), fmt_g(row.tolerance, 6).c_str(),
                          row.pass ? "PASS" : "FAIL", row.detail.c_str());
            os << buf;
        }
        os << rows.size() - static_cast<size_t>(failed) << " of " << rows.size() << " checks passed\n";
    }
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deformed counting toolkit: coefficient triangles, count distributions, point-process checks"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI/TOML file");

    std::string format = "table", out_path, q_text = "symbolic";
    int rmax = 6;
    double q_num = 0.0, lambda = 1.0;
    long long samples = 0;
    std::uint64_t seed = qpd::kDefaultSeed;

    auto* st = app.add_subcommand("stirling", "coefficient triangle C(r,s)");
    st->add_option("--rmax", rmax, "largest r")->default_val(6)->check(CLI::Range(1, 30));
    st->add_option("--q", q_text, "deformation parameter, or \"symbolic\"")->default_val("symbolic");
    st->add_option("--format", format, "table, csv or json")
        ->default_val("table")->check(CLI::IsMember({"table", "csv", "json"}));
    st->add_option("--out", out_path, "write to file instead of stdout");

    std::string bell_q = "symbolic", bell_format = "table", bell_out;
    int bell_rmax = 8;
    auto* be = app.add_subcommand("bell", "row sums and their series form");
    be->add_option("--rmax", bell_rmax, "largest r")->default_val(8)->check(CLI::Range(1, 30));
    be->add_option("--q", bell_q, "deformation parameter, or \"symbolic\"")->default_val("symbolic");
    be->add_option("--format", bell_format, "table, csv or json")
        ->default_val("table")->check(CLI::IsMember({"table", "csv", "json"}));
    be->add_option("--out", bell_out, "write to file instead of stdout");

    std::string po_format = "table", po_out;
    int po_rmax = 6;
    long long po_samples = 0;
    std::uint64_t po_seed = qpd::kDefaultSeed;
    auto* po = app.add_subcommand("poisson", "deformed count distribution moments");
    po->add_option("--q", q_num, "deformation parameter")->required();
    po->add_option("--lambda", lambda, "intensity")->required();
    po->add_option("--rmax", po_rmax, "largest moment order")->default_val(6)->check(CLI::Range(1, 12));
    po->add_option("--samples", po_samples, "empirical sample count (0 skips sampling)")
        ->default_val(0)->check(CLI::Range(0LL, 100000000LL));
    po->add_option("--seed", po_seed, "generator seed")->default_val(qpd::kDefaultSeed);
    po->add_option("--format", po_format, "table, csv or json")
        ->default_val("table")->check(CLI::IsMember({"table", "csv", "json"}));
    po->add_option("--out", po_out, "write to file instead of stdout");

    double oc_q = 0.0, oc_lambda = 1.0;
    int oc_rmax = 4;
    std::string oc_format = "table", oc_out;
    auto* oc = app.add_subcommand("operator-check", "moment routes through the series operator");
    oc->add_option("--q", oc_q, "deformation parameter")->required();
    oc->add_option("--lambda", oc_lambda, "intensity")->required();
    oc->add_option("--rmax", oc_rmax, "largest order")->default_val(4)->check(CLI::Range(1, 8));
    oc->add_option("--format", oc_format, "table, csv or json")
        ->default_val("table")->check(CLI::IsMember({"table", "csv", "json"}));
    oc->add_option("--out", oc_out, "write to file instead of stdout");

    int si_n = 10, si_rmax = 2, si_bins = 10;
    long long si_samples = 200000;
    std::uint64_t si_seed = qpd::kDefaultSeed;
    std::vector<std::string> si_ranges;
    std::string si_density = "uniform", si_support = "0,1", si_breakpoints;
    std::string si_format = "table", si_out;
    auto* si = app.add_subcommand("simulate", "classical Monte Carlo over the fixed-count process");
    si->add_option("--n", si_n, "points per replicate")->default_val(10)->check(CLI::Range(1, 1000));
    si->add_option("--range", si_ranges, "count range \"lo,hi\" (repeatable)");
    si->add_option("--rmax", si_rmax, "largest count moment")->default_val(2)->check(CLI::Range(1, 8));
    si->add_option("--samples", si_samples, "replicates")->default_val(200000)
        ->check(CLI::Range(1LL, 100000000LL));
    si->add_option("--seed", si_seed, "generator seed")->default_val(qpd::kDefaultSeed);
    si->add_option("--bins", si_bins, "bins for the density estimates")->default_val(10)
        ->check(CLI::Range(2, 200));
    si->add_option("--density", si_density, "uniform or pwl")->default_val("uniform")
        ->check(CLI::IsMember({"uniform", "pwl"}));
    si->add_option("--support", si_support, "density support \"lo,hi\"")->default_val("0,1");
    si->add_option("--breakpoints", si_breakpoints, "pwl shape \"x:y,x:y,...\"");
    si->add_option("--format", si_format, "table, csv or json")
        ->default_val("table")->check(CLI::IsMember({"table", "csv", "json"}));
    si->add_option("--out", si_out, "write to file instead of stdout");

    double ja_q = 0.0, ja_lambda = 1.0;
    int ja_hmax = 3;
    std::string ja_support = "0,1", ja_density = "uniform", ja_breakpoints, ja_at;
    std::string ja_format = "table", ja_out;
    auto* ja = app.add_subcommand("janossy", "reconstruct product densities from configuration weights");
    ja->add_option("--q", ja_q, "deformation parameter")->required();
    ja->add_option("--lambda", ja_lambda, "intensity")->required();
    ja->add_option("--hmax", ja_hmax, "largest order")->default_val(3)->check(CLI::Range(1, 6));
    ja->add_option("--support", ja_support, "density support \"lo,hi\"")->default_val("0,1");
    ja->add_option("--density", ja_density, "uniform or pwl")->default_val("uniform")
        ->check(CLI::IsMember({"uniform", "pwl"}));
    ja->add_option("--breakpoints", ja_breakpoints, "pwl shape \"x:y,x:y,...\"");
    ja->add_option("--at", ja_at, "evaluation points \"e1,e2,...\" (h = point count)");
    ja->add_option("--format", ja_format, "table, csv or json")
        ->default_val("table")->check(CLI::IsMember({"table", "csv", "json"}));
    ja->add_option("--out", ja_out, "write to file instead of stdout");

    long long ic_samples = 200000;
    std::uint64_t ic_seed = qpd::kDefaultSeed;
    bool ic_skip_mc = false;
    std::string ic_format = "table", ic_out;
    auto* ic = app.add_subcommand("identity-check", "run the structural check battery");
    ic->add_option("--samples", ic_samples, "Monte Carlo sample count")->default_val(200000)
        ->check(CLI::Range(1000LL, 100000000LL));
    ic->add_option("--seed", ic_seed, "generator seed")->default_val(qpd::kDefaultSeed);
    ic->add_flag("--no-mc", ic_skip_mc, "skip the Monte Carlo rows");
    ic->add_option("--format", ic_format, "table, csv or json")
        ->default_val("table")->check(CLI::IsMember({"table", "csv", "json"}));
    ic->add_option("--out", ic_out, "write to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*st) return run_stirling(rmax, q_text, format, out_path);
        if (*be) return run_bell(bell_rmax, bell_q, bell_format, bell_out);
        if (*po) return run_poisson(q_num, lambda, po_rmax, po_samples, po_seed, po_format, po_out);
        if (*oc) return run_operator_check(oc_q, oc_lambda, oc_rmax, oc_format, oc_out);
        if (*si) return run_simulate(si_n, si_ranges, si_rmax, si_samples, si_seed, si_bins,
                                     si_density, si_support, si_breakpoints, si_format, si_out);
        if (*ja) return run_janossy(ja_q, ja_lambda, ja_hmax, ja_support, ja_density,
                                    ja_breakpoints, ja_at, ja_format, ja_out);
        if (*ic) return run_identity_check(ic_samples, ic_seed, ic_skip_mc, ic_format, ic_out);
    } catch (const UsageFailure& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

// Command-line front end for the rangebound library.
//
//   rangebound bound    --input spec.json [--tol 1e-10] [--format json|csv]
//   rangebound extremal --input spec.json
//   rangebound verify   --input spec-or-extremal.json [--samples N] [--seed S]
//   rangebound compare  --input spec.json [--format csv]
//   rangebound paper-examples

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "rangebound/rangebound.h"

namespace {

using ordered = nlohmann::ordered_json;

struct Config {
    std::string input;
    double tol = 1e-10;
    std::uint64_t seed = 0;
    std::size_t samples = 1000000;
    std::string format = "json";
};

// Carries a message and the process exit code.
struct Failure {
    int code;
    std::string message;
};

void check(rb_status s) {
    if (s == RB_OK) return;
    throw Failure{s == RB_NO_CONVERGENCE ? 2 : 1, rb_last_error()};
}

struct SpecDeleter {
    void operator()(rb_spec* p) const { rb_spec_free(p); }
};
struct ReportDeleter {
    void operator()(rb_report* p) const { rb_report_free(p); }
};
struct JointDeleter {
    void operator()(rb_joint* p) const { rb_joint_free(p); }
};
struct MatrixDeleter {
    void operator()(rb_matrix* p) const { rb_matrix_free(p); }
};
struct StringDeleter {
    void operator()(char* p) const { rb_string_free(p); }
};

using Spec = std::unique_ptr<rb_spec, SpecDeleter>;
using Report = std::unique_ptr<rb_report, ReportDeleter>;
using Joint = std::unique_ptr<rb_joint, JointDeleter>;
using Matrix = std::unique_ptr<rb_matrix, MatrixDeleter>;

std::string take(char* s) {
    std::unique_ptr<char, StringDeleter> guard(s);
    return s ? std::string(s) : std::string();
}

std::string read_input(const std::string& path) {
    if (path.empty()) throw Failure{1, "--input is required (a path, or - for stdin)"};
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    std::ifstream in(path);
    if (!in) throw Failure{1, "cannot open input file " + path};
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json parse_document(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Failure{1, std::string("input is not valid JSON: ") + e.what()};
    }
}

Spec make_spec(const std::vector<double>& mu, const std::vector<double>& sigma) {
    if (mu.size() != sigma.size()) throw Failure{1, "mu and sigma differ in length"};
    rb_spec* s = nullptr;
    check(rb_spec_create(mu.data(), sigma.data(), mu.size(), &s));
    return Spec(s);
}

Spec spec_from_text(const std::string& text) {
    rb_spec* s = nullptr;
    check(rb_spec_from_json(text.c_str(), &s));
    return Spec(s);
}

rb_solver_options options(const Config& cfg) {
    rb_solver_options o;
    rb_solver_options_default(&o);
    o.tol = cfg.tol;
    return o;
}

Report bound_of(const rb_spec* spec, const Config& cfg) {
    const rb_solver_options o = options(cfg);
    rb_report* r = nullptr;
    check(rb_bound(spec, &o, &r));
    return Report(r);
}

rb_report_values values_of(const rb_report* r) {
    rb_report_values v;
    check(rb_report_get(r, &v));
    return v;
}

std::string number(double x) { return nlohmann::json(x).dump(); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

// One "key,value" row per scalar member of a flat JSON object.
void print_csv(const ordered& j) {
    std::cout << "key,value\n";
    for (const auto& [key, value] : j.items()) {
        if (value.is_structured()) continue;
        std::cout << csv_field(key) << ',' << (value.is_string() ? csv_field(value.get<std::string>()) : value.dump())
                  << '\n';
    }
}

void emit(const ordered& j, const Config& cfg) {
    if (cfg.format == "csv")
        print_csv(j);
    else
        std::cout << j.dump() << '\n';
}

// ---------------------------------------------------------------------------

int run_bound(const Config& cfg) {
    Spec spec = spec_from_text(read_input(cfg.input));
    Report report = bound_of(spec.get(), cfg);
    char* text = nullptr;
    check(rb_report_to_json(report.get(), &text));
    emit(ordered::parse(take(text)), cfg);
    return 0;
}

const char* uniqueness_name(rb_uniqueness u) {
    switch (u) {
        case RB_UNIQUE: return "unique";
        case RB_NOT_UNIQUE: return "not-unique";
        default: return "unknown";
    }
}

int run_extremal(const Config& cfg) {
    if (cfg.format != "json") throw Failure{1, "extremal output is JSON only"};
    Spec spec = spec_from_text(read_input(cfg.input));
    const rb_solver_options o = options(cfg);
    rb_joint* j = nullptr;
    rb_matrix* m = nullptr;
    rb_report* r = nullptr;
    rb_uniqueness u = RB_UNKNOWN;
    check(rb_extremal(spec.get(), &o, &j, &m, &r, &u));
    Joint joint(j);
    Matrix coupling(m);
    Report report(r);

    char* s = nullptr;
    ordered out;
    check(rb_spec_to_json(spec.get(), &s));
    out["spec"] = ordered::parse(take(s));
    out["rho"] = values_of(report.get()).rho;
    out["uniqueness"] = uniqueness_name(u);
    check(rb_joint_to_json(joint.get(), &s));
    out["joint"] = ordered::parse(take(s));
    check(rb_matrix_to_json(coupling.get(), &s));
    out["coupling"] = ordered::parse(take(s));
    std::cout << out.dump() << '\n';
    return 0;
}

int run_verify(const Config& cfg) {
    const std::string text = read_input(cfg.input);
    const nlohmann::json doc = parse_document(text);
    Spec spec;
    Joint joint;
    if (doc.is_object() && doc.contains("joint")) {
        if (!doc.contains("spec")) throw Failure{1, "extremal document has no \"spec\" field"};
        spec = spec_from_text(doc["spec"].dump());
        rb_joint* j = nullptr;
        check(rb_joint_from_json(doc["joint"].dump().c_str(), &j));
        joint.reset(j);
    } else {
        spec = spec_from_text(text);
        const rb_solver_options o = options(cfg);
        rb_joint* j = nullptr;
        check(rb_extremal(spec.get(), &o, &j, nullptr, nullptr, nullptr));
        joint.reset(j);
    }

    const double rho = values_of(bound_of(spec.get(), cfg).get()).rho;
    char* s = nullptr;
    check(rb_check_moments_json(joint.get(), spec.get(), cfg.tol, &s));
    const ordered moments = ordered::parse(take(s));
    const double er = moments["expected_range"].get<double>();
    const double range_error = std::abs(er - rho);
    const bool range_pass = range_error <= 1e-9 * std::max(1.0, std::abs(rho));

    double est = 0.0, se = 0.0;
    check(rb_mc_expected_range(joint.get(), cfg.samples, cfg.seed, &est, &se));
    const bool mc_pass = se > 0.0 ? std::abs(est - er) <= 4.0 * se : std::abs(est - er) <= 1e-12 * std::max(1.0, er);

    const bool pass = moments["pass"].get<bool>() && range_pass && mc_pass;
    ordered out;
    out["rho"] = rho;
    out["expected_range"] = er;
    out["range_error"] = range_error;
    out["range_pass"] = range_pass;
    out["moments_pass"] = moments["pass"];
    out["mc_estimate"] = est;
    out["mc_std_error"] = se;
    out["mc_pass"] = mc_pass;
    out["pass"] = pass;
    if (cfg.format == "json") out["moments"] = moments;
    emit(out, cfg);
    return pass ? 0 : 1;
}

int run_compare(const Config& cfg) {
    Spec spec = spec_from_text(read_input(cfg.input));
    const rb_solver_options o = options(cfg);
    rb_comparison c;
    check(rb_compare(spec.get(), &o, &c));
    ordered out;
    out["rho"] = c.rho;
    out["ag"] = c.ag;
    out["bnt_range"] = c.bnt_range;
    if (c.has_plackett) out["plackett"] = c.plackett;
    out["infimum"] = c.infimum;
    emit(out, cfg);
    return 0;
}

// ---------------------------------------------------------------------------

struct Target {
    std::string example;
    std::string quantity;
    double value;
    double target;
    double tolerance;
};

class Checklist {
public:
    void add(std::string example, std::string quantity, double value, double target, double tol) {
        items_.push_back({std::move(example), std::move(quantity), value, target, tol});
    }
    bool pass(const Target& t) const { return std::abs(t.value - t.target) <= t.tolerance; }
    bool all() const {
        for (const auto& t : items_)
            if (!pass(t)) return false;
        return true;
    }
    const std::vector<Target>& items() const { return items_; }

private:
    std::vector<Target> items_;
};

struct Atom {
    std::vector<double> x;
    double p;
};

std::vector<Atom> atoms_of(const rb_joint* j) {
    std::vector<Atom> out(rb_joint_size(j));
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].x.resize(rb_joint_dimension(j));
        check(rb_joint_point(j, k, out[k].x.data(), &out[k].p));
    }
    return out;
}

Joint extremal_joint(const rb_spec* spec, const Config& cfg) {
    const rb_solver_options o = options(cfg);
    rb_joint* j = nullptr;
    check(rb_extremal(spec, &o, &j, nullptr, nullptr, nullptr));
    return Joint(j);
}

// Largest deviation between a joint and an expected list of atoms, matched
// by nearest support point; infinity when the sizes differ.
double joint_deviation(const rb_joint* j, const std::vector<Atom>& expected) {
    const auto got = atoms_of(j);
    if (got.size() != expected.size()) return INFINITY;
    double worst = 0.0;
    for (const auto& e : expected) {
        double best = INFINITY;
        const Atom* match = nullptr;
        for (const auto& g : got) {
            double d = 0.0;
            for (std::size_t i = 0; i < e.x.size(); ++i) d = std::max(d, std::abs(g.x[i] - e.x[i]));
            if (d < best) best = d, match = &g;
        }
        worst = std::max({worst, best, std::abs(match->p - e.p)});
    }
    return worst;
}

int run_paper_examples(const Config& cfg) {
    Checklist list;

    {
        const char* name = "Remark 3.1";
        Spec spec = make_spec({-1, 0, 1}, {1, std::sqrt(3.0), std::sqrt(2.0)});
        const auto v = values_of(bound_of(spec.get(), cfg).get());
        list.add(name, "ag", v.ag, 4.0, 1e-10);
        list.add(name, "rho", v.rho, 4.0, 1e-9);
        std::vector<double> pp(3), pm(3);
        check(rb_extremal_marginals(spec.get(), v.c, v.lambda, pp.data(), pm.data()));
        const double ep[] = {0.0, 3.0 / 8, 5.0 / 8}, em[] = {0.5, 3.0 / 8, 1.0 / 8};
        for (int i = 0; i < 3; ++i) {
            list.add(name, "p_plus[" + std::to_string(i) + "]", pp[i], ep[i], 1e-9);
            list.add(name, "p_minus[" + std::to_string(i) + "]", pm[i], em[i], 1e-9);
        }
        Joint joint = extremal_joint(spec.get(), cfg);
        const double dev = joint_deviation(
            joint.get(), {{{-2, 2, 0}, 0.25}, {{-2, 0, 2}, 0.25}, {{0, -2, 2}, 0.375}, {{0, 2, -2}, 0.125}});
        list.add(name, "joint deviation", dev, 0.0, 1e-9);
    }
    {
        const char* name = "Remark 6.2";
        Spec spec = make_spec({-2, 0, 2}, {1, 3, 1});
        const auto v = values_of(bound_of(spec.get(), cfg).get());
        list.add(name, "lambda", v.lambda, 1.737, 1e-3);
        list.add(name, "rho", v.rho, 6.066, 1e-3);
        list.add(name, "ag", v.ag, 6.164, 1e-3);
        Joint joint = extremal_joint(spec.get(), cfg);
        std::vector<std::pair<double, double>> ranges;
        for (const auto& a : atoms_of(joint.get())) {
            const auto [lo, hi] = std::minmax_element(a.x.begin(), a.x.end());
            const double r = *hi - *lo;
            auto it = std::find_if(ranges.begin(), ranges.end(),
                                   [&](const auto& e) { return std::abs(e.first - r) <= 1e-9; });
            if (it == ranges.end())
                ranges.emplace_back(r, a.p);
            else
                it->second += a.p;
        }
        std::sort(ranges.begin(), ranges.end());
        list.add(name, "distinct range values", static_cast<double>(ranges.size()), 2.0, 0.0);
        if (ranges.size() == 2) {
            list.add(name, "range value 1", ranges[0].first, 5.542, 1e-3);
            list.add(name, "range prob 1", ranges[0].second, 0.254, 1e-3);
            list.add(name, "range value 2", ranges[1].first, 6.245, 1e-3);
            list.add(name, "range prob 2", ranges[1].second, 0.746, 1e-3);
        }
    }
    {
        const char* name = "Example 1";
        Spec spec = make_spec({0, 0, 0}, {1, 1, 1});
        const auto v = values_of(bound_of(spec.get(), cfg).get());
        list.add(name, "rho", v.rho, std::sqrt(6.0), 1e-9);
        list.add(name, "lambda", v.lambda, std::sqrt(6.0) / 4, 1e-9);
        std::vector<double> pp(3), pm(3);
        check(rb_extremal_marginals(spec.get(), v.c, v.lambda, pp.data(), pm.data()));
        for (int i = 0; i < 3; ++i) {
            list.add(name, "p_plus[" + std::to_string(i) + "]", pp[i], 1.0 / 3, 1e-9);
            list.add(name, "p_minus[" + std::to_string(i) + "]", pm[i], 1.0 / 3, 1e-9);
        }
    }
    {
        const char* name = "Example 2";
        Spec spec = make_spec({0, 0, 0}, {1, 1, 3});
        const auto v = values_of(bound_of(spec.get(), cfg).get());
        list.add(name, "rho", v.rho, 3.0 + std::sqrt(2.0), 1e-9);
        list.add(name, "lambda", v.lambda, std::sqrt(2.0) / 2, 1e-9);
        double ag = 0.0;
        check(rb_ag_bound(spec.get(), &ag));
        list.add(name, "ag", ag, std::sqrt(22.0), 1e-9);
    }
    {
        const char* name = "Example 6.1";
        const double mu = 2.0, sigma = 1.0;
        Spec spec = make_spec({-mu, -mu, mu, mu}, {sigma, sigma, sigma, sigma});
        const auto v = values_of(bound_of(spec.get(), cfg).get());
        list.add(name, "rho", v.rho, 2 * mu + 2 * sigma, 1e-6);
        list.add(name, "ag", v.ag, 2 * std::sqrt(2 * (mu * mu + sigma * sigma)), 1e-9);
    }
    {
        const char* name = "Example 6.2";
        const double mu = 3.0, sigma = 1.0, n = 4.0;
        Spec spec = make_spec({0, 0, 0, mu}, {sigma, sigma, sigma, sigma});
        const auto v = values_of(bound_of(spec.get(), cfg).get());
        const double c = v.c;
        const double lhs = c * std::sqrt(n - 1) / std::sqrt(c * c + sigma * sigma);
        const double rhs = (mu - c) / std::sqrt((mu - c) * (mu - c) + sigma * sigma);
        list.add(name, "stationarity residual", lhs - rhs, 0.0, 1e-6);
        const double closed = std::sqrt((n - 1) * (c * c + sigma * sigma)) + std::sqrt((mu - c) * (mu - c) + sigma * sigma);
        list.add(name, "rho", v.rho, closed, 1e-6);
    }

    if (cfg.format == "csv") {
        std::cout << "example,quantity,value,target,tolerance,pass\n";
        for (const auto& t : list.items())
            std::cout << csv_field(t.example) << ',' << csv_field(t.quantity) << ',' << number(t.value) << ','
                      << number(t.target) << ',' << number(t.tolerance) << ',' << (list.pass(t) ? "true" : "false")
                      << '\n';
    } else {
        ordered out;
        out["examples"] = ordered::array();
        for (const auto& t : list.items()) {
            ordered e;
            e["example"] = t.example;
            e["quantity"] = t.quantity;
            e["value"] = std::isfinite(t.value) ? ordered(t.value) : ordered(nullptr);
            e["target"] = t.target;
            e["tolerance"] = t.tolerance;
            e["pass"] = list.pass(t);
            out["examples"].push_back(e);
        }
        out["pass"] = list.all();
        std::cout << out.dump() << '\n';
    }
    return list.all() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tight bounds on the expected range under mean-variance information"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(rb_version()));

    Config cfg;
    app.add_option("--input", cfg.input, "MomentSpec JSON file, or - for stdin");
    app.add_option("--tol", cfg.tol, "solver gradient tolerance and moment tolerance")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "Monte Carlo seed");
    app.add_option("--samples", cfg.samples, "Monte Carlo sample count")->check(CLI::Range(std::size_t{1}, SIZE_MAX));
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "csv"}));

    auto* bound = app.add_subcommand("bound", "tight bound report");
    auto* extremal = app.add_subcommand("extremal", "extremal joint distribution and coupling");
    auto* verify = app.add_subcommand("verify", "rebuild or read an extremal joint and check it");
    auto* compare = app.add_subcommand("compare", "tight bound next to the classical bounds");
    auto* examples = app.add_subcommand("paper-examples", "reproduce the worked examples");
    for (auto* sub : {bound, extremal, verify, compare, examples}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*bound) return run_bound(cfg);
        if (*extremal) return run_extremal(cfg);
        if (*verify) return run_verify(cfg);
        if (*compare) return run_compare(cfg);
        if (*examples) return run_paper_examples(cfg);
    } catch (const Failure& f) {
        std::cerr << "rangebound: error: " << f.message << '\n';
        return f.code;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "rangebound: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

// Command-line driver: problem ingestion, method selection, perturbation
// ensembles, CSV/diagnostics emission.
//
// Exit codes: 0 success, 2 problem/option parse error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "hgm/chebyshev.hpp"
#include "hgm/defusing.hpp"
#include "hgm/fd_collocation.hpp"
#include "hgm/reference.hpp"
#include "hgm/report.hpp"
#include "hgm/variational_fit.hpp"

using json = nlohmann::json;
using namespace hgm;

namespace {

// splitmix64: the documented PRNG behind every seeded ensemble
struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

struct Options {
    std::string problem, output = "out.csv", stepper = "rk4", basis = "monomial:0:10";
    std::string data_arg, f0_arg, oracle;
    double h = 1e-3, rtol = 1e-6, atol = 1e-12, alpha = 1, beta = 1, gamma = 0;
    double rel = 1e-3, threshold_cut = 1.0, at = 0.0, onset_threshold = 0.3;
    long N = 1000, trials = 30;
    int digits = 16, n = 128, match_component = 0;
    std::uint64_t seed = 1;
    std::string cut = "gap", scaling = "match";
    bool gauge = false;
    double gauge_alpha = 0, gauge_beta = 0;
};

template <class R>
struct Problem {
    ScalarOperator<R> op;
    R a, b;
};

template <class R>
Problem<R> load_problem(const std::string& path) {
    if (path.rfind("fixture:", 0) == 0) {
        std::string name = path.substr(8);
        Problem<R> P;
        if (name == "airy") {
            P.op = parse_operator<R>("d^2 - t");
            P.a = R(0);
            P.b = R(10);
            return P;
        }
        if (name == "exp-airy") {
            P.op = parse_operator<R>("d^3 - d^2 - t*d + t - 1");
            P.a = R(-9);
            P.b = R(0);
            return P;
        }
        if (name == "hkn") {
            P.op = hkn_operator<R>(10, 1, R(1));
            P.a = R(1);
            P.b = R(30);
            return P;
        }
        throw DomainError("unknown fixture '" + name + "' (airy, exp-airy, hkn)");
    }
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open problem file " + path);
    json j = json::parse(in);
    std::map<std::string, R> params;
    if (j.contains("params"))
        for (auto& [k, v] : j["params"].items()) {
            if (v.is_string())
                params[k] = from_string<R>(v.template get<std::string>());
            else
                params[k] = scalar<R>::from_double(v.template get<double>());
        }
    Problem<R> P;
    std::string rhs = j.value("rhs", std::string("0"));
    P.op = parse_operator<R>(j.at("operator").get<std::string>(), params, rhs);
    auto iv = j.at("interval");
    P.a = scalar<R>::from_double(iv.at(0).get<double>());
    P.b = scalar<R>::from_double(iv.at(1).get<double>());
    return P;
}

template <class R>
std::vector<DataPoint<R>> parse_data(const std::string& arg) {
    std::vector<DataPoint<R>> out;
    if (arg.empty()) return out;
    std::string text = arg;
    if (arg[0] == '@') {
        std::ifstream in(arg.substr(1));
        if (!in) throw DomainError("cannot open data file " + arg.substr(1));
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        std::stringstream fs(item);
        std::string p, q, d;
        std::getline(fs, p, ':');
        std::getline(fs, q, ':');
        DataPoint<R> dp{from_string<R>(p), from_string<R>(q), 0};
        if (std::getline(fs, d, ':')) dp.deriv_order = std::stoi(d);
        out.push_back(dp);
    }
    return out;
}

template <class R>
Vector<R> parse_vector(const std::string& arg) {
    std::vector<R> vals;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(from_string<R>(item));
    Vector<R> v(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
    return v;
}

StepperKind parse_stepper(const std::string& s, double rtol, double atol) {
    if (s == "euler") return StepperKind::euler();
    if (s == "rk4") return StepperKind::rk4();
    if (s == "rk45") return StepperKind::rk45(rtol, atol);
    if (s.rfind("gauss", 0) == 0) return StepperKind::gauss(std::stoi(s.substr(5)));
    throw DomainError("unknown stepper '" + s + "'");
}

template <class R>
BasisFamily<R> parse_basis(const std::string& s, const R& a, const R& b) {
    std::stringstream ss(s);
    std::string kind;
    std::getline(ss, kind, ':');
    if (kind == "monomial") {
        std::string center, count;
        std::getline(ss, center, ':');
        std::getline(ss, count, ':');
        return BasisFamily<R>::monomial(from_string<R>(center), std::stoi(count));
    }
    if (kind == "chebyshev") {
        std::string count;
        std::getline(ss, count, ':');
        return BasisFamily<R>::chebyshev_on(a, b, std::stoi(count));
    }
    if (kind == "asymptotic") {
        // asymptotic:gnum/gden:kappa:snum/sden:count
        std::string g, kap, sg, count;
        std::getline(ss, g, ':');
        std::getline(ss, kap, ':');
        std::getline(ss, sg, ':');
        std::getline(ss, count, ':');
        auto frac = [](const std::string& f, long& num, long& den) {
            auto pos = f.find('/');
            num = std::stol(f.substr(0, pos));
            den = pos == std::string::npos ? 1 : std::stol(f.substr(pos + 1));
        };
        long gn, gd, sn, sd;
        frac(g, gn, gd);
        frac(sg, sn, sd);
        return BasisFamily<R>::asymptotic_power(gn, gd, from_string<R>(kap), sn, sd, std::stoi(count));
    }
    throw DomainError("unknown basis '" + s + "'");
}

template <class R>
std::function<R(const R&)> make_oracle(const std::string& name) {
    if (name == "airy") return [](const R& t) { return airy_ai(t); };
    if (name == "hkn") return [](const R& t) { return hkn_value(10, 1, R(1), t, 1e-12); };
    if (name == "hkn-gauged")
        return [](const R& t) { return hkn_value(10, 1, R(1), t, 1e-12) / (hgm::exp(t) * hgm::pow(t, 10L)); };
    throw DomainError("unknown oracle '" + name + "' (airy, hkn, hkn-gauged)");
}

void write_diag(const std::string& output, const json& diag) {
    std::ofstream out(output + ".diag.json");
    out << diag.dump(2) << "\n";
}

// first-order system plus solve interval; covers the matrix-valued fixtures
// that are not companions of a scalar operator
template <class R>
struct SystemProblem {
    FirstOrderSystem<R> S;
    R a, b;
};

template <class R>
SystemProblem<R> load_system(const Options& o) {
    SystemProblem<R> out;
    if (o.problem == "fixture:easy") {
        out.S = fixtures<R>().easy_system;
        out.a = R(0);
        out.b = R(80);
        return out;
    }
    if (o.problem == "fixture:hkn-gauged") {
        out.S = hkn_gauged_system<R>(10, 1, R(1));
        out.a = R(1);
        out.b = R(30);
        return out;
    }
    auto P = load_problem<R>(o.problem);
    out.S = companion_system(P.op);
    out.a = P.a;
    out.b = P.b;
    if (o.gauge)
        out.S = gauge_transform(out.S, scalar<R>::from_double(o.gauge_alpha),
                                scalar<R>::from_double(o.gauge_beta));
    return out;
}

template <class R>
int run_solve_ivp(const Options& o) {
    auto [S, a, b] = load_system<R>(o);
    Vector<R> F0 = parse_vector<R>(o.f0_arg);
    json diag;
    SolutionTable<R> table;
    auto kind = parse_stepper(o.stepper, o.rtol, o.atol);
    if (kind.family == StepperKind::Family::RK45) {
        table = rk45_solve(S, F0, a, b, o.rtol, o.atol, o.N, o.h);
        diag["accepted"] = table.diag.accepted;
        diag["rejected"] = table.diag.rejected;
    } else {
        Grid<R> grid(a, scalar<R>::from_double(o.h), o.N);
        table = solve_ivp(kind, S, F0, grid);
    }
    diag["stepper"] = table.stepper_name;
    diag["digits"] = o.digits;
    if (table.diag.blowup_index >= 0) {
        diag["blowup_index"] = table.diag.blowup_index;
        diag["blowup_note"] = table.diag.note;
    }
    CsvOptions co;
    co.meta = {"command: solve-ivp", "problem: " + o.problem, "stepper: " + o.stepper,
               "digits: " + std::to_string(o.digits), "seed: " + std::to_string(o.seed)};
    std::function<R(const R&)> oracle;
    if (!o.oracle.empty()) {
        oracle = make_oracle<R>(o.oracle);
        std::string note;
        diag["failure_onset"] = failure_onset(table, oracle, o.onset_threshold, &note);
        if (!note.empty()) diag["failure_onset_note"] = note;
        write_csv(o.output, table, &oracle, co);
    } else {
        write_csv<R>(o.output, table, nullptr, co);
    }
    write_diag(o.output, diag);
    return 0;
}

template <class R>
int run_defuse(const Options& o) {
    auto [S, a, b] = load_system<R>(o);
    Vector<R> F0 = parse_vector<R>(o.f0_arg);
    Grid<R> grid(a, scalar<R>::from_double(o.h), o.N);
    DefusePolicy policy;
    policy.cut = o.cut == "threshold" ? DefusePolicy::Cut::Threshold : DefusePolicy::Cut::SpectralGap;
    policy.threshold = o.threshold_cut;
    policy.scaling =
        o.scaling == "unit" ? DefusePolicy::Scaling::UnitProjection : DefusePolicy::Scaling::MatchComponent;
    policy.match_component = o.match_component;

    auto kind = parse_stepper(o.stepper, o.rtol, o.atol);
    auto mf = matrix_factorial(kind, S, grid);
    auto d = defuse_initial_value(mf, F0, policy);
    auto table = solve_ivp(kind, S, d.F0_filtered, grid);

    json diag;
    diag["eigenvalues"] = json::array();
    for (std::size_t i = 0; i < mf.eigen.values.size(); ++i)
        diag["eigenvalues"].push_back(to_double(mf.eigen.values[i]));
    diag["m"] = d.m;
    diag["c"] = to_double(d.c);
    diag["filtered_f0"] = json::array();
    for (std::size_t i = 0; i < d.F0_filtered.size(); ++i)
        diag["filtered_f0"].push_back(format_shortest(d.F0_filtered[i]));
    CsvOptions co;
    co.meta = {"command: defuse", "problem: " + o.problem, "stepper: " + o.stepper,
               "digits: " + std::to_string(o.digits), "seed: " + std::to_string(o.seed)};
    std::function<R(const R&)> oracle;
    if (!o.oracle.empty()) {
        oracle = make_oracle<R>(o.oracle);
        std::string note;
        diag["failure_onset"] = failure_onset(table, oracle, o.onset_threshold, &note);
        write_csv(o.output, table, &oracle, co);
    } else {
        write_csv<R>(o.output, table, nullptr, co);
    }
    write_diag(o.output, diag);
    return 0;
}

template <class R>
int run_fit_a(const Options& o) {
    auto P = load_problem<R>(o.problem);
    Grid<R> grid = Grid<R>::over_interval(P.a, P.b, o.N);
    auto data = parse_data<R>(o.data_arg);
    auto sys = assemble_method_a(P.op, grid, data, StencilPlan{}, true);
    auto res = solve_method_a(sys);
    json diag;
    diag["residual"] = to_double(res.residual);
    diag["condition_estimate"] = to_double(res.condition_estimate_value);
    diag["least_squares"] = sys.least_squares;
    CsvOptions co;
    co.meta = {"command: fit-a", "problem: " + o.problem, "N: " + std::to_string(o.N),
               "digits: " + std::to_string(o.digits), "seed: " + std::to_string(o.seed)};
    std::function<R(const R&)> oracle;
    if (!o.oracle.empty()) {
        oracle = make_oracle<R>(o.oracle);
        write_csv(o.output, res.table, &oracle, co);
    } else {
        write_csv<R>(o.output, res.table, nullptr, co);
    }
    write_diag(o.output, diag);
    return 0;
}

template <class R>
SolutionTable<R> table_from_fit(const BasisFamily<R>& basis, const Vector<R>& coeffs, const R& a,
                                const R& b, long nodes) {
    SolutionTable<R> t;
    t.grid = Grid<R>::over_interval(a, b, nodes);
    t.digits = scalar<R>::context_digits();
    t.stepper_name = "fit";
    for (long i = 0; i <= nodes; ++i) {
        Vector<R> st(1);
        st[0] = eval_fit(basis, coeffs, t.grid.node(i));
        t.states.push_back(st);
    }
    return t;
}

template <class R>
int run_fit_bc(const Options& o, bool method_c, bool constrained) {
    auto P = load_problem<R>(o.problem);
    auto basis = parse_basis<R>(o.basis, P.a, P.b);
    auto quad = QuadratureRule<R>::trapezoid(P.a, P.b, o.N);
    auto data = parse_data<R>(o.data_arg);
    FitResult<R> fit;
    if (method_c) {
        auto S = gram_matrix(P.op, basis, quad);
        fit = fit_method_c(S, basis, data, constrained ? MethodCMode::Constrained : MethodCMode::Penalized);
    } else if (constrained) {
        fit = fit_method_b_constrained(P.op, basis, quad, data);
    } else {
        fit = fit_method_b_penalized(P.op, basis, quad, data, scalar<R>::from_double(o.alpha),
                                     scalar<R>::from_double(o.beta), scalar<R>::from_double(o.gamma));
    }
    json diag;
    diag["loss"] = to_double(fit.loss);
    if (fit.has_gram) diag["gram_objective"] = to_double(fit.gram_objective);
    diag["coefficients"] = json::array();
    for (std::size_t k = 0; k < fit.coefficients.size(); ++k)
        diag["coefficients"].push_back(format_shortest(fit.coefficients[k]));
    diag["constraint_residuals"] = json::array();
    for (std::size_t k = 0; k < fit.constraint_residuals.size(); ++k)
        diag["constraint_residuals"].push_back(to_double(fit.constraint_residuals[k]));
    // refined-rule loss for the quadrature-error bound
    auto quad4 = QuadratureRule<R>::trapezoid(P.a, P.b, 4 * o.N);
    auto D4 = design_matrix(P.op, basis, quad4);
    Vector<R> r4 = D4.G * fit.coefficients - D4.g;
    R refined = dot(r4, r4);
    diag["refined_loss"] = to_double(refined);
    diag["loss_bound"] = to_double(lemma2_bound(fit, refined));

    auto table = table_from_fit(basis, fit.coefficients, P.a, P.b, std::max(200L, o.N));
    CsvOptions co;
    co.meta = {std::string("command: ") + (method_c ? "fit-c" : "fit-b"), "problem: " + o.problem,
               "basis: " + o.basis, "digits: " + std::to_string(o.digits),
               "seed: " + std::to_string(o.seed)};
    std::function<R(const R&)> oracle;
    if (!o.oracle.empty()) {
        oracle = make_oracle<R>(o.oracle);
        write_csv(o.output, table, &oracle, co);
    } else {
        write_csv<R>(o.output, table, nullptr, co);
    }
    write_diag(o.output, diag);
    return 0;
}

template <class R>
int run_spectral(const Options& o) {
    auto P = load_problem<R>(o.problem);
    auto conds = parse_data<R>(o.data_arg);
    auto sol = solve_spectral(P.op, P.a, P.b, o.n, conds);
    SolutionTable<R> table;
    table.grid = Grid<R>::over_interval(P.a, P.b, std::max(200L, static_cast<long>(o.n)));
    table.stepper_name = "spectral";
    table.digits = o.digits;
    for (long i = 0; i <= table.grid.N; ++i) {
        Vector<R> st(1);
        st[0] = sol(table.grid.node(i));
        table.states.push_back(st);
    }
    json diag;
    diag["n"] = o.n;
    CsvOptions co;
    co.meta = {"command: spectral", "problem: " + o.problem, "n: " + std::to_string(o.n),
               "digits: " + std::to_string(o.digits), "seed: " + std::to_string(o.seed)};
    std::function<R(const R&)> oracle;
    if (!o.oracle.empty()) {
        oracle = make_oracle<R>(o.oracle);
        write_csv(o.output, table, &oracle, co);
    } else {
        write_csv<R>(o.output, table, nullptr, co);
    }
    write_diag(o.output, diag);
    return 0;
}

template <class R>
int run_oracle(const Options& o) {
    auto f = make_oracle<R>(o.oracle.empty() ? "airy" : o.oracle);
    std::cout << format_shortest(f(scalar<R>::from_double(o.at))) << "\n";
    return 0;
}

// Perturbation ensemble around a penalized fit-b problem. Trial i draws from
// the splitmix64 stream seeded with seed XOR (i+1)*0x9E3779B97F4A7C15; the
// noise is q -> q (1 + eps), eps uniform in +-rel.
template <class R>
int run_perturb(const Options& o) {
    auto P = load_problem<R>(o.problem);
    auto basis = parse_basis<R>(o.basis, P.a, P.b);
    auto quad = QuadratureRule<R>::trapezoid(P.a, P.b, o.N);
    auto data = parse_data<R>(o.data_arg);
    std::function<R(const R&)> oracle = make_oracle<R>(o.oracle.empty() ? "hkn" : o.oracle);

    const long eval_nodes = 200;
    Grid<R> egrid = Grid<R>::over_interval(P.a, P.b, eval_nodes);
    std::vector<R> ref(eval_nodes + 1, R(0));
    for (long i = 0; i <= eval_nodes; ++i) ref[i] = oracle(egrid.node(i));

    std::vector<std::vector<R>> columns(static_cast<std::size_t>(o.trials));
    std::vector<double> maxrel(static_cast<std::size_t>(o.trials), 0.0);
    const int work_digits = current_digits();
    auto one_trial = [&](long i) {
        // worker threads carry their own precision context
        PrecisionScope scope(work_digits);
        SplitMix64 rng(o.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1)));
        auto noisy = data;
        for (auto& d : noisy) d.q = d.q * (1 + o.rel * (2 * rng.uniform01() - 1));
        auto fit = fit_method_b_penalized(P.op, basis, quad, noisy, scalar<R>::from_double(o.alpha),
                                          scalar<R>::from_double(o.beta), scalar<R>::from_double(o.gamma));
        std::vector<R> col(eval_nodes + 1, R(0));
        double worst = 0;
        for (long j = 0; j <= eval_nodes; ++j) {
            col[j] = eval_fit(basis, fit.coefficients, egrid.node(j));
            if (ref[j] != R(0)) worst = std::max(worst, to_double(abs((col[j] - ref[j]) / ref[j])));
        }
        columns[static_cast<std::size_t>(i)] = std::move(col);
        maxrel[static_cast<std::size_t>(i)] = worst;
    };
    {
        std::vector<std::future<void>> futs;
        for (long i = 0; i < o.trials; ++i) futs.push_back(std::async(std::launch::async, one_trial, i));
        for (auto& f : futs) f.get();
    }

    std::ofstream out(o.output);
    if (!out) throw DomainError("cannot open output file " + o.output);
    out << "# command: perturb\n# problem: " << o.problem << "\n# trials: " << o.trials
        << "\n# rel: " << o.rel << "\n# seed: " << o.seed << "\n";
    out << "t,reference";
    for (long i = 0; i < o.trials; ++i) out << ",trial" << i;
    out << "\n";
    for (long j = 0; j <= eval_nodes; ++j) {
        out << format_shortest(egrid.node(j)) << "," << format_shortest(ref[j]);
        for (long i = 0; i < o.trials; ++i)
            out << "," << format_shortest(columns[static_cast<std::size_t>(i)][j]);
        out << "\n";
    }
    double ensemble = 0;
    json diag;
    diag["max_rel_error_per_trial"] = json::array();
    for (double m : maxrel) {
        diag["max_rel_error_per_trial"].push_back(m);
        ensemble = std::max(ensemble, m);
    }
    diag["max_rel_error"] = ensemble;
    write_diag(o.output, diag);
    std::cout << "max relative error over " << o.trials << " trials: " << ensemble << "\n";
    return 0;
}

template <class R>
int dispatch(const std::string& cmd, const Options& o) {
    if (cmd == "solve-ivp") return run_solve_ivp<R>(o);
    if (cmd == "defuse") return run_defuse<R>(o);
    if (cmd == "fit-a") return run_fit_a<R>(o);
    if (cmd == "fit-b") return run_fit_bc<R>(o, false, false);
    if (cmd == "fit-b-constrained") return run_fit_bc<R>(o, false, true);
    if (cmd == "fit-c") return run_fit_bc<R>(o, true, true);
    if (cmd == "fit-c-penalized") return run_fit_bc<R>(o, true, false);
    if (cmd == "spectral") return run_spectral<R>(o);
    if (cmd == "oracle") return run_oracle<R>(o);
    if (cmd == "perturb") return run_perturb<R>(o);
    throw DomainError("unknown command " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"configurable-precision linear ODE toolkit"};
    app.set_help_flag("--help", "print usage");
    app.require_subcommand(1);
    Options o;

    for (const char* name : {"solve-ivp", "defuse", "fit-a", "fit-b", "fit-b-constrained", "fit-c",
                             "fit-c-penalized", "spectral", "oracle", "perturb"}) {
        auto* s = app.add_subcommand(name);
        s->set_help_flag("--help", "print usage");
        s->add_option("--problem", o.problem, "problem JSON file or fixture:<name>");
        s->add_option("--output,-o", o.output, "CSV output path");
        s->add_option("--stepper", o.stepper, "euler | rk4 | gauss<s> | rk45");
        s->add_option("--h", o.h, "step size");
        s->add_option("--N", o.N, "step/segment count");
        s->add_option("--digits,-D", o.digits, "working precision in decimal digits");
        s->add_option("--basis", o.basis, "monomial:c:m | chebyshev:m | asymptotic:g/gd:k:s/sd:m");
        s->add_option("--n", o.n, "spectral collocation size");
        s->add_option("--alpha", o.alpha);
        s->add_option("--beta", o.beta);
        s->add_option("--gamma", o.gamma);
        s->add_option("--rtol", o.rtol);
        s->add_option("--atol", o.atol);
        s->add_option("--seed", o.seed, "ensemble seed (splitmix64 streams)");
        s->add_option("--trials", o.trials);
        s->add_option("--rel", o.rel, "relative perturbation half-width");
        s->add_option("--f0", o.f0_arg, "initial vector, comma separated");
        s->add_option("--data", o.data_arg, "data points p:q[:deriv],... or @file");
        s->add_option("--oracle", o.oracle, "airy | hkn | hkn-gauged");
        s->add_option("--at", o.at, "oracle evaluation point");
        s->add_option("--onset-threshold", o.onset_threshold);
        s->add_option("--cut", o.cut, "gap | threshold");
        s->add_option("--cut-threshold", o.threshold_cut);
        s->add_option("--scaling", o.scaling, "match | unit");
        s->add_option("--match-component", o.match_component);
        s->add_flag("--gauge", o.gauge, "apply exp/power gauge");
        s->add_option("--gauge-alpha", o.gauge_alpha);
        s->add_option("--gauge-beta", o.gauge_beta);
    }

    CLI11_PARSE(app, argc, argv);
    std::string cmd = app.get_subcommands().front()->get_name();
    try {
        if (o.digits <= 16) return dispatch<double>(cmd, o);
        PrecisionScope scope(o.digits);
        return dispatch<BigFloat>(cmd, o);
    } catch (const ParseError& e) {
        std::cerr << "parse error (line " << e.line << ", column " << e.column << "): " << e.what()
                  << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

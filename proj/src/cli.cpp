#include "switchsync/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "switchsync/certificate_io.hpp"
#include "switchsync/errors.hpp"
#include "switchsync/experiments.hpp"
#include "switchsync/lmi.hpp"

namespace switchsync {

namespace {

struct SynthesizeArgs {
    double alpha_min = 0.0;
    double alpha_max = 1.0;
    std::string b = "ones";
    double eps = 1e-3;
    double delta = 1e-3;
    std::string out;
};

struct VerifyArgs {
    std::string cert;
    std::size_t grid = 101;
};

struct SimulateArgs {
    std::string scenario;
    std::string cert;
    double dt = 1e-3;
    double t_end = 30.0;
    std::uint64_t seed = 0;
    std::string seeds;
    std::size_t stride = 10;
    std::optional<double> ts;
    bool gate_off = false;
    std::string out;
    std::string metrics;
};

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

int run_synthesize(const SynthesizeArgs& a, std::ostream& out, std::ostream& err) {
    if (!(a.alpha_min <= a.alpha_max)) throw UsageError("--alpha-min must not exceed --alpha-max");
    const LmiProblem problem = LmiProblem::for_alpha_range(a.alpha_min, a.alpha_max, parse_bform(a.b), a.eps, a.delta);
    SolverStats stats;
    try {
        const GainCertificate cert = solve_feasibility(problem, {}, &stats);
        write_certificate(a.out, cert);
        out << "feasible: " << problem.vertices.size() << " vertices, " << stats.iterations << " Newton steps\n";
        out << "K =";
        for (double k : cert.k.entries()) out << ' ' << fmt(k);
        out << "\neig(P) =";
        for (double e : cert.p_eigenvalues) out << ' ' << fmt(e);
        out << "\nworst BMI margin = "
            << fmt(*std::max_element(cert.bmi_margins.begin(), cert.bmi_margins.end())) << '\n';
        out << "wrote " << a.out << '\n';
        return kExitOk;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kExitFailure;
    }
}

GainCertificate load_certificate(const std::string& path) {
    if (!std::filesystem::exists(path)) throw UsageError("certificate file '" + path + "' does not exist");
    return read_certificate(path);
}

struct CheckResult {
    VerificationReport vertices;
    std::vector<double> grid;
    bool passed() const {
        return vertices.passed() && std::all_of(grid.begin(), grid.end(), [](double m) { return m < 0.0; });
    }
};

CheckResult check_certificate(const GainCertificate& c, std::size_t grid_points) {
    const VertexSet vertices = polytope_vertices(c.alpha_range[0], c.alpha_range[1]);
    const DistributionMatrix b(c.b_form);
    CheckResult r{verify_certificate(c.p, c.k, b, vertices), {}};
    if (grid_points > 0) r.grid = alpha_grid_margins(c.p, c.k, b, c.alpha_range[0], c.alpha_range[1], grid_points);
    return r;
}

int run_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    const GainCertificate c = load_certificate(a.cert);
    const CheckResult r = check_certificate(c, a.grid);
    out << "lambda_min(P) = " << fmt(r.vertices.p_min_eig) << '\n';
    out << "vertices: " << r.vertices.bmi_margins.size() << ", worst margin " << fmt(r.vertices.worst_margin())
        << '\n';
    if (!r.grid.empty()) {
        out << "alpha grid: " << r.grid.size() << " points, worst margin "
            << fmt(*std::max_element(r.grid.begin(), r.grid.end())) << '\n';
    }
    if (!r.passed()) {
        err << "verification FAILED\n";
        return kExitFailure;
    }
    out << "verification passed\n";
    return kExitOk;
}

std::string with_seed(const std::string& path, std::uint64_t seed) {
    const std::filesystem::path p(path);
    std::filesystem::path q = p.parent_path() / (p.stem().string() + "_seed" + std::to_string(seed));
    q += p.extension();
    return q.string();
}

std::vector<std::uint64_t> parse_seed_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw UsageError("--seeds expects A..B");
    try {
        const std::uint64_t lo = std::stoull(text.substr(0, dots));
        const std::uint64_t hi = std::stoull(text.substr(dots + 2));
        if (hi < lo || hi - lo > 100000) throw UsageError("--seeds range is empty or too large");
        std::vector<std::uint64_t> out;
        for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    } catch (const std::logic_error&) {
        throw UsageError("--seeds expects A..B with non-negative integers");
    }
}

void write_outputs(const RunResult& r, const std::string& csv, const std::string& metrics) {
    std::ofstream f(csv, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + csv + "' for writing");
    write_trajectory_csv(f, r.records);
    if (!metrics.empty()) {
        std::ofstream mf(metrics);
        if (!mf) throw UsageError("cannot open '" + metrics + "' for writing");
        mf << metrics_to_json(r.metrics).dump(2) << '\n';
    }
}

int run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    const GainCertificate c = load_certificate(a.cert);
    const CheckResult check = check_certificate(c, 0);
    if (!check.passed()) {
        err << "certificate does not verify (worst margin " << fmt(check.vertices.worst_margin())
            << ", lambda_min(P) " << fmt(check.vertices.p_min_eig) << ")\n";
        return kExitFailure;
    }

    const std::vector<std::uint64_t> seeds = a.seeds.empty() ? std::vector<std::uint64_t>{a.seed}
                                                              : parse_seed_range(a.seeds);
    std::vector<Scenario> scenarios;
    for (std::uint64_t seed : seeds) {
        Scenario s = scenario_preset(a.scenario, seed, a.ts);
        s.dt = a.dt;
        s.t_end = a.t_end;
        if (a.gate_off) s.gate = SwitchingSignal::constant(0.0);
        scenarios.push_back(std::move(s));
    }
    RunOptions opts;
    opts.stride = a.stride;
    const std::vector<RunResult> results = run_batch(scenarios, c, opts);

    int code = kExitOk;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const bool batch = !a.seeds.empty();
        const std::string csv = batch ? with_seed(a.out, seeds[i]) : a.out;
        const std::string metrics = a.metrics.empty() ? "" : (batch ? with_seed(a.metrics, seeds[i]) : a.metrics);
        write_outputs(results[i], csv, metrics);
        const RunMetrics& m = results[i].metrics;
        out << a.scenario << " seed " << seeds[i] << ": " << results[i].records.size() << " records, final error "
            << fmt(m.final_error) << ", time to sync "
            << (m.time_to_sync ? fmt(*m.time_to_sync) + " s" : std::string("none")) << '\n';
        if (m.diverged) {
            err << "run diverged at t = " << fmt(*m.divergence_time) << '\n';
            code = kExitFailure;
        }
    }
    return code;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synthesize, verify and simulate a switching-robust synchronizing controller for the unified "
                 "chaotic system"};
    app.name(args.empty() ? "switchsync" : args.front());
    app.require_subcommand(1);

    SynthesizeArgs syn;
    auto* synthesize = app.add_subcommand("synthesize", "solve the vertex LMIs and write a certificate");
    synthesize->add_option("--alpha-min", syn.alpha_min, "lower end of the alpha range")->check(CLI::Range(0.0, 1.0));
    synthesize->add_option("--alpha-max", syn.alpha_max, "upper end of the alpha range")->check(CLI::Range(0.0, 1.0));
    synthesize->add_option("--b", syn.b, "input distribution")->check(CLI::IsMember({"ones", "identity"}));
    synthesize->add_option("--eps", syn.eps, "lower bound Y >= eps I")->check(CLI::PositiveNumber);
    synthesize->add_option("--delta", syn.delta, "strictness LMI <= -delta I")->check(CLI::PositiveNumber);
    synthesize->add_option("--out", syn.out, "certificate path")->required();

    VerifyArgs ver;
    auto* verify = app.add_subcommand("verify", "re-check a certificate at every vertex and on an alpha grid");
    verify->add_option("--cert", ver.cert, "certificate path")->required();
    verify->add_option("--grid", ver.grid, "alpha grid points (0 disables)");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run a synchronization scenario");
    simulate->add_option("--scenario", sim.scenario, "step|sine|chirp|random|random-ic|onoff|none")->required();
    simulate->add_option("--cert", sim.cert, "certificate path")->required();
    simulate->add_option("--dt", sim.dt, "integration step [s]")->check(CLI::PositiveNumber);
    simulate->add_option("--t-end", sim.t_end, "horizon [s]")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim.seed, "random seed");
    simulate->add_option("--seeds", sim.seeds, "seed range A..B, one output file per seed");
    simulate->add_option("--stride", sim.stride, "keep every N-th step")->check(CLI::PositiveNumber);
    simulate->add_option("--ts", sim.ts, "hold interval of the random presets [s]")->check(CLI::PositiveNumber);
    simulate->add_flag("--gate-off", sim.gate_off, "force the controller off for the whole run");
    simulate->add_option("--out", sim.out, "CSV trajectory path")->required();
    simulate->add_option("--metrics", sim.metrics, "JSON metrics path");

    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());  // CLI11 consumes a reversed vector
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*synthesize) return run_synthesize(syn, out, err);
        if (*verify) return run_verify(ver, out, err);
        return run_simulate(sim, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace switchsync

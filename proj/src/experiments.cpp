#include "switchsync/experiments.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <exception>
#include <ostream>

#include "switchsync/errors.hpp"

namespace switchsync {

void Scenario::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("scenario: dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidInput("scenario: t_end must be positive");
    for (const State3& s : {master_ic, slave_ic}) {
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z)) {
            throw InvalidInput("scenario: initial conditions must be finite");
        }
    }
    const Codomain& a = alpha.codomain();
    if (a.lo < 0.0 || a.hi > 1.0) throw InvalidInput("scenario: alpha signal leaves [0, 1]");
    const Codomain& g = gate.codomain();
    const bool gate_ok = (g.lo == 0.0 || g.lo == 1.0) && (g.hi == 0.0 || g.hi == 1.0);
    if (!gate_ok) throw InvalidInput("scenario: gate signal must take values in {0, 1}");
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"step", "sine", "chirp", "random", "random-ic", "onoff", "none"};
    return names;
}

Scenario scenario_preset(const std::string& name, std::uint64_t seed, std::optional<double> ts) {
    Scenario s;
    s.name = name;
    s.seed = seed;
    const double hold = ts.value_or(0.25);

    if (name == "none") {
        s.alpha = SwitchingSignal::constant(0.0);
    } else if (name == "step") {
        // Lorenz -> Lu -> Chen
        s.alpha = step_schedule({{0.0, 0.0}, {10.0, 0.8}, {20.0, 1.0}});
    } else if (name == "sine") {
        s.alpha = sampled_hold(sine_source(1.0, 0.5, 0.5), 0.25);
    } else if (name == "chirp") {
        s.alpha = sampled_hold(chirp_source(0.1, 1.0, 30.0), 0.1);
    } else if (name == "random") {
        s.alpha = random_source(seed, hold, 0.0, 1.0);
    } else if (name == "random-ic") {
        s.alpha = random_source(seed, hold, 0.0, 1.0);
        // Stream 1 is reserved for initial conditions; stream 0 drives alpha.
        std::array<double, 6> ic{};
        for (std::size_t i = 0; i < ic.size(); ++i) ic[i] = -30.0 + 60.0 * counter_uniform(seed, 1, i);
        s.master_ic = {ic[0], ic[1], ic[2]};
        s.slave_ic = {ic[3], ic[4], ic[5]};
    } else if (name == "onoff") {
        s.alpha = square_wave(20.0, 0.5, 5.0, 0.0, 1.0);
        s.gate = square_wave(10.0, 0.5, 5.0, 0.0, 1.0);
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : "|") + n;
        throw UsageError("unknown scenario '" + name + "' (expected " + known + ")");
    }
    return s;
}

bool lyapunov_increase(double v_prev, double v_next, double rel_tol, double p_max_eig) noexcept {
    const double floor = p_max_eig * kLyapunovErrorFloor * kLyapunovErrorFloor;
    return v_next > v_prev * (1.0 + rel_tol) + floor;
}

RunResult run_scenario(const Scenario& scenario, const GainCertificate& certificate, const RunOptions& options) {
    scenario.validate();
    if (options.stride == 0) throw InvalidInput("run_scenario: stride must be >= 1");
    if (!(options.sync_threshold > 0.0)) throw InvalidInput("run_scenario: sync threshold must be positive");

    const FeedbackGain gain = certificate.gain();
    const double p_max = max_eigenvalue(certificate.p);

    RunResult result;
    RunMetrics& m = result.metrics;
    const StepPlan plan = plan_steps(0.0, scenario.t_end, scenario.dt);
    result.records.reserve(static_cast<std::size_t>((plan.full_steps + 1) / static_cast<long long>(options.stride)) + 2);

    // Held for the whole step that starts at the latest observer call.
    Alpha held_alpha(scenario.alpha(0.0));
    bool held_gate = scenario.gate(0.0) > 0.5;

    auto rhs = [&](double, const StateVec<6>& y) {
        const State3 ms{y[0], y[1], y[2]};
        const State3 ss{y[3], y[4], y[5]};
        const CoupledDerivative d = coupled_rhs(held_alpha, ms, ss, gain, held_gate);
        return StateVec<6>{d.master.x, d.master.y, d.master.z, d.slave.x, d.slave.y, d.slave.z};
    };

    long long step = 0;
    double prev_v = 0.0;
    bool prev_gate = false;
    std::optional<double> sync_since;
    double max_since = 0.0;

    auto observer = [&](double t, const StateVec<6>& y) {
        const State3 ms{y[0], y[1], y[2]};
        const State3 ss{y[3], y[4], y[5]};
        const ErrorVec e = sync_error(ms, ss);
        const double en = sync_error_norm(e);
        const double v = lyapunov_value(certificate.p, e);

        if (step > 0 && prev_gate && lyapunov_increase(prev_v, v, options.lyapunov_rel_tol, p_max)) {
            ++m.lyapunov_violations;
        }
        if (en < options.sync_threshold) {
            if (!sync_since) {
                sync_since = t;
                max_since = en;
            }
            max_since = std::max(max_since, en);
        } else {
            sync_since.reset();
        }
        m.final_error = en;

        held_alpha = Alpha(scenario.alpha(t));
        held_gate = scenario.gate(t) > 0.5;
        if (step % static_cast<long long>(options.stride) == 0) {
            result.records.push_back({t, ms, ss, e, en, held_alpha.value(), held_gate});
        }
        prev_v = v;
        prev_gate = held_gate;
        ++step;
    };

    const StateVec<6> y0{scenario.master_ic.x, scenario.master_ic.y, scenario.master_ic.z,
                         scenario.slave_ic.x,  scenario.slave_ic.y,  scenario.slave_ic.z};
    try {
        rk4_integrate<6>(rhs, y0, 0.0, scenario.t_end, scenario.dt, observer);
    } catch (const DivergenceError& err) {
        m.diverged = true;
        m.divergence_time = err.time();
        sync_since.reset();
    }
    if (sync_since) {
        m.time_to_sync = sync_since;
        m.max_error_after_sync = max_since;
    }
    return result;
}

namespace {

void validate_all(const std::vector<Scenario>& scenarios, const RunOptions& options) {
    for (const auto& s : scenarios) s.validate();
    if (options.stride == 0) throw InvalidInput("run_batch: stride must be >= 1");
}

}  // namespace

std::vector<RunResult> run_batch_serial(const std::vector<Scenario>& scenarios, const GainCertificate& certificate,
                                        const RunOptions& options) {
    validate_all(scenarios, options);
    std::vector<RunResult> out;
    out.reserve(scenarios.size());
    for (const auto& s : scenarios) out.push_back(run_scenario(s, certificate, options));
    return out;
}

std::vector<RunResult> run_batch(const std::vector<Scenario>& scenarios, const GainCertificate& certificate,
                                 const RunOptions& options) {
    validate_all(scenarios, options);
    std::vector<RunResult> out(scenarios.size());
    std::vector<std::exception_ptr> errors(scenarios.size());
    const auto n = static_cast<long long>(scenarios.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
        try {
            out[i] = run_scenario(scenarios[i], certificate, options);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

namespace {

void put(std::ostream& out, double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 12);
    out.write(buf.data(), res.ptr - buf.data());
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        const double fields[] = {r.t,       r.master.x, r.master.y, r.master.z, r.slave.x, r.slave.y,
                                 r.slave.z, r.e.e1,     r.e.e2,     r.e.e3,     r.e_norm,  r.alpha};
        for (double f : fields) {
            put(out, f);
            out << ',';
        }
        out << (r.gate ? '1' : '0') << '\n';
    }
}

nlohmann::json metrics_to_json(const RunMetrics& m) {
    nlohmann::json j;
    j["time_to_sync"] = m.time_to_sync ? nlohmann::json(*m.time_to_sync) : nlohmann::json(nullptr);
    j["max_error_after_sync"] =
        m.max_error_after_sync ? nlohmann::json(*m.max_error_after_sync) : nlohmann::json(nullptr);
    j["final_error"] = m.final_error;
    j["lyapunov_violations"] = m.lyapunov_violations;
    j["diverged"] = m.diverged;
    j["divergence_time"] = m.divergence_time ? nlohmann::json(*m.divergence_time) : nlohmann::json(nullptr);
    return j;
}

}  // namespace switchsync

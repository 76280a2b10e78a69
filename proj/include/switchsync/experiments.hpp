#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "switchsync/lmi.hpp"
#include "switchsync/switching.hpp"
#include "switchsync/unified_system.hpp"

namespace switchsync {

inline constexpr State3 kDefaultMasterIc{15.0, 20.0, 10.0};
inline constexpr State3 kDefaultSlaveIc{25.0, -5.0, 15.0};

struct Scenario {
    std::string name = "none";
    SwitchingSignal alpha = SwitchingSignal::constant(0.0);
    SwitchingSignal gate = SwitchingSignal::constant(1.0);
    State3 master_ic = kDefaultMasterIc;
    State3 slave_ic = kDefaultSlaveIc;
    double dt = 1e-3;
    double t_end = 30.0;
    std::uint64_t seed = 0;

    /// Throws InvalidInput on bad step/horizon, non-finite initial conditions,
    /// an alpha signal whose codomain leaves [0, 1] or a gate that is not 0/1.
    void validate() const;
};

/// Names accepted by scenario_preset.
const std::vector<std::string>& preset_names();

/// step | sine | chirp | random | random-ic | onoff | none. `ts` overrides the
/// hold interval of the random presets (default 0.25 s). Unknown names throw
/// UsageError.
Scenario scenario_preset(const std::string& name, std::uint64_t seed = 0, std::optional<double> ts = std::nullopt);

struct TrajectoryRecord {
    double t = 0.0;
    State3 master;
    State3 slave;
    ErrorVec e;
    double e_norm = 0.0;
    double alpha = 0.0;
    bool gate = false;
};

struct RunMetrics {
    /// First instant after which e_norm stays below the threshold up to t_end.
    std::optional<double> time_to_sync;
    std::optional<double> max_error_after_sync;
    double final_error = 0.0;
    /// Steps taken with the gate on over which V = e^T P e grew by more than
    /// the relative tolerance (plus the rounding floor).
    long long lyapunov_violations = 0;
    bool diverged = false;
    std::optional<double> divergence_time;
};

struct RunOptions {
    std::size_t stride = 10;          // keep every stride-th step
    double sync_threshold = 1e-2;
    double lyapunov_rel_tol = 1e-6;
};

/// Absolute slack added to the Lyapunov monotonicity test: V differences below
/// lambda_max(P) * kLyapunovErrorFloor^2 are rounding noise (e is the
/// difference of two O(10) states, so it cannot be resolved much below 1e-13).
inline constexpr double kLyapunovErrorFloor = 1e-12;

/// True when V rose from v_prev to v_next by more than the tolerance allows.
bool lyapunov_increase(double v_prev, double v_next, double rel_tol, double p_max_eig) noexcept;

struct RunResult {
    std::vector<TrajectoryRecord> records;
    RunMetrics metrics;
};

/// Integrates master and slave with fixed-step RK4. Alpha and the gate are
/// sampled at the start of each step and held for its four stages. Divergence
/// ends the run with metrics.diverged set and the partial trajectory kept.
RunResult run_scenario(const Scenario& scenario, const GainCertificate& certificate, const RunOptions& options = {});

/// Independent runs, one per scenario, spread over OpenMP threads.
std::vector<RunResult> run_batch(const std::vector<Scenario>& scenarios, const GainCertificate& certificate,
                                 const RunOptions& options = {});
/// Single-threaded reference for run_batch.
std::vector<RunResult> run_batch_serial(const std::vector<Scenario>& scenarios, const GainCertificate& certificate,
                                        const RunOptions& options = {});

inline constexpr const char* kCsvHeader = "t,x_m,y_m,z_m,x_s,y_s,z_s,e1,e2,e3,e_norm,alpha,gate";

/// Header line then one line per record, 12 significant digits, '\n' separated.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRecord>& records);

nlohmann::json metrics_to_json(const RunMetrics& m);

}  // namespace switchsync

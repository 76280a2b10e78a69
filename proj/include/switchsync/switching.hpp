#pragma once

// Piecewise-constant switching laws for the key parameter and the controller
// gate. Every signal is right-continuous: at a change instant the new value
// already applies.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace switchsync {

/// Time comparisons at change instants snap within this many seconds so that
/// grid times such as 15000 * 1e-3 land on the intended side of a switch.
inline constexpr double kSwitchTimeTolerance = 1e-9;

struct Codomain {
    double lo = 0.0;
    double hi = 1.0;
    bool binary = false;  // values are exactly lo or hi

    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

class SwitchingSignal {
public:
    using Eval = std::function<double(double)>;
    using Instants = std::function<std::vector<double>(double)>;

    SwitchingSignal(std::string kind, Codomain codomain, Eval eval, Instants instants);

    static SwitchingSignal constant(double value);

    /// Value at t >= 0.
    double operator()(double t) const { return impl_->eval(t); }
    double value(double t) const { return impl_->eval(t); }

    const Codomain& codomain() const noexcept { return impl_->codomain; }
    const std::string& kind() const noexcept { return impl_->kind; }

    /// Every instant in (0, horizon] at which the value may change.
    std::vector<double> change_instants(double horizon) const { return impl_->instants(horizon); }

private:
    struct Impl {
        std::string kind;
        Codomain codomain;
        Eval eval;
        Instants instants;
    };
    std::shared_ptr<const Impl> impl_;
};

/// A continuous function of time together with the interval it stays in.
struct ContinuousSource {
    std::function<double(double)> f;
    double lo = 0.0;
    double hi = 1.0;

    double operator()(double t) const { return f(t); }
};

struct Breakpoint {
    double t = 0.0;
    double value = 0.0;
};

/// Value at t is the value of the last breakpoint with t_i <= t. The first
/// breakpoint must sit at t = 0 and times must strictly increase.
SwitchingSignal step_schedule(std::vector<Breakpoint> breakpoints);

/// Zero-order hold: value at t is source(floor(t / ts) * ts).
SwitchingSignal sampled_hold(ContinuousSource source, double ts);

/// t -> bias + amplitude * sin(omega t); rejects configurations that leave [0, 1].
ContinuousSource sine_source(double omega, double amplitude, double bias);

/// Linear sweep from f0 to f1 Hz over `duration` seconds, halved and biased by
/// 0.5 so it stays in [0, 1].
ContinuousSource chirp_source(double f0, double f1, double duration);

/// Uniform draws on [low, high), one per ts-long hold interval.
SwitchingSignal random_source(std::uint64_t seed, double ts, double low = 0.0, double high = 1.0);

/// high while ((t - delay) mod period) is in [0, duty * period), low otherwise.
SwitchingSignal square_wave(double period, double duty, double delay, double low = 0.0, double high = 1.0);

/// Counter-based uniform draw on [0, 1): SplitMix64 finalizer applied to
/// seed + (stream * 2^32 + index + 1) * 0x9E3779B97F4A7C15, top 53 bits scaled
/// by 2^-53. Independent of evaluation order, so random signals need no cache.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept;

}  // namespace switchsync

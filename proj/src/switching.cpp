#include "switchsync/switching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "switchsync/errors.hpp"

namespace switchsync {

namespace {

long long hold_index(double t, double ts) {
    return static_cast<long long>(std::floor(t / ts + kSwitchTimeTolerance));
}

std::vector<double> multiples_of(double ts, double horizon) {
    std::vector<double> out;
    for (long long k = 1; static_cast<double>(k) * ts <= horizon + kSwitchTimeTolerance; ++k) {
        out.push_back(static_cast<double>(k) * ts);
    }
    return out;
}

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidInput("switching signal evaluated at negative or non-finite time");
    }
}

}  // namespace

SwitchingSignal::SwitchingSignal(std::string kind, Codomain codomain, Eval eval, Instants instants)
    : impl_(std::make_shared<const Impl>(Impl{std::move(kind), codomain, std::move(eval), std::move(instants)})) {}

SwitchingSignal SwitchingSignal::constant(double value) {
    if (!std::isfinite(value)) {
        throw InvalidInput("constant signal: non-finite value");
    }
    return SwitchingSignal(
        "constant", Codomain{value, value, false},
        [value](double t) {
            require_time(t);
            return value;
        },
        [](double) { return std::vector<double>{}; });
}

SwitchingSignal step_schedule(std::vector<Breakpoint> breakpoints) {
    if (breakpoints.empty()) {
        throw InvalidInput("step_schedule: no breakpoints");
    }
    if (breakpoints.front().t != 0.0) {
        throw InvalidInput("step_schedule: first breakpoint must be at t = 0");
    }
    Codomain cod{breakpoints.front().value, breakpoints.front().value, false};
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!std::isfinite(breakpoints[i].t) || !std::isfinite(breakpoints[i].value)) {
            throw InvalidInput("step_schedule: non-finite breakpoint");
        }
        if (i > 0 && !(breakpoints[i].t > breakpoints[i - 1].t)) {
            throw InvalidInput("step_schedule: breakpoint times must strictly increase");
        }
        cod.lo = std::min(cod.lo, breakpoints[i].value);
        cod.hi = std::max(cod.hi, breakpoints[i].value);
    }
    auto bps = std::make_shared<const std::vector<Breakpoint>>(std::move(breakpoints));
    return SwitchingSignal(
        "step", cod,
        [bps](double t) {
            require_time(t);
            double v = bps->front().value;
            for (const auto& bp : *bps) {
                if (bp.t <= t + kSwitchTimeTolerance) v = bp.value;
                else break;
            }
            return v;
        },
        [bps](double horizon) {
            std::vector<double> out;
            for (std::size_t i = 1; i < bps->size(); ++i)
                if ((*bps)[i].t <= horizon) out.push_back((*bps)[i].t);
            return out;
        });
}

SwitchingSignal sampled_hold(ContinuousSource source, double ts) {
    if (!(ts > 0.0) || !std::isfinite(ts)) {
        throw InvalidInput("sampled_hold: sampling time must be positive");
    }
    if (!source.f) {
        throw InvalidInput("sampled_hold: empty source");
    }
    const Codomain cod{source.lo, source.hi, false};
    return SwitchingSignal(
        "sampled_hold", cod,
        [source = std::move(source), ts](double t) {
            require_time(t);
            return source(static_cast<double>(hold_index(t, ts)) * ts);
        },
        [ts](double horizon) { return multiples_of(ts, horizon); });
}

ContinuousSource sine_source(double omega, double amplitude, double bias) {
    if (!std::isfinite(omega) || !std::isfinite(amplitude) || !std::isfinite(bias)) {
        throw InvalidInput("sine_source: non-finite parameter");
    }
    const double lo = bias - std::abs(amplitude);
    const double hi = bias + std::abs(amplitude);
    if (lo < 0.0 || hi > 1.0) {
        throw InvalidInput("sine_source: bias +/- amplitude must stay inside [0, 1]");
    }
    return {[=](double t) { return bias + amplitude * std::sin(omega * t); }, lo, hi};
}

ContinuousSource chirp_source(double f0, double f1, double duration) {
    if (!(f0 > 0.0) || !(f1 > 0.0) || !(duration > 0.0) || !std::isfinite(f0) || !std::isfinite(f1) ||
        !std::isfinite(duration)) {
        throw InvalidInput("chirp_source: frequencies and duration must be positive");
    }
    return {[=](double t) {
                const double phase = 2.0 * std::numbers::pi * (f0 * t + (f1 - f0) * t * t / (2.0 * duration));
                return 0.5 * std::sin(phase) + 0.5;
            },
            0.0, 1.0};
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
    std::uint64_t z = seed + ((stream << 32) + index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

SwitchingSignal random_source(std::uint64_t seed, double ts, double low, double high) {
    if (!(ts > 0.0) || !std::isfinite(ts)) {
        throw InvalidInput("random_source: sampling time must be positive");
    }
    if (!(low < high) || !std::isfinite(low) || !std::isfinite(high)) {
        throw InvalidInput("random_source: require low < high");
    }
    return SwitchingSignal(
        "random", Codomain{low, high, false},
        [=](double t) {
            require_time(t);
            const auto k = static_cast<std::uint64_t>(hold_index(t, ts));
            const double v = low + (high - low) * counter_uniform(seed, 0, k);
            // Rounding in low + span * u can land on high for u close to 1.
            return v < high ? v : std::nextafter(high, low);
        },
        [ts](double horizon) { return multiples_of(ts, horizon); });
}

SwitchingSignal square_wave(double period, double duty, double delay, double low, double high) {
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw InvalidInput("square_wave: period must be positive");
    }
    if (!(duty > 0.0 && duty < 1.0)) {
        throw InvalidInput("square_wave: duty must be in (0, 1)");
    }
    if (!std::isfinite(delay) || !std::isfinite(low) || !std::isfinite(high)) {
        throw InvalidInput("square_wave: non-finite parameter");
    }
    const double on_len = duty * period;
    return SwitchingSignal(
        "square", Codomain{std::min(low, high), std::max(low, high), true},
        [=](double t) {
            require_time(t);
            double phase = std::fmod(t - delay, period);
            if (phase < 0.0) phase += period;
            if (period - phase <= kSwitchTimeTolerance) phase = 0.0;
            return phase < on_len - kSwitchTimeTolerance ? high : low;
        },
        [=](double horizon) {
            std::vector<double> out;
            // Rising edges at delay + k*period, falling edges on_len later.
            const double first = delay - std::ceil(delay / period) * period;
            for (double base = first; base <= horizon + period; base += period) {
                for (double edge : {base, base + on_len}) {
                    if (edge > 0.0 && edge <= horizon) out.push_back(edge);
                }
            }
            std::sort(out.begin(), out.end());
            return out;
        });
}

}  // namespace switchsync

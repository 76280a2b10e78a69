#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <type_traits>

#include "switchsync/errors.hpp"
#include "switchsync/smallmat.hpp"

namespace switchsync {

/// Key parameter of the unified chaotic family. Values within 1e-12 outside
/// [0, 1] are clamped, anything further out is rejected.
class Alpha {
public:
    explicit Alpha(double value);
    double value() const noexcept { return value_; }

private:
    double value_;
};

struct State3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const State3&, const State3&) = default;
};

struct ErrorVec {
    double e1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;

    std::array<double, 3> as_array() const noexcept { return {e1, e2, e3}; }
    friend bool operator==(const ErrorVec&, const ErrorVec&) = default;
};

/// slave - master
ErrorVec sync_error(const State3& master, const State3& slave) noexcept;

struct GainRow {
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;

    Matrix as_matrix() const { return Matrix{{k1, k2, k3}}; }
};

enum class BForm { Ones, Identity };

/// Input distribution of the linear gain: a 3x1 column of ones (one scalar
/// channel added to every state) or the 3x3 identity (per-row gain).
class DistributionMatrix {
public:
    explicit DistributionMatrix(BForm form = BForm::Ones) : form_(form) {}

    BForm form() const noexcept { return form_; }
    /// Number of input channels: 1 for Ones, 3 for Identity.
    std::size_t inputs() const noexcept { return form_ == BForm::Ones ? 1 : 3; }
    Matrix matrix() const;

private:
    BForm form_;
};

std::string to_string(BForm form);
/// "ones" | "identity"; throws InvalidInput otherwise.
BForm parse_bform(const std::string& text);

struct ControlInput {
    double u1 = 0.0;
    double u2 = 0.0;
    double u3 = 0.0;
    friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

/// Right-hand side of the unified chaotic system.
State3 drift(Alpha alpha, const State3& s) noexcept;

/// Linear part of the error dynamics once the controller's nonlinear term has
/// cancelled the state products.
Matrix a_tilde(Alpha alpha);

/// State-dependent error matrix A of  e' = A e + u.
Matrix error_matrix(Alpha alpha, double z_m, double x_s, double y_m);

/// Precomputed B*K (3x3). Throws InvalidInput when K is not inputs() x 3.
class FeedbackGain {
public:
    FeedbackGain(const Matrix& k, const DistributionMatrix& b);
    FeedbackGain(const GainRow& k, const DistributionMatrix& b) : FeedbackGain(k.as_matrix(), b) {}

    const Matrix& k() const noexcept { return k_; }
    const DistributionMatrix& b() const noexcept { return b_; }
    /// (B K) e
    std::array<double, 3> apply(const ErrorVec& e) const noexcept;

private:
    Matrix k_;
    DistributionMatrix b_;
    std::array<double, 9> bk_{};
};

/// u = u_nl + B K e, or zero when the gate is off.
ControlInput control_law(const FeedbackGain& gain, const State3& master, const State3& slave, bool gate) noexcept;

struct CoupledDerivative {
    State3 master;
    State3 slave;
};

CoupledDerivative coupled_rhs(Alpha alpha, const State3& master, const State3& slave, const FeedbackGain& gain,
                              bool gate) noexcept;

/// (A_tilde(alpha) + B K) e
ErrorVec closed_loop_error_rhs(Alpha alpha, const ErrorVec& e, const FeedbackGain& gain) noexcept;

double sync_error_norm(const ErrorVec& e) noexcept;

// ---------------------------------------------------------------------------
// Fixed-step classical Runge-Kutta.

template <std::size_t N>
using StateVec = std::array<double, N>;

struct Rk4Options {
    /// Any component beyond this magnitude is treated as blow-up.
    double divergence_bound = 1e6;
};

template <std::size_t N, class Rhs>
StateVec<N> rk4_step(const Rhs& rhs, double t, const StateVec<N>& y, double h) {
    auto axpy = [](const StateVec<N>& a, double s, const StateVec<N>& b) {
        StateVec<N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const StateVec<N> k1 = rhs(t, y);
    const StateVec<N> k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const StateVec<N> k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const StateVec<N> k4 = rhs(t + h, axpy(y, h, k3));
    StateVec<N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * ((k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0);
    return out;
}

/// Number of full steps of size dt in [t0, t_end] and the leftover partial
/// step (0 when the span is an integral number of steps).
struct StepPlan {
    long long full_steps = 0;
    double remainder = 0.0;
};

StepPlan plan_steps(double t0, double t_end, double dt);

/// Integrates y' = rhs(t, y) from t0 to t_end. `observer(t, y)` runs at t0
/// and after every accepted step; it may return void or bool (false stops the
/// run early). Step k starts at t0 + k*dt, computed by multiplication so long
/// runs do not accumulate time drift.
template <std::size_t N, class Rhs, class Observer>
StateVec<N> rk4_integrate(const Rhs& rhs, StateVec<N> y, double t0, double t_end, double dt, Observer&& observer,
                          const Rk4Options& opts = {}) {
    const StepPlan plan = plan_steps(t0, t_end, dt);

    auto notify = [&](double t) -> bool {
        if constexpr (std::is_same_v<decltype(observer(t, y)), bool>) {
            return observer(t, y);
        } else {
            observer(t, y);
            return true;
        }
    };
    auto check = [&](double t) {
        for (double v : y) {
            if (!std::isfinite(v) || std::abs(v) > opts.divergence_bound) {
                throw DivergenceError("rk4_integrate: state diverged at t = " + std::to_string(t), t);
            }
        }
    };

    check(t0);
    if (!notify(t0)) return y;
    for (long long k = 0; k < plan.full_steps; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        y = rk4_step<N>(rhs, t, y, dt);
        const double t_next = (k + 1 == plan.full_steps && plan.remainder == 0.0)
                                  ? t_end
                                  : t0 + static_cast<double>(k + 1) * dt;
        check(t_next);
        if (!notify(t_next)) return y;
    }
    if (plan.remainder > 0.0) {
        const double t = t0 + static_cast<double>(plan.full_steps) * dt;
        y = rk4_step<N>(rhs, t, y, plan.remainder);
        check(t_end);
        notify(t_end);
    }
    return y;
}

template <std::size_t N, class Rhs>
StateVec<N> rk4_integrate(const Rhs& rhs, StateVec<N> y, double t0, double t_end, double dt) {
    return rk4_integrate<N>(rhs, y, t0, t_end, dt, [](double, const StateVec<N>&) {});
}

}  // namespace switchsync

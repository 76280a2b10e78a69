#include "switchsync/unified_system.hpp"

#include <algorithm>
#include <cmath>

namespace switchsync {

Alpha::Alpha(double value) {
    constexpr double band = 1e-12;
    if (!std::isfinite(value) || value < -band || value > 1.0 + band) {
        throw InvalidInput("Alpha: value outside [0, 1]");
    }
    value_ = std::clamp(value, 0.0, 1.0);
}

ErrorVec sync_error(const State3& master, const State3& slave) noexcept {
    return {slave.x - master.x, slave.y - master.y, slave.z - master.z};
}

Matrix DistributionMatrix::matrix() const {
    if (form_ == BForm::Ones) return Matrix{{1.0}, {1.0}, {1.0}};
    return Matrix::identity(3);
}

std::string to_string(BForm form) { return form == BForm::Ones ? "ones" : "identity"; }

BForm parse_bform(const std::string& text) {
    if (text == "ones") return BForm::Ones;
    if (text == "identity") return BForm::Identity;
    throw InvalidInput("unknown distribution matrix form '" + text + "' (expected ones|identity)");
}

State3 drift(Alpha alpha, const State3& s) noexcept {
    const double a = alpha.value();
    return {(25.0 * a + 10.0) * (s.y - s.x),
            (28.0 - 35.0 * a) * s.x + (29.0 * a - 1.0) * s.y - s.x * s.z,
            s.x * s.y - (a + 8.0) / 3.0 * s.z};
}

Matrix a_tilde(Alpha alpha) {
    const double a = alpha.value();
    return Matrix{{-(25.0 * a + 10.0), 25.0 * a + 10.0, 0.0},
                  {28.0 - 35.0 * a, 29.0 * a - 1.0, 0.0},
                  {0.0, 0.0, -(a + 8.0) / 3.0}};
}

Matrix error_matrix(Alpha alpha, double z_m, double x_s, double y_m) {
    const double a = alpha.value();
    return Matrix{{-(25.0 * a + 10.0), 25.0 * a + 10.0, 0.0},
                  {(28.0 - 35.0 * a) - z_m, 29.0 * a - 1.0, -x_s},
                  {y_m, x_s, -(a + 8.0) / 3.0}};
}

FeedbackGain::FeedbackGain(const Matrix& k, const DistributionMatrix& b) : k_(k), b_(b) {
    if (k.rows() != b.inputs() || k.cols() != 3) {
        throw InvalidInput("FeedbackGain: K must be " + std::to_string(b.inputs()) + "x3 for B = " +
                           to_string(b.form()));
    }
    const Matrix bk = matmul(b.matrix(), k);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) bk_[i * 3 + j] = bk(i, j);
}

std::array<double, 3> FeedbackGain::apply(const ErrorVec& e) const noexcept {
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = bk_[i * 3] * e.e1 + bk_[i * 3 + 1] * e.e2 + bk_[i * 3 + 2] * e.e3;
    }
    return out;
}

ControlInput control_law(const FeedbackGain& gain, const State3& master, const State3& slave, bool gate) noexcept {
    if (!gate) return {};
    const ErrorVec e = sync_error(master, slave);
    const auto lin = gain.apply(e);
    return {lin[0],
            master.z * e.e1 + slave.x * e.e3 + lin[1],
            -master.y * e.e1 - slave.x * e.e2 + lin[2]};
}

CoupledDerivative coupled_rhs(Alpha alpha, const State3& master, const State3& slave, const FeedbackGain& gain,
                              bool gate) noexcept {
    const ControlInput u = control_law(gain, master, slave, gate);
    State3 ds = drift(alpha, slave);
    ds.x += u.u1;
    ds.y += u.u2;
    ds.z += u.u3;
    return {drift(alpha, master), ds};
}

ErrorVec closed_loop_error_rhs(Alpha alpha, const ErrorVec& e, const FeedbackGain& gain) noexcept {
    const double a = alpha.value();
    const auto lin = gain.apply(e);
    return {-(25.0 * a + 10.0) * e.e1 + (25.0 * a + 10.0) * e.e2 + lin[0],
            (28.0 - 35.0 * a) * e.e1 + (29.0 * a - 1.0) * e.e2 + lin[1],
            -(a + 8.0) / 3.0 * e.e3 + lin[2]};
}

double sync_error_norm(const ErrorVec& e) noexcept {
    return std::sqrt(e.e1 * e.e1 + e.e2 * e.e2 + e.e3 * e.e3);
}

StepPlan plan_steps(double t0, double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidInput("rk4: dt must be positive");
    }
    if (!(t_end >= t0)) {
        throw InvalidInput("rk4: t_end must be >= t0");
    }
    const double span = t_end - t0;
    // Tolerate representation error in span/dt (30 / 1e-3 is not exactly 30000).
    const double ratio = span / dt;
    auto full = static_cast<long long>(std::floor(ratio + 1e-9));
    double rem = span - static_cast<double>(full) * dt;
    if (rem <= 1e-9 * dt) rem = 0.0;
    return {full, rem};
}

}  // namespace switchsync

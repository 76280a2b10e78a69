#include "switchsync/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "switchsync/errors.hpp"

namespace switchsync {

LmiProblem LmiProblem::for_alpha_range(double alpha_lo, double alpha_hi, BForm b, double eps, double delta) {
    LmiProblem p;
    p.vertices = polytope_vertices(alpha_lo, alpha_hi);
    p.b = DistributionMatrix(b);
    p.eps = eps;
    p.delta = delta;
    p.alpha_range = {alpha_lo, alpha_hi};
    return p;
}

void LmiProblem::validate() const {
    if (!(eps > 0.0) || !(delta > 0.0) || !std::isfinite(eps) || !std::isfinite(delta)) {
        throw InvalidInput("LmiProblem: eps and delta must be positive");
    }
    if (vertices.empty()) {
        throw InvalidInput("LmiProblem: no vertices");
    }
    const std::size_t n = b.matrix().rows();
    for (const auto& v : vertices) {
        if (v.rows() != n || v.cols() != n) {
            throw InvalidInput("LmiProblem: vertex shape does not match B");
        }
    }
}

SymMatrix lmi_expression(const Matrix& a, const Matrix& b, const SymMatrix& y, const Matrix& ka) {
    if (a.rows() != y.order() || a.cols() != y.order() || b.rows() != a.rows() || ka.rows() != b.cols() ||
        ka.cols() != a.cols()) {
        throw InvalidInput("lmi_expression: dimension mismatch");
    }
    const Matrix ay = matmul(a, y);
    const Matrix bka = matmul(b, ka);
    return SymMatrix(ay + transpose(ay) + bka + transpose(bka));
}

SymMatrix bmi_expression(const Matrix& a, const Matrix& b, const SymMatrix& p, const Matrix& k) {
    if (a.rows() != p.order() || a.cols() != p.order() || b.rows() != a.rows() || k.rows() != b.cols() ||
        k.cols() != a.cols()) {
        throw InvalidInput("bmi_expression: dimension mismatch");
    }
    const Matrix closed = a + matmul(b, k);
    const Matrix pa = matmul(p, closed);
    return SymMatrix(transpose(pa) + pa);
}

std::vector<SymMatrix> assemble_lmi(const LmiProblem& problem, const SymMatrix& y, const Matrix& ka) {
    const Matrix b = problem.b.matrix();
    std::vector<SymMatrix> out;
    out.reserve(problem.vertices.size());
    for (const auto& v : problem.vertices) out.push_back(lmi_expression(v, b, y, ka));
    return out;
}

std::vector<double> lmi_margins(const LmiProblem& problem, const SymMatrix& y, const Matrix& ka) {
    std::vector<double> out;
    for (const auto& m : assemble_lmi(problem, y, ka)) out.push_back(max_eigenvalue(m));
    return out;
}

RecoveredGains recover_gains(const SymMatrix& y, const Matrix& ka) {
    if (!is_positive_definite(y)) {
        throw InvalidInput("recover_gains: Y is not positive definite");
    }
    if (ka.cols() != y.order()) {
        throw InvalidInput("recover_gains: Ka and Y dimensions disagree");
    }
    SymMatrix p(invert(y));
    Matrix k = matmul(ka, p);
    return {std::move(p), std::move(k)};
}

bool VerificationReport::passed() const noexcept {
    if (!(p_min_eig > 0.0)) return false;
    return std::all_of(bmi_margins.begin(), bmi_margins.end(), [](double m) { return m < 0.0; });
}

double VerificationReport::worst_margin() const noexcept {
    double w = -std::numeric_limits<double>::infinity();
    for (double m : bmi_margins) w = std::max(w, m);
    return w;
}

namespace {

void check_verify_shapes(const SymMatrix& p, const Matrix& k, const Matrix& b, const VertexSet& vertices) {
    const std::size_t n = p.order();
    if (b.rows() != n || k.rows() != b.cols() || k.cols() != n) {
        throw InvalidInput("verify_certificate: P, K and B dimensions disagree");
    }
    for (const auto& v : vertices) {
        if (v.rows() != n || v.cols() != n) throw InvalidInput("verify_certificate: vertex shape mismatch");
    }
}

double alpha_at(double lo, double hi, std::size_t i, std::size_t points) {
    if (points == 1) return lo;
    // Endpoints exactly, interior points by interpolation.
    if (i + 1 == points) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

}  // namespace

VerificationReport verify_certificate_serial(const SymMatrix& p, const Matrix& k, const DistributionMatrix& b,
                                             const VertexSet& vertices) {
    const Matrix bm = b.matrix();
    check_verify_shapes(p, k, bm, vertices);
    VerificationReport r;
    r.p_min_eig = min_eigenvalue(p);
    r.bmi_margins.reserve(vertices.size());
    for (const auto& v : vertices) r.bmi_margins.push_back(max_eigenvalue(bmi_expression(v, bm, p, k)));
    return r;
}

VerificationReport verify_certificate(const SymMatrix& p, const Matrix& k, const DistributionMatrix& b,
                                      const VertexSet& vertices) {
    const Matrix bm = b.matrix();
    check_verify_shapes(p, k, bm, vertices);
    VerificationReport r;
    r.p_min_eig = min_eigenvalue(p);
    r.bmi_margins.assign(vertices.size(), 0.0);
    const auto n = static_cast<long long>(vertices.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        r.bmi_margins[i] = max_eigenvalue(bmi_expression(vertices[i], bm, p, k));
    }
    return r;
}

std::vector<double> alpha_grid_margins_serial(const SymMatrix& p, const Matrix& k, const DistributionMatrix& b,
                                              double alpha_lo, double alpha_hi, std::size_t points) {
    if (points == 0) throw InvalidInput("alpha_grid_margins: need at least one point");
    if (!(alpha_lo <= alpha_hi)) throw InvalidInput("alpha_grid_margins: alpha_lo must not exceed alpha_hi");
    const Matrix bm = b.matrix();
    check_verify_shapes(p, k, bm, {});
    std::vector<double> out;
    out.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        out.push_back(max_eigenvalue(bmi_expression(a_tilde(Alpha(alpha_at(alpha_lo, alpha_hi, i, points))), bm, p, k)));
    }
    return out;
}

std::vector<double> alpha_grid_margins(const SymMatrix& p, const Matrix& k, const DistributionMatrix& b,
                                       double alpha_lo, double alpha_hi, std::size_t points) {
    if (points == 0) throw InvalidInput("alpha_grid_margins: need at least one point");
    if (!(alpha_lo <= alpha_hi)) throw InvalidInput("alpha_grid_margins: alpha_lo must not exceed alpha_hi");
    const Matrix bm = b.matrix();
    check_verify_shapes(p, k, bm, {});
    // Validate the range up front; Alpha must not throw inside the parallel region.
    static_cast<void>(Alpha(alpha_lo));
    static_cast<void>(Alpha(alpha_hi));
    std::vector<double> out(points, 0.0);
    const auto n = static_cast<long long>(points);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < n; ++i) {
        const Alpha a(alpha_at(alpha_lo, alpha_hi, static_cast<std::size_t>(i), points));
        out[i] = max_eigenvalue(bmi_expression(a_tilde(a), bm, p, k));
    }
    return out;
}

double hull_margin(const SymMatrix& p, const Matrix& k, const DistributionMatrix& b, const VertexSet& vertices,
                   const ConvexWeights& w) {
    return max_eigenvalue(bmi_expression(convex_combination(w, vertices), b.matrix(), p, k));
}

double lyapunov_value(const SymMatrix& p, const ErrorVec& e) {
    const auto v = e.as_array();
    return quadratic_form(p.matrix(), v);
}

GainCertificate certify(const LmiProblem& problem, const SymMatrix& y, const Matrix& ka) {
    problem.validate();
    GainCertificate c;
    c.b_form = problem.b.form();
    c.alpha_range = problem.alpha_range;
    c.eps = problem.eps;
    c.delta = problem.delta;
    c.y = y;
    c.ka = ka;
    c.lmi_margins = lmi_margins(problem, y, ka);
    const double worst_lmi = *std::max_element(c.lmi_margins.begin(), c.lmi_margins.end());

    // Y >= eps I and LMI <= -delta I, with a relative rounding allowance so a
    // point scaled exactly onto the margins is not rejected.
    const double y_min = min_eigenvalue(y);
    if (y_min < problem.eps * (1.0 - 1e-9)) {
        throw InfeasibleError("certify: Y violates Y >= eps I (lambda_min = " + std::to_string(y_min) + ")", worst_lmi);
    }
    if (worst_lmi > -problem.delta * (1.0 - 1e-9)) {
        throw InfeasibleError("certify: LMI margin " + std::to_string(worst_lmi) + " exceeds -delta", worst_lmi);
    }

    RecoveredGains g = recover_gains(y, ka);
    const Matrix residual = matmul(g.p, y) - Matrix::identity(y.order());
    if (residual.max_abs() > 1e-8) {
        throw InfeasibleError("certify: ||P Y - I|| too large", worst_lmi);
    }
    const VerificationReport report = verify_certificate(g.p, g.k, problem.b, problem.vertices);
    if (!report.passed()) {
        throw InfeasibleError("certify: recovered gains fail the Lyapunov check (worst margin " +
                                  std::to_string(report.worst_margin()) + ")",
                              worst_lmi);
    }
    c.p = std::move(g.p);
    c.k = std::move(g.k);
    c.bmi_margins = report.bmi_margins;
    c.p_eigenvalues = sym_eigenvalues(c.p);
    return c;
}

// ---------------------------------------------------------------------------
// Barrier solver

namespace {

// S(z) = base + sum_k z_k coeff[k], required positive definite.
struct AffineBlock {
    Matrix base;
    std::vector<Matrix> coeff;
};

struct Layout {
    std::size_t n = 0;       // matrix order
    std::size_t m = 0;       // inputs
    std::size_t n_y = 0;     // trace-zero coordinates of Y
    std::size_t n_ka = 0;
    std::size_t vars() const { return n_y + n_ka + 1; }
    std::size_t t_index() const { return n_y + n_ka; }
};

// Basis of trace-zero symmetric matrices: e_ii - e_(i+1)(i+1), then e_ij + e_ji.
std::vector<Matrix> trace_zero_basis(std::size_t n) {
    std::vector<Matrix> basis;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Matrix e(n, n);
        e(i, i) = 1.0;
        e(i + 1, i + 1) = -1.0;
        basis.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            Matrix e(n, n);
            e(i, j) = 1.0;
            e(j, i) = 1.0;
            basis.push_back(std::move(e));
        }
    }
    return basis;
}

struct Decoded {
    SymMatrix y;
    Matrix ka;
    double t;
};

class BarrierProblem {
public:
    BarrierProblem(const LmiProblem& problem, double ka_bound) {
        const Matrix b = problem.b.matrix();
        layout_.n = b.rows();
        layout_.m = b.cols();
        basis_ = trace_zero_basis(layout_.n);
        layout_.n_y = basis_.size();
        layout_.n_ka = layout_.m * layout_.n;
        y0_ = (1.0 / static_cast<double>(layout_.n)) * Matrix::identity(layout_.n);

        const std::size_t nv = layout_.vars();
        const Matrix eye = Matrix::identity(layout_.n);
        const Matrix zero(layout_.n, layout_.n);

        // t I - (A Y + Y A^T + B Ka + Ka^T B^T) > 0 for every vertex.
        for (const auto& a : problem.vertices) {
            AffineBlock blk{Matrix(layout_.n, layout_.n), std::vector<Matrix>(nv, zero)};
            const Matrix ay0 = matmul(a, y0_);
            blk.base = -1.0 * (ay0 + transpose(ay0));
            for (std::size_t k = 0; k < layout_.n_y; ++k) {
                const Matrix ae = matmul(a, basis_[k]);
                blk.coeff[k] = -1.0 * (ae + transpose(ae));
            }
            for (std::size_t r = 0; r < layout_.m; ++r) {
                for (std::size_t c = 0; c < layout_.n; ++c) {
                    Matrix unit(layout_.m, layout_.n);
                    unit(r, c) = 1.0;
                    const Matrix bu = matmul(b, unit);
                    blk.coeff[layout_.n_y + r * layout_.n + c] = -1.0 * (bu + transpose(bu));
                }
            }
            blk.coeff[layout_.t_index()] = eye;
            blocks_.push_back(std::move(blk));
        }

        // Y + t I > 0.
        {
            AffineBlock blk{y0_, std::vector<Matrix>(nv, zero)};
            for (std::size_t k = 0; k < layout_.n_y; ++k) blk.coeff[k] = basis_[k];
            blk.coeff[layout_.t_index()] = eye;
            blocks_.push_back(std::move(blk));
        }

        // -bound < Ka_j < bound; keeps the barrier bounded below along the
        // directions where B Ka + Ka^T B^T has a zero eigenvalue.
        const Matrix zero1(1, 1);
        for (std::size_t j = 0; j < layout_.n_ka; ++j) {
            for (double sign : {1.0, -1.0}) {
                AffineBlock blk{Matrix{{ka_bound}}, std::vector<Matrix>(nv, zero1)};
                blk.coeff[layout_.n_y + j] = Matrix{{-sign}};
                blocks_.push_back(std::move(blk));
            }
        }

        for (const auto& blk : blocks_) barrier_order_ += static_cast<double>(blk.base.rows());
    }

    const Layout& layout() const { return layout_; }
    double barrier_order() const { return barrier_order_; }

    std::vector<double> initial_point() const {
        std::vector<double> z(layout_.vars(), 0.0);
        // With z = 0 (Y = I/n, Ka = 0), S = base + t I for the LMI and Y
        // blocks; pick t one unit beyond the largest offending eigenvalue.
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 2 * layout_.n_ka < blocks_.size(); ++i) {
            worst = std::max(worst, max_eigenvalue(SymMatrix(-1.0 * blocks_[i].base)));
        }
        z[layout_.t_index()] = worst + 1.0;
        return z;
    }

    Matrix slack(const AffineBlock& blk, const std::vector<double>& z) const {
        Matrix s = blk.base;
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (z[k] == 0.0) continue;
            const Matrix& c = blk.coeff[k];
            for (std::size_t i = 0; i < s.rows(); ++i)
                for (std::size_t j = 0; j < s.cols(); ++j) s(i, j) += z[k] * c(i, j);
        }
        return s;
    }

    /// s * t - sum log det S_b(z); +inf outside the domain.
    double value(const std::vector<double>& z, double s) const {
        double v = s * z[layout_.t_index()];
        for (const auto& blk : blocks_) {
            bool ok = false;
            const double ld = log_det_pd(slack(blk, z), ok);
            if (!ok) return std::numeric_limits<double>::infinity();
            v -= ld;
        }
        return v;
    }

    void gradient_hessian(const std::vector<double>& z, double s, std::vector<double>& g, Matrix& h) const {
        const std::size_t nv = layout_.vars();
        g.assign(nv, 0.0);
        g[layout_.t_index()] = s;
        h = Matrix(nv, nv);
        std::vector<Matrix> t;
        for (const auto& blk : blocks_) {
            const Matrix sinv = invert(slack(blk, z));
            t.clear();
            for (std::size_t k = 0; k < nv; ++k) t.push_back(matmul(sinv, blk.coeff[k]));
            const std::size_t d = sinv.rows();
            for (std::size_t k = 0; k < nv; ++k) {
                double tr = 0.0;
                for (std::size_t i = 0; i < d; ++i) tr += t[k](i, i);
                g[k] -= tr;
                for (std::size_t l = k; l < nv; ++l) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < d; ++i)
                        for (std::size_t j = 0; j < d; ++j) acc += t[k](i, j) * t[l](j, i);
                    h(k, l) += acc;
                    if (l != k) h(l, k) += acc;
                }
            }
        }
    }

    Decoded decode(const std::vector<double>& z) const {
        Matrix y = y0_;
        for (std::size_t k = 0; k < layout_.n_y; ++k) y += z[k] * basis_[k];
        Matrix ka(layout_.m, layout_.n);
        for (std::size_t r = 0; r < layout_.m; ++r)
            for (std::size_t c = 0; c < layout_.n; ++c) ka(r, c) = z[layout_.n_y + r * layout_.n + c];
        return {SymMatrix(y), ka, z[layout_.t_index()]};
    }

private:
    Layout layout_;
    std::vector<Matrix> basis_;
    Matrix y0_{1, 1};
    std::vector<AffineBlock> blocks_;
    double barrier_order_ = 0.0;
};

}  // namespace

GainCertificate solve_feasibility(const LmiProblem& problem, const SolverOptions& options, SolverStats* stats) {
    problem.validate();
    if (!(options.ka_bound > 0.0) || options.max_iterations <= 0) {
        throw InvalidInput("solve_feasibility: invalid solver options");
    }

    const BarrierProblem bp(problem, options.ka_bound);
    const std::size_t nv = bp.layout().vars();
    const std::size_t ti = bp.layout().t_index();

    std::vector<double> z = bp.initial_point();
    std::vector<double> g;
    Matrix h(1, 1);
    std::vector<double> trial(nv);

    double s = 1.0;
    int iterations = 0;
    int rounds = 0;
    double prev_t = z[ti];
    bool budget_hit = false;
    bool stuck = false;

    while (!budget_hit) {
        ++rounds;
        // Newton centering for weight s.
        for (int inner = 0; inner < 200; ++inner) {
            if (iterations >= options.max_iterations) {
                budget_hit = true;
                break;
            }
            std::vector<double> dz;
            try {
                bp.gradient_hessian(z, s, g, h);
                std::vector<double> neg_g(g.size());
                for (std::size_t i = 0; i < g.size(); ++i) neg_g[i] = -g[i];
                dz = cholesky_solve(SymMatrix(h), neg_g);
            } catch (const SingularMatrix&) {
                // Slacks this close to singular mean the path is exhausted;
                // z is still strictly inside the domain.
                stuck = true;
                break;
            }
            double slope = 0.0;
            for (std::size_t i = 0; i < nv; ++i) slope += g[i] * dz[i];
            ++iterations;
            if (-slope / 2.0 < 1e-12) break;

            const double f0 = bp.value(z, s);
            double step = 1.0;
            bool moved = false;
            while (step > 1e-14) {
                for (std::size_t i = 0; i < nv; ++i) trial[i] = z[i] + step * dz[i];
                const double f1 = bp.value(trial, s);
                if (f1 <= f0 + 0.25 * step * slope) {
                    z = trial;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }

        const double t = z[ti];
        const bool converged = bp.barrier_order() / s < options.gap_tol;
        const bool stalled = rounds > 1 && std::abs(prev_t - t) < options.improvement_tol;
        prev_t = t;
        if (converged || stalled || stuck) break;
        s *= 8.0;
    }

    const Decoded d = bp.decode(z);
    // Report the margin actually attained, not the barrier variable t.
    const std::vector<double> normalized = lmi_margins(problem, d.y, d.ka);
    double margin = -min_eigenvalue(d.y);
    for (double m : normalized) margin = std::max(margin, m);

    if (stats) *stats = {iterations, rounds, margin};

    if (!(margin < -options.feasibility_tol)) {
        throw InfeasibleError("solve_feasibility: no strictly feasible point found (best normalized margin " +
                                  std::to_string(margin) + ")",
                              margin);
    }

    // The constraint cone is invariant under (Y, Ka) -> (c Y, c Ka): scale the
    // normalized point until both explicit margins hold.
    const double worst_lmi = *std::max_element(normalized.begin(), normalized.end());
    const double c = std::max(problem.eps / min_eigenvalue(d.y), problem.delta / -worst_lmi) * (1.0 + 1e-6);
    return certify(problem, SymMatrix(c * d.y.matrix()), c * d.ka);
}

}  // namespace switchsync

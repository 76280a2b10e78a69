#pragma once

// Common-quadratic-Lyapunov controller synthesis over the vertex set.
//
// With Y = P^-1 and Ka = K Y, the closed-loop Lyapunov condition
//     (A_i + B K)^T P + P (A_i + B K) < 0      (bilinear in P, K)
// becomes, after congruence with Y,
//     A_i Y + Y A_i^T + B Ka + Ka^T B^T < 0,  Y > 0   (linear in Y, Ka).
// Synthesis solves the linear form; verification checks the bilinear form on
// the recovered (P, K) so the two routes cross-check each other.

#include <array>
#include <cstddef>
#include <vector>

#include "switchsync/polytope.hpp"
#include "switchsync/smallmat.hpp"
#include "switchsync/unified_system.hpp"

namespace switchsync {

struct LmiProblem {
    VertexSet vertices;
    DistributionMatrix b{BForm::Ones};
    double eps = 1e-3;    // Y >= eps I
    double delta = 1e-3;  // every LMI <= -delta I
    /// Alpha range the vertices were built from; carried into certificates.
    std::array<double, 2> alpha_range{0.0, 1.0};

    /// Full interval polytope of A_tilde over [alpha_lo, alpha_hi].
    static LmiProblem for_alpha_range(double alpha_lo, double alpha_hi, BForm b = BForm::Ones, double eps = 1e-3,
                                      double delta = 1e-3);

    /// Throws InvalidInput on non-positive margins, empty or mis-shaped vertices.
    void validate() const;
};

/// A_i Y + Y A_i^T + B Ka + Ka^T B^T
SymMatrix lmi_expression(const Matrix& a, const Matrix& b, const SymMatrix& y, const Matrix& ka);

/// (A_i + B K)^T P + P (A_i + B K)
SymMatrix bmi_expression(const Matrix& a, const Matrix& b, const SymMatrix& p, const Matrix& k);

/// One LMI left-hand side per vertex.
std::vector<SymMatrix> assemble_lmi(const LmiProblem& problem, const SymMatrix& y, const Matrix& ka);

/// lambda_max of each assembled LMI.
std::vector<double> lmi_margins(const LmiProblem& problem, const SymMatrix& y, const Matrix& ka);

struct RecoveredGains {
    SymMatrix p;
    Matrix k;
};

/// P = Y^-1 (symmetrized), K = Ka P. Throws InvalidInput unless Y > 0.
RecoveredGains recover_gains(const SymMatrix& y, const Matrix& ka);

struct VerificationReport {
    double p_min_eig = 0.0;
    std::vector<double> bmi_margins;

    bool passed() const noexcept;
    double worst_margin() const noexcept;
};

/// lambda_min(P) and, per vertex, lambda_max of the bilinear expression.
/// Reports, never throws on a failing certificate. Vertices are checked in
/// parallel; verify_certificate_serial is the single-threaded reference.
VerificationReport verify_certificate(const SymMatrix& p, const Matrix& k, const DistributionMatrix& b,
                                      const VertexSet& vertices);
VerificationReport verify_certificate_serial(const SymMatrix& p, const Matrix& k, const DistributionMatrix& b,
                                             const VertexSet& vertices);

/// lambda_max of the bilinear expression at A_tilde(alpha) for `points` evenly
/// spaced alphas over [alpha_lo, alpha_hi] (points >= 2, or 1 for alpha_lo only).
std::vector<double> alpha_grid_margins(const SymMatrix& p, const Matrix& k, const DistributionMatrix& b,
                                       double alpha_lo, double alpha_hi, std::size_t points);
std::vector<double> alpha_grid_margins_serial(const SymMatrix& p, const Matrix& k, const DistributionMatrix& b,
                                              double alpha_lo, double alpha_hi, std::size_t points);

/// lambda_max of the bilinear expression at sum_i w_i A_i.
double hull_margin(const SymMatrix& p, const Matrix& k, const DistributionMatrix& b, const VertexSet& vertices,
                   const ConvexWeights& w);

/// V(e) = e^T P e
double lyapunov_value(const SymMatrix& p, const ErrorVec& e);

struct GainCertificate {
    BForm b_form = BForm::Ones;
    std::array<double, 2> alpha_range{0.0, 1.0};
    SymMatrix y = SymMatrix::identity(3);
    Matrix ka{1, 3};
    SymMatrix p = SymMatrix::identity(3);
    Matrix k{1, 3};
    double eps = 1e-3;
    double delta = 1e-3;
    std::vector<double> lmi_margins;
    std::vector<double> bmi_margins;
    std::vector<double> p_eigenvalues;  // ascending

    double p_min_eig() const { return p_eigenvalues.front(); }
    FeedbackGain gain() const { return FeedbackGain(k, DistributionMatrix(b_form)); }
};

/// Builds a certificate from LMI variables after checking Y >= eps I, every
/// LMI <= -delta I, and that the recovered (P, K) pass verify_certificate with
/// ||P Y - I||_max <= 1e-8. Throws InfeasibleError (carrying the worst LMI
/// margin) when any check fails; stored margins always come from re-evaluation.
GainCertificate certify(const LmiProblem& problem, const SymMatrix& y, const Matrix& ka);

struct SolverOptions {
    int max_iterations = 10000;       // Newton steps, all centering rounds combined
    double improvement_tol = 1e-12;   // stop once a round improves t by less
    double gap_tol = 1e-10;           // stop once the barrier duality gap is below
    double ka_bound = 10.0;           // |Ka_ij| <= ka_bound while trace(Y) = 1
    double feasibility_tol = 1e-8;    // normalized margin must be below -feasibility_tol
};

struct SolverStats {
    int iterations = 0;
    int rounds = 0;
    double normalized_margin = 0.0;  // max(max_i lambda_max(LMI_i), -lambda_min(Y)) at trace(Y) = 1
};

/// Minimizes t subject to LMI_i(Y, Ka) <= t I, Y >= -t I, trace(Y) = 1 and a
/// box on Ka with a log-det barrier method (Newton centering, geometric
/// barrier weight). A negative optimum is rescaled to meet eps and delta and
/// passed through certify(). Throws InfeasibleError carrying the best
/// normalized margin when none below -feasibility_tol is found.
GainCertificate solve_feasibility(const LmiProblem& problem, const SolverOptions& options = {},
                                  SolverStats* stats = nullptr);

}  // namespace switchsync

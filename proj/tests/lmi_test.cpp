#include "switchsync/lmi.hpp"

#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "switchsync/certificate_io.hpp"
#include "switchsync/errors.hpp"

namespace switchsync {
namespace {

LmiProblem single_vertex(const Matrix& a, BForm b = BForm::Ones) {
    LmiProblem p;
    p.vertices = {a};
    p.b = DistributionMatrix(b);
    return p;
}

double worst(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// One solve shared by the property tests; the solver is deterministic.
const GainCertificate& full_certificate() {
    static const GainCertificate c = solve_feasibility(LmiProblem::for_alpha_range(0.0, 1.0));
    return c;
}

TEST(AssembleLmiTest, Examples) {
    const Matrix zero_ka(1, 3);
    const auto neg = assemble_lmi(single_vertex(-1.0 * Matrix::identity(3)), SymMatrix::identity(3), zero_ka);
    ASSERT_EQ(neg.size(), 1u);
    EXPECT_EQ(neg[0].matrix(), -2.0 * Matrix::identity(3));

    const auto zero = assemble_lmi(single_vertex(Matrix(3, 3)), SymMatrix::identity(3), zero_ka);
    EXPECT_EQ(zero[0].matrix(), Matrix(3, 3));
    EXPECT_EQ(max_eigenvalue(zero[0]), 0.0);  // boundary, not strictly feasible
}

TEST(AssembleLmiTest, DimensionMismatch) {
    EXPECT_THROW(assemble_lmi(single_vertex(Matrix::identity(3)), SymMatrix::identity(3), Matrix(3, 3)), InvalidInput);
    EXPECT_THROW(assemble_lmi(single_vertex(Matrix::identity(3)), SymMatrix::identity(2), Matrix(1, 3)), InvalidInput);
    EXPECT_THROW(lmi_expression(Matrix::identity(2), Matrix(3, 1), SymMatrix::identity(3), Matrix(1, 3)),
                 InvalidInput);
}

TEST(ProblemTest, Validation) {
    LmiProblem p = LmiProblem::for_alpha_range(0.0, 1.0);
    EXPECT_EQ(p.vertices.size(), 32u);
    EXPECT_NO_THROW(p.validate());
    p.eps = 0.0;
    EXPECT_THROW(p.validate(), InvalidInput);
    LmiProblem q;
    EXPECT_THROW(q.validate(), InvalidInput);
    EXPECT_THROW(solve_feasibility(q), InvalidInput);
}

TEST(SolveTest, StableVertexIsFeasible) {
    const GainCertificate c = solve_feasibility(single_vertex(-1.0 * Matrix::identity(3)));
    EXPECT_GT(c.p_min_eig(), 0.0);
    EXPECT_LT(worst(c.bmi_margins), 0.0);
    EXPECT_LE(worst(c.lmi_margins), -c.delta * (1.0 - 1e-9));
    EXPECT_GE(min_eigenvalue(c.y), c.eps * (1.0 - 1e-9));
}

TEST(SolveTest, UnstableIdentityVertexIsInfeasible) {
    // B Ka + Ka^T B^T always has a nonnegative eigenvalue, so 2Y + B Ka + Ka^T B^T
    // cannot be negative definite for Y > 0.
    try {
        solve_feasibility(single_vertex(Matrix::identity(3)));
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_GE(e.best_margin(), -1e-8);
    }
}

TEST(SolveTest, FullProblemIsFeasibleAndVerifies) {
    SolverStats stats;
    const GainCertificate c = solve_feasibility(LmiProblem::for_alpha_range(0.0, 1.0), {}, &stats);
    EXPECT_LT(stats.normalized_margin, -1e-8);
    EXPECT_GT(stats.iterations, 0);
    ASSERT_EQ(c.bmi_margins.size(), 32u);
    ASSERT_EQ(c.lmi_margins.size(), 32u);
    EXPECT_GT(c.p_min_eig(), 0.0);
    const VerificationReport r = verify_certificate(c.p, c.k, DistributionMatrix(BForm::Ones), polytope_vertices());
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.bmi_margins, c.bmi_margins);
    EXPECT_EQ(c.alpha_range[0], 0.0);
    EXPECT_EQ(c.alpha_range[1], 1.0);
}

TEST(SolveTest, IdentityDistributionIsFeasible) {
    const GainCertificate c = solve_feasibility(LmiProblem::for_alpha_range(0.0, 1.0, BForm::Identity));
    EXPECT_EQ(c.k.rows(), 3u);
    EXPECT_EQ(c.b_form, BForm::Identity);
    EXPECT_TRUE(verify_certificate(c.p, c.k, DistributionMatrix(BForm::Identity), polytope_vertices()).passed());
}

TEST(SolveTest, SubrangeIsFeasible) {
    const GainCertificate c = solve_feasibility(LmiProblem::for_alpha_range(0.2, 0.6));
    EXPECT_TRUE(verify_certificate(c.p, c.k, DistributionMatrix(), polytope_vertices(0.2, 0.6)).passed());
}

TEST(RecoverGainsTest, Examples) {
    const RecoveredGains id = recover_gains(SymMatrix::identity(3), Matrix{{1, 2, 3}});
    EXPECT_EQ(id.p.matrix(), Matrix::identity(3));
    EXPECT_EQ(id.k, (Matrix{{1, 2, 3}}));

    const double d[] = {2.0, 4.0, 5.0};
    const RecoveredGains g = recover_gains(SymMatrix(Matrix::diagonal(d)), Matrix{{2, 4, 5}});
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(g.k(0, j), 1.0);
}

TEST(RecoverGainsTest, RejectsIndefiniteY) {
    EXPECT_THROW(recover_gains(SymMatrix(-1.0 * Matrix::identity(3)), Matrix{{1, 2, 3}}), InvalidInput);
    EXPECT_THROW(recover_gains(SymMatrix::identity(3), Matrix{{1, 2}}), InvalidInput);
}

TEST(RecoverGainsTest, RoundTripOnPerturbedCertificates) {
    const GainCertificate& c = full_certificate();
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix y = c.y.matrix();
        Matrix ka = c.ka;
        const double scale = 0.05 * min_eigenvalue(c.y);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) y(i, j) += scale * u(rng);
            ka(0, i) += 0.01 * u(rng);
        }
        const SymMatrix ys(y);
        ASSERT_TRUE(is_positive_definite(ys));
        const RecoveredGains g = recover_gains(ys, ka);
        EXPECT_LE((matmul(g.p, ys) - Matrix::identity(3)).max_abs(), 1e-8);
        EXPECT_LE((matmul(g.k, ys) - ka).max_abs(), 1e-8 * std::max(1.0, ka.max_abs()));
    }
}

TEST(RecoverGainsTest, ScaleInvariance) {
    // The LMI is homogeneous in (Y, Ka): scaling both scales every margin and
    // leaves K unchanged.
    const GainCertificate& c = full_certificate();
    const LmiProblem problem = LmiProblem::for_alpha_range(0.0, 1.0);
    const auto base = lmi_margins(problem, c.y, c.ka);
    for (double s : {0.1, 10.0}) {
        const SymMatrix ys(s * c.y.matrix());
        const Matrix kas = s * c.ka;
        const auto scaled = lmi_margins(problem, ys, kas);
        for (std::size_t i = 0; i < base.size(); ++i) EXPECT_NEAR(scaled[i], s * base[i], 1e-9 * s * std::abs(base[i]));
        const RecoveredGains g = recover_gains(ys, kas);
        EXPECT_LE((g.k - c.k).max_abs(), 1e-8 * c.k.max_abs());
    }
}

TEST(CertifyTest, RoundTripOnSolverOutput) {
    const GainCertificate& c = full_certificate();
    const GainCertificate again = certify(LmiProblem::for_alpha_range(0.0, 1.0), c.y, c.ka);
    EXPECT_EQ(again.p.matrix(), c.p.matrix());
    EXPECT_EQ(again.k, c.k);
    EXPECT_EQ(again.bmi_margins, c.bmi_margins);
}

TEST(CertifyTest, RejectsPointsThatMissTheMargins) {
    const GainCertificate& c = full_certificate();
    const LmiProblem problem = LmiProblem::for_alpha_range(0.0, 1.0);
    // Shrinking towards zero keeps the sign of every margin but breaks eps/delta.
    EXPECT_THROW(certify(problem, SymMatrix(1e-6 * c.y.matrix()), 1e-6 * c.ka), InfeasibleError);
    EXPECT_THROW(certify(problem, SymMatrix::identity(3), Matrix(1, 3)), InfeasibleError);
}

TEST(VerifyTest, Examples) {
    const VertexSet neg{-1.0 * Matrix::identity(3)};
    const VerificationReport ok = verify_certificate(SymMatrix::identity(3), Matrix(1, 3), DistributionMatrix(), neg);
    ASSERT_EQ(ok.bmi_margins.size(), 1u);
    EXPECT_DOUBLE_EQ(ok.bmi_margins[0], -2.0);
    EXPECT_TRUE(ok.passed());

    const VerificationReport bad =
        verify_certificate(SymMatrix(-1.0 * Matrix::identity(3)), Matrix{{1, 2, 3}}, DistributionMatrix(), neg);
    EXPECT_DOUBLE_EQ(bad.p_min_eig, -1.0);
    EXPECT_FALSE(bad.passed());

    EXPECT_THROW(verify_certificate(SymMatrix::identity(3), Matrix(3, 3), DistributionMatrix(), neg), InvalidInput);
}

TEST(VerifyTest, SerialAndParallelAgree) {
    const GainCertificate& c = full_certificate();
    const DistributionMatrix b;
    const VertexSet v = polytope_vertices();
    const VerificationReport par = verify_certificate(c.p, c.k, b, v);
    const VerificationReport ser = verify_certificate_serial(c.p, c.k, b, v);
    EXPECT_EQ(par.bmi_margins, ser.bmi_margins);
    EXPECT_EQ(par.p_min_eig, ser.p_min_eig);
    EXPECT_EQ(alpha_grid_margins(c.p, c.k, b, 0.0, 1.0, 1001), alpha_grid_margins_serial(c.p, c.k, b, 0.0, 1.0, 1001));
}

TEST(VerifyTest, OneHotHullMatchesVertexChecks) {
    const GainCertificate& c = full_certificate();
    const VertexSet v = polytope_vertices();
    const DistributionMatrix b;
    const VerificationReport r = verify_certificate(c.p, c.k, b, v);
    for (std::size_t j = 0; j < v.size(); ++j) {
        EXPECT_EQ(hull_margin(c.p, c.k, b, v, ConvexWeights::one_hot(32, j)), r.bmi_margins[j]);
    }
}

TEST(VerifyTest, RandomHullPointsAreStable) {
    // A common Lyapunov matrix for the vertices covers their convex hull.
    const GainCertificate& c = full_certificate();
    const VertexSet v = polytope_vertices();
    std::mt19937_64 rng(41);
    std::exponential_distribution<double> ex(1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> w(32);
        double s = 0.0;
        for (double& x : w) s += (x = ex(rng));
        for (double& x : w) x /= s;
        double sum = 0.0;
        for (double x : w) sum += x;
        w.back() += 1.0 - sum;
        EXPECT_LT(hull_margin(c.p, c.k, DistributionMatrix(), v, ConvexWeights(w)), 0.0);
    }
}

TEST(VerifyTest, AlphaGridCoverage) {
    const GainCertificate& c = full_certificate();
    const auto grid = alpha_grid_margins(c.p, c.k, DistributionMatrix(), 0.0, 1.0, 101);
    ASSERT_EQ(grid.size(), 101u);
    EXPECT_LT(worst(grid), 0.0);
    // Endpoints coincide with direct evaluation at alpha = 0 and 1.
    const Matrix b = DistributionMatrix().matrix();
    EXPECT_EQ(grid.front(), max_eigenvalue(bmi_expression(a_tilde(Alpha(0.0)), b, c.p, c.k)));
    EXPECT_EQ(grid.back(), max_eigenvalue(bmi_expression(a_tilde(Alpha(1.0)), b, c.p, c.k)));
    EXPECT_THROW(alpha_grid_margins(c.p, c.k, DistributionMatrix(), 0.0, 1.5, 11), InvalidInput);
}

TEST(LyapunovValueTest, Examples) {
    EXPECT_EQ(lyapunov_value(SymMatrix::identity(3), {}), 0.0);
    EXPECT_DOUBLE_EQ(lyapunov_value(SymMatrix::identity(3), {3, 4, 0}), 25.0);
    const double d[] = {1.0, 2.0, 3.0};
    EXPECT_DOUBLE_EQ(lyapunov_value(SymMatrix(Matrix::diagonal(d)), {1, 1, 1}), 6.0);
}

TEST(CertificateIoTest, JsonRoundTripIsLossless) {
    const GainCertificate& c = full_certificate();
    const GainCertificate back = certificate_from_json(nlohmann::json::parse(certificate_to_json(c).dump()));
    EXPECT_EQ(back.b_form, c.b_form);
    EXPECT_EQ(back.alpha_range, c.alpha_range);
    EXPECT_EQ(back.y.matrix(), c.y.matrix());
    EXPECT_EQ(back.p.matrix(), c.p.matrix());
    EXPECT_EQ(back.ka, c.ka);
    EXPECT_EQ(back.k, c.k);
    EXPECT_EQ(back.eps, c.eps);
    EXPECT_EQ(back.bmi_margins, c.bmi_margins);
    EXPECT_EQ(back.p_eigenvalues, c.p_eigenvalues);
}

TEST(CertificateIoTest, RejectsMalformedContent) {
    nlohmann::json j = certificate_to_json(full_certificate());
    nlohmann::json bad = j;
    bad["K"] = nlohmann::json::array({nlohmann::json::array({1.0, 2.0})});
    EXPECT_THROW(certificate_from_json(bad), InvalidInput);
    bad = j;
    bad.erase("P");
    EXPECT_THROW(certificate_from_json(bad), InvalidInput);
    bad = j;
    bad["b_form"] = "diag";
    EXPECT_THROW(certificate_from_json(bad), InvalidInput);
    bad = j;
    bad["Y"][0][0] = "x";
    EXPECT_THROW(certificate_from_json(bad), InvalidInput);
    EXPECT_THROW(certificate_from_json(nlohmann::json::array()), InvalidInput);
}

}  // namespace
}  // namespace switchsync

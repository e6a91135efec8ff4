#include <gtest/gtest.h>

#include <limits>

#include <Eigen/Dense>

#include "jed/solver.hpp"
#include "support.hpp"

using jed::Direction;
using jed::ImagePlane;
using jed::WeightedLaplacianOperator;

namespace {

WeightedLaplacianOperator random_operator(testsup::Rng& rng, int w, int h, double c = 1.0,
                                          double wmax = 3.0) {
    return WeightedLaplacianOperator(testsup::random_plane(rng, w, h, 0.0, wmax),
                                     testsup::random_plane(rng, w, h, 0.0, wmax), c);
}

}  // namespace

TEST(Operator, ZeroWeightsGiveScaledIdentity) {
    ImagePlane zero(3, 3, 0.0);
    WeightedLaplacianOperator op(zero, zero, 1.0);
    testsup::Rng rng(31);
    ImagePlane x = testsup::random_plane(rng, 3, 3);
    ImagePlane ax = op.apply(x);
    EXPECT_EQ(ax.values(), x.values());
}

TEST(Operator, ConstantsAreEigenvectorsWithEigenvalueC) {
    testsup::Rng rng(32);
    WeightedLaplacianOperator op = random_operator(rng, 5, 4, 1.0);
    ImagePlane c(5, 4, 0.42);
    ImagePlane ac = op.apply(c);
    for (double v : ac.values()) EXPECT_NEAR(v, 0.42, 1e-14);
}

TEST(Operator, MatchesDenseAssemblyOnRandomGrids) {
    testsup::Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        WeightedLaplacianOperator op = random_operator(rng, 4, 4, 1.0 + rng.uniform());
        Eigen::MatrixXd dense = testsup::to_eigen(jed::assemble_dense(op));
        ImagePlane x = testsup::random_plane(rng, 4, 4, -1.0, 1.0);
        Eigen::VectorXd ref = dense * testsup::to_eigen(x);
        ImagePlane ax = op.apply(x);
        EXPECT_LT(testsup::max_abs_diff(ax, testsup::from_eigen(ref, 4, 4)), 1e-12);
    }
}

TEST(Operator, SymmetricUnderInnerProduct) {
    testsup::Rng rng(34);
    WeightedLaplacianOperator op = random_operator(rng, 6, 3);
    ImagePlane u = testsup::random_plane(rng, 6, 3, -1.0, 1.0);
    ImagePlane v = testsup::random_plane(rng, 6, 3, -1.0, 1.0);
    EXPECT_NEAR(testsup::dot(op.apply(u), v), testsup::dot(u, op.apply(v)), 1e-12);
}

TEST(Operator, RejectsShapeMismatchAndBadWeights) {
    ImagePlane w3(3, 3, 1.0);
    WeightedLaplacianOperator op(w3, w3, 1.0);
    EXPECT_THROW(op.apply(ImagePlane(4, 3)), std::invalid_argument);
    EXPECT_THROW(WeightedLaplacianOperator(w3, ImagePlane(2, 2), 1.0), std::invalid_argument);
    EXPECT_THROW(WeightedLaplacianOperator(w3, w3, 0.0), std::invalid_argument);
    EXPECT_THROW(WeightedLaplacianOperator(ImagePlane(3, 3, -0.5), w3, 1.0),
                 std::invalid_argument);
}

TEST(DenseAssembly, TwoPixelChainByHand) {
    // 2x1 grid, identity 1, horizontal weight w on the only difference row:
    // the matrix is [[1+w, -w], [-w, 1+w]].
    double w = 0.7;
    WeightedLaplacianOperator op(ImagePlane(2, 1, std::vector<double>{w, 123.0}),
                                 ImagePlane(2, 1, 0.0), 1.0);
    jed::DenseMatrix m = jed::assemble_dense(op);
    EXPECT_DOUBLE_EQ(m.at(0, 0), 1.0 + w);
    EXPECT_DOUBLE_EQ(m.at(0, 1), -w);
    EXPECT_DOUBLE_EQ(m.at(1, 0), -w);
    EXPECT_DOUBLE_EQ(m.at(1, 1), 1.0 + w);
}

TEST(DenseAssembly, SymmetryAndSpectrumBound) {
    testsup::Rng rng(35);
    for (int trial = 0; trial < 5; ++trial) {
        double c = 0.5 + rng.uniform();
        WeightedLaplacianOperator op = random_operator(rng, 4, 5, c);
        Eigen::MatrixXd a = testsup::to_eigen(jed::assemble_dense(op));
        EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
        EXPECT_GE(es.eigenvalues().minCoeff(), c - 1e-12);
    }
}

TEST(DenseAssembly, OracleGuardRefusesLargeGrids) {
    ImagePlane w(65, 64, 1.0);
    WeightedLaplacianOperator op(w, w, 1.0);
    EXPECT_THROW(jed::assemble_dense(op), std::invalid_argument);
}

TEST(Solve, IdentitySystemConvergesInOneIteration) {
    ImagePlane zero(4, 4, 0.0);
    WeightedLaplacianOperator op(zero, zero, 1.0);
    testsup::Rng rng(36);
    ImagePlane rhs = testsup::random_plane(rng, 4, 4);
    auto [x, report] = jed::solve(op, rhs, 1e-10, 100);
    EXPECT_TRUE(report.converged);
    EXPECT_LE(report.iterations, 1);
    EXPECT_LT(testsup::max_abs_diff(x, rhs), 1e-14);
}

TEST(Solve, DiagonalSystemHalvesRhs) {
    ImagePlane zero(3, 3, 0.0);
    WeightedLaplacianOperator op(zero, zero, 2.0);
    testsup::Rng rng(37);
    ImagePlane rhs = testsup::random_plane(rng, 3, 3);
    auto [x, report] = jed::solve(op, rhs, 1e-12, 100);
    EXPECT_TRUE(report.converged);
    for (std::size_t i = 0; i < x.pixel_count(); ++i)
        EXPECT_NEAR(x.values()[i], rhs.values()[i] / 2.0, 1e-13);
}

TEST(Solve, MatchesDenseDirectSolveOnRandomSystems) {
    testsup::Rng rng(38);
    for (int trial = 0; trial < 10; ++trial) {
        WeightedLaplacianOperator op = random_operator(rng, 8, 8, 1.0, 5.0);
        ImagePlane rhs = testsup::random_plane(rng, 8, 8, -1.0, 1.0);
        auto [x, report] = jed::solve(op, rhs, 1e-12, 500);
        ASSERT_TRUE(report.converged);
        ImagePlane ref = testsup::dense_reference_solve(op, rhs);
        double scale = 0.0;
        for (double v : ref.values()) scale = std::max(scale, std::abs(v));
        EXPECT_LT(testsup::max_abs_diff(x, ref) / scale, 1e-8);
    }
}

TEST(Solve, ReportResidualIsConsistentWithRecomputation) {
    testsup::Rng rng(39);
    WeightedLaplacianOperator op = random_operator(rng, 6, 6, 1.0, 10.0);
    ImagePlane rhs = testsup::random_plane(rng, 6, 6);
    double tol = 1e-7;
    auto [x, report] = jed::solve(op, rhs, tol, 500);
    ASSERT_TRUE(report.converged);
    ImagePlane ax = op.apply(x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ax.pixel_count(); ++i) {
        double r = ax.values()[i] - rhs.values()[i];
        num += r * r;
        den += rhs.values()[i] * rhs.values()[i];
    }
    double rel = std::sqrt(num / den);
    EXPECT_LE(rel, tol * (1.0 + 1e-9));
    EXPECT_NEAR(rel, report.relative_residual, 1e-12);
}

TEST(Solve, SolutionMinimizesQuadraticForm) {
    // The SPD solution minimizes 0.5 x^T A x - b^T x; random perturbations must
    // not improve it.
    testsup::Rng rng(40);
    WeightedLaplacianOperator op = random_operator(rng, 5, 5, 1.0, 4.0);
    ImagePlane rhs = testsup::random_plane(rng, 5, 5);
    auto [x, report] = jed::solve(op, rhs, 1e-12, 500);
    ASSERT_TRUE(report.converged);
    auto objective = [&](const ImagePlane& v) {
        return 0.5 * testsup::dot(v, op.apply(v)) - testsup::dot(rhs, v);
    };
    double at_solution = objective(x);
    for (int trial = 0; trial < 100; ++trial) {
        ImagePlane perturbed = x;
        for (double& v : perturbed.values()) v += rng.uniform(-1e-3, 1e-3);
        EXPECT_LE(at_solution, objective(perturbed));
    }
}

TEST(Solve, NonConvergenceReturnsBestIterate) {
    testsup::Rng rng(41);
    WeightedLaplacianOperator op = random_operator(rng, 8, 8, 1.0, 50.0);
    ImagePlane rhs = testsup::random_plane(rng, 8, 8);
    auto [x, report] = jed::solve(op, rhs, 1e-14, 2);
    EXPECT_FALSE(report.converged);
    EXPECT_EQ(report.iterations, 2);
    EXPECT_GT(report.relative_residual, 1e-14);
    EXPECT_TRUE(x.all_finite());
}

TEST(Solve, NonFiniteRhsIsANumericalError) {
    ImagePlane zero(3, 3, 0.0);
    WeightedLaplacianOperator op(zero, zero, 1.0);
    ImagePlane rhs(3, 3, 1.0);
    rhs(1, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(jed::solve(op, rhs, 1e-8, 50), std::runtime_error);
}

TEST(Solve, ZeroRhsShortCircuits) {
    ImagePlane zero(3, 3, 0.0);
    WeightedLaplacianOperator op(zero, zero, 1.0);
    auto [x, report] = jed::solve(op, ImagePlane(3, 3, 0.0), 1e-10, 100);
    EXPECT_TRUE(report.converged);
    EXPECT_EQ(report.iterations, 0);
    for (double v : x.values()) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Solve, DeterministicAcrossRuns) {
    testsup::Rng rng(42);
    WeightedLaplacianOperator op = random_operator(rng, 7, 7, 1.0, 8.0);
    ImagePlane rhs = testsup::random_plane(rng, 7, 7);
    auto [x1, r1] = jed::solve(op, rhs, 1e-9, 300);
    auto [x2, r2] = jed::solve(op, rhs, 1e-9, 300);
    EXPECT_EQ(x1.values(), x2.values());  // bitwise
    EXPECT_EQ(r1.iterations, r2.iterations);
    EXPECT_EQ(r1.relative_residual, r2.relative_residual);
}

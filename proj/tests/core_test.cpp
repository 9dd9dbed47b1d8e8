#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "qtsim/density.hpp"
#include "qtsim/layout.hpp"
#include "qtsim/measure.hpp"
#include "qtsim/state.hpp"
#include "qtsim/unitary.hpp"
#include "test_util.hpp"

namespace {

using qtsim::cplx;
using qtsim::DensityMatrix;
using qtsim::RngStream;
using qtsim::StateVector;
using qtsim::SubsystemLayout;
using qtsim::UnitaryOp;

// ---------- layout ----------

TEST(Layout, PacksBigEndian) {
    SubsystemLayout lay({2, 3, 2});
    EXPECT_EQ(lay.total_dim(), 12);
    EXPECT_EQ(lay.stride(0), 6);
    EXPECT_EQ(lay.stride(1), 2);
    EXPECT_EQ(lay.stride(2), 1);
    EXPECT_EQ(lay.index_of({1, 2, 1}), 11);
    EXPECT_EQ(lay.index_of({1, 0, 1}), 7);
    EXPECT_EQ(lay.digits_of(7), (std::vector<int>{1, 0, 1}));
}

TEST(Layout, RoundTripsAllIndices) {
    SubsystemLayout lay({3, 2, 4});
    for (int i = 0; i < lay.total_dim(); ++i)
        EXPECT_EQ(lay.index_of(lay.digits_of(i)), i);
}

TEST(Layout, RejectsBadDims) {
    EXPECT_THROW(SubsystemLayout({}), std::invalid_argument);
    EXPECT_THROW(SubsystemLayout({2, 1}), std::invalid_argument);
    EXPECT_THROW(SubsystemLayout({0}), std::invalid_argument);
}

// ---------- state ----------

TEST(State, NormalizesOnConstruction) {
    StateVector psi(SubsystemLayout({2}), {cplx(3.0, 0.0), cplx(0.0, 4.0)});
    EXPECT_NEAR(std::abs(psi[0] - cplx(0.6, 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(psi[1] - cplx(0.0, 0.8)), 0.0, 1e-15);
    EXPECT_NEAR(psi.norm(), 1.0, 1e-15);
}

TEST(State, RejectsZeroVector) {
    EXPECT_THROW(StateVector(SubsystemLayout({2}), {cplx(0, 0), cplx(0, 0)}),
                 std::invalid_argument);
}

TEST(State, RejectsSizeMismatch) {
    EXPECT_THROW(StateVector(SubsystemLayout({2, 2}), {cplx(1, 0)}),
                 std::invalid_argument);
}

TEST(State, TensorOrdersFirstFactorAsHighDigits) {
    const StateVector a = StateVector::single_qubit(cplx(0, 0), cplx(1, 0));
    const StateVector b = StateVector::single_qubit(cplx(1, 0), cplx(0, 0));
    const StateVector ab = tensor(a, b);  // |1> (x) |0> = index 2 of 4
    EXPECT_NEAR(std::abs(ab[2] - cplx(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(ab[0]) + std::abs(ab[1]) + std::abs(ab[3]), 0.0,
                1e-15);
}

TEST(State, InnerAndFidelity) {
    const StateVector plus = StateVector::single_qubit(
        cplx(1 / std::sqrt(2.0), 0), cplx(1 / std::sqrt(2.0), 0));
    const StateVector zero = StateVector::single_qubit(cplx(1, 0), cplx(0, 0));
    EXPECT_NEAR(std::abs(inner(plus, zero) - cplx(1 / std::sqrt(2.0), 0)), 0.0,
                1e-15);
    EXPECT_NEAR(fidelity(plus, zero), 0.5, 1e-15);
}

TEST(State, MaxAbsDiffSeesGlobalPhase) {
    const StateVector a = StateVector::single_qubit(cplx(1, 0), cplx(0, 0));
    const StateVector b = StateVector::single_qubit(cplx(-1, 0), cplx(0, 0));
    EXPECT_NEAR(fidelity(a, b), 1.0, 1e-15);  // fidelity is phase-blind
    EXPECT_NEAR(max_abs_diff(a, b), 2.0, 1e-15);
}

// ---------- unitary application ----------

// Direct-definition oracle: full-space matrix with entries
// U_full[i, j] = U[digits_T(i), digits_T(j)] * [complement digits equal],
// built entrywise, then applied densely.
StateVector apply_oracle(const StateVector& psi, const Eigen::MatrixXcd& u,
                         const std::vector<int>& targets) {
    const auto& lay = psi.layout();
    const int n = lay.total_dim();
    auto target_value = [&](int idx) {
        int v = 0;
        for (int t : targets)
            v = v * lay.dim(t) + (idx / lay.stride(t)) % lay.dim(t);
        return v;
    };
    auto complement_equal = [&](int i, int j) {
        for (int k = 0; k < lay.size(); ++k) {
            bool is_target = false;
            for (int t : targets) is_target |= (t == k);
            if (is_target) continue;
            if ((i / lay.stride(k)) % lay.dim(k) !=
                (j / lay.stride(k)) % lay.dim(k))
                return false;
        }
        return true;
    };
    std::vector<cplx> out(n, cplx(0, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (complement_equal(i, j))
                out[i] += u(target_value(i), target_value(j)) * psi[j];
    return StateVector(lay, std::move(out));
}

TEST(Unitary, RejectsNonUnitary) {
    Eigen::MatrixXcd m(2, 2);
    m << 1, 0, 0, 2;
    EXPECT_THROW(UnitaryOp{m}, std::invalid_argument);
}

TEST(Unitary, AcceptsGlobalPhase) {
    const UnitaryOp u = qtsim::pauli_y().scaled(cplx(0, -1));  // -i sigma_y
    EXPECT_NEAR(std::abs(u(0, 1) - cplx(-1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(u(1, 0) - cplx(1, 0)), 0.0, 1e-15);
}

TEST(Unitary, MatchesDenseOracleOnScatteredTargets) {
    RngStream rng(2024, 0);
    const SubsystemLayout lay({2, 3, 2, 2});
    const std::vector<std::vector<int>> target_sets = {
        {0}, {1}, {3}, {0, 2}, {2, 0}, {3, 1}, {0, 2, 3}};
    for (const auto& targets : target_sets) {
        int block = 1;
        for (int t : targets) block *= lay.dim(t);
        for (int rep = 0; rep < 20; ++rep) {
            const StateVector psi = testutil::random_state(lay, rng);
            const Eigen::MatrixXcd u = testutil::haar_unitary(block, rng);
            const StateVector got =
                qtsim::apply_unitary(psi, UnitaryOp(u), targets);
            const StateVector want = apply_oracle(psi, u, targets);
            EXPECT_LE(max_abs_diff(got, want), 1e-12);
        }
    }
}

TEST(Unitary, PreservesNormOnRandomInputs) {
    RngStream rng(77, 0);
    const SubsystemLayout lay({2, 2, 2});
    for (int rep = 0; rep < 1000; ++rep) {
        const StateVector psi = testutil::random_state(lay, rng);
        const UnitaryOp u(testutil::haar_unitary(4, rng));
        const StateVector out = qtsim::apply_unitary(psi, u, {0, 2});
        EXPECT_NEAR(out.norm(), 1.0, 1e-12);
    }
}

TEST(Unitary, ComposesLikeMatrixProduct) {
    RngStream rng(31, 0);
    const SubsystemLayout lay({2, 2});
    const StateVector psi = testutil::random_state(lay, rng);
    const Eigen::MatrixXcd a = testutil::haar_unitary(2, rng);
    const Eigen::MatrixXcd b = testutil::haar_unitary(2, rng);
    const StateVector seq = qtsim::apply_unitary(
        qtsim::apply_unitary(psi, UnitaryOp(a), {1}), UnitaryOp(b), {1});
    const StateVector prod =
        qtsim::apply_unitary(psi, UnitaryOp(Eigen::MatrixXcd(b * a)), {1});
    EXPECT_LE(max_abs_diff(seq, prod), 1e-12);
}

// ---------- density matrices ----------

TEST(Density, FromStateIsPureProjector) {
    RngStream rng(5, 0);
    const StateVector psi = testutil::random_state(SubsystemLayout({2, 2}), rng);
    const DensityMatrix rho = DensityMatrix::from_state(psi);
    EXPECT_NEAR(rho.purity(), 1.0, 1e-12);
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
}

TEST(Density, RejectsUnphysicalMatrices) {
    const SubsystemLayout lay({2});
    Eigen::MatrixXcd non_herm(2, 2);
    non_herm << 0.5, cplx(0.1, 0.1), cplx(0.3, 0.0), 0.5;
    EXPECT_THROW(DensityMatrix(lay, non_herm), std::invalid_argument);

    Eigen::MatrixXcd bad_trace = Eigen::MatrixXcd::Identity(2, 2);
    EXPECT_THROW(DensityMatrix(lay, bad_trace), std::invalid_argument);

    Eigen::MatrixXcd negative(2, 2);
    negative << 1.5, 0, 0, -0.5;
    EXPECT_THROW(DensityMatrix(lay, negative), std::invalid_argument);
}

TEST(Density, ReducedOfProductIsFactorState) {
    RngStream rng(9, 0);
    const StateVector a = testutil::random_qubit(rng);
    const StateVector b = testutil::random_state(SubsystemLayout({3}), rng);
    const StateVector ab = tensor(a, b);
    const DensityMatrix ra = qtsim::reduced_density(ab, {0});
    const DensityMatrix want = DensityMatrix::from_state(a);
    EXPECT_LE((ra.matrix() - want.matrix()).cwiseAbs().maxCoeff(), 1e-12);
    const DensityMatrix rb = qtsim::reduced_density(ab, {1});
    EXPECT_LE(
        (rb.matrix() - DensityMatrix::from_state(b).matrix()).cwiseAbs().maxCoeff(),
        1e-12);
}

TEST(Density, ReducedTracePreservedOnEntangledState) {
    // (|00> + |11>)/sqrt(2): each side reduces to I/2.
    const double s = 1 / std::sqrt(2.0);
    const StateVector bell(SubsystemLayout({2, 2}),
                           {cplx(s, 0), cplx(0, 0), cplx(0, 0), cplx(s, 0)});
    const DensityMatrix r0 = qtsim::reduced_density(bell, {0});
    EXPECT_LE(
        (r0.matrix() - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff(),
        1e-12);
    EXPECT_NEAR(r0.purity(), 0.5, 1e-12);
}

TEST(Density, ReducedMatchesKeptOrderOnMiddleSubsystem) {
    RngStream rng(13, 0);
    const SubsystemLayout lay({2, 3, 2});
    const StateVector psi = testutil::random_state(lay, rng);
    // Oracle: entrywise definition of the partial trace over {0, 2}.
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(3, 3);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 2; ++k)
                    want(r, c) += psi[lay.index_of({i, r, k})] *
                                  std::conj(psi[lay.index_of({i, c, k})]);
    const DensityMatrix got = qtsim::reduced_density(psi, {1});
    EXPECT_LE((got.matrix() - want).cwiseAbs().maxCoeff(), 1e-12);
}

// ---------- measurement ----------

std::vector<StateVector> computational_basis(std::vector<int> dims) {
    const SubsystemLayout lay(std::move(dims));
    std::vector<StateVector> basis;
    for (int k = 0; k < lay.total_dim(); ++k)
        basis.push_back(StateVector::basis_state(lay, k));
    return basis;
}

TEST(Measure, BornProbabilitiesAreCompleteOnRandomStates) {
    RngStream rng(17, 0);
    const SubsystemLayout lay({2, 3, 2});
    for (int rep = 0; rep < 200; ++rep) {
        const StateVector psi = testutil::random_state(lay, rng);
        const auto probs = qtsim::born_probabilities(psi, {1}, computational_basis({3}));
        double total = 0.0;
        for (double p : probs) {
            EXPECT_GE(p, -1e-15);
            total += p;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(Measure, BornMatchesAmplitudesOnFullMeasurement) {
    RngStream rng(19, 0);
    const SubsystemLayout lay({2, 2});
    const StateVector psi = testutil::random_state(lay, rng);
    const auto probs = qtsim::born_probabilities(psi, {0, 1}, computational_basis({2, 2}));
    for (int k = 0; k < 4; ++k)
        EXPECT_NEAR(probs[k], std::norm(psi[k]), 1e-12);
}

TEST(Measure, RejectsIncompleteOrSkewedBasis) {
    const StateVector psi =
        StateVector::basis_state(SubsystemLayout({2, 2}), 0);
    auto basis = computational_basis({2});
    basis.pop_back();
    EXPECT_THROW(qtsim::born_probabilities(psi, {0}, basis),
                 std::invalid_argument);

    const double s = 1 / std::sqrt(2.0);
    std::vector<StateVector> skew = {
        StateVector::single_qubit(cplx(1, 0), cplx(0, 0)),
        StateVector::single_qubit(cplx(s, 0), cplx(s, 0))};
    EXPECT_THROW(qtsim::born_probabilities(psi, {0}, skew),
                 std::invalid_argument);
}

TEST(Measure, ProjectOutcomeCollapsesAndKeepsPhases) {
    // |psi> = (|0>(x)|phi0> + |1>(x)|phi1>)/norm with distinct phases; after
    // outcome 1 on qubit 0 the state is |1>(x)|phi1> with phases intact.
    const cplx a(0.3, 0.4), b(-0.5, 0.2), c(0.1, -0.6), d(0.2, 0.2);
    const StateVector psi(SubsystemLayout({2, 2}), {a, b, c, d});
    const StateVector post =
        qtsim::project_outcome(psi, {0}, computational_basis({2}), 1);
    const double n = std::sqrt(std::norm(c) + std::norm(d));
    EXPECT_NEAR(std::abs(post[0]), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(post[1]), 0.0, 1e-15);
    EXPECT_LE(std::abs(post[2] - c / n), 1e-12);
    EXPECT_LE(std::abs(post[3] - d / n), 1e-12);
}

TEST(Measure, ProjectOntoZeroProbabilityOutcomeThrows) {
    const StateVector psi =
        StateVector::basis_state(SubsystemLayout({2, 2}), 0);
    EXPECT_THROW(qtsim::project_outcome(psi, {0}, computational_basis({2}), 1),
                 std::runtime_error);
}

TEST(Measure, RepeatedMeasurementIsIdempotent) {
    RngStream rng(23, 0);
    const SubsystemLayout lay({2, 2, 2});
    for (int rep = 0; rep < 50; ++rep) {
        const StateVector psi = testutil::random_state(lay, rng);
        const auto first =
            qtsim::measure_projective(psi, {1}, computational_basis({2}), rng);
        const auto probs =
            qtsim::born_probabilities(first.post, {1}, computational_basis({2}));
        EXPECT_NEAR(probs[first.outcome], 1.0, 1e-12);
    }
}

TEST(Measure, SamplingMatchesBornStatistics) {
    // Chi-square on 4 outcomes, 100000 draws, alpha = 0.001 (3 dof).
    RngStream rng(20260817, 1);
    const StateVector psi(
        SubsystemLayout({2, 2}),
        {cplx(0.7, 0.0), cplx(0.0, 0.5), cplx(-0.3, 0.3), cplx(0.1, -0.25)});
    const auto probs = qtsim::born_probabilities(psi, {0, 1}, computational_basis({2, 2}));
    std::vector<long> counts(4, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) counts[qtsim::sample_index(probs, rng)]++;
    EXPECT_LT(testutil::chi_square(counts, probs), 16.266);
}

TEST(Measure, MeasurementSequenceIsSeedDeterministic) {
    const SubsystemLayout lay({2, 2});
    RngStream rng_a(321, 4);
    RngStream rng_b(321, 4);
    const StateVector psi = testutil::random_state(lay, rng_a);
    const StateVector psi_b = testutil::random_state(lay, rng_b);
    EXPECT_LE(max_abs_diff(psi, psi_b), 0.0);
    for (int i = 0; i < 200; ++i) {
        const auto ra =
            qtsim::measure_projective(psi, {0}, computational_basis({2}), rng_a);
        const auto rb =
            qtsim::measure_projective(psi, {0}, computational_basis({2}), rng_b);
        ASSERT_EQ(ra.outcome, rb.outcome);
    }
}

TEST(Measure, FactorOutRecoversSecondFactorExactly) {
    RngStream rng(29, 0);
    const StateVector a = testutil::random_state(SubsystemLayout({3}), rng);
    const StateVector b = testutil::random_state(SubsystemLayout({2, 2}), rng);
    const StateVector ab = tensor(a, b);
    const StateVector got = qtsim::factor_out(ab, {0}, a);
    EXPECT_LE(max_abs_diff(got, b), 1e-12);

    // Orthogonal factor: no overlap, must throw.
    const StateVector c(SubsystemLayout({3}),
                        {-std::conj(a[1]), std::conj(a[0]), cplx(0, 0)});
    if (std::abs(inner(c, a)) < 1e-15)
        EXPECT_THROW(qtsim::factor_out(ab, {0}, c), std::runtime_error);
}

}  // namespace

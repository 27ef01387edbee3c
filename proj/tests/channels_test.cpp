#include "choiforge/channels.hpp"

#include "choiforge/random.hpp"
#include "choiforge/zoo.hpp"
#include "test_util.hpp"

using namespace choiforge;
using choiforge::testing::matrices_near;
using choiforge::testing::pauli_x;
using choiforge::testing::pauli_y;
using choiforge::testing::pauli_z;

namespace {

const KrausSet fully_depolarizing{2, 2, {ComplexMatrix::identity(2) * 0.5, pauli_x * 0.5, pauli_y * 0.5, pauli_z * 0.5}};

KrausSet amplitude_damping_half() {
    const double s = 1.0 / std::sqrt(2.0);
    return KrausSet(2, 2, {ComplexMatrix{{1, 0}, {0, s}}, ComplexMatrix{{0, s}, {0, 0}}});
}

// Independent of kraus_to_choi: J block (i, j) = (1-p)|i><j| + p delta_ij I/2.
ComplexMatrix depolarizing_choi_by_blocks(double p) {
    ComplexMatrix j(4, 4);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) {
            ComplexMatrix block = ComplexMatrix::unit(2, r, c) * (1.0 - p);
            if (r == c) block += ComplexMatrix::identity(2) * (p / 2.0);
            j.set_block(r, c, block);
        }
    return j;
}

StinespringModel cnot_dephasing() {
    const ComplexMatrix cnot{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
    return StinespringModel(2, 2, cnot, ComplexMatrix::unit(2, 0, 0), 2, 2, ComplexMatrix::identity(2));
}

StinespringModel swap_constant() {
    const ComplexMatrix swap{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
    return StinespringModel(2, 2, swap, ComplexMatrix::unit(2, 0, 0), 2, 2, ComplexMatrix::identity(2));
}

}  // namespace

TEST(kraus_set, validates_operator_shapes) {
    EXPECT_THROW(KrausSet(2, 3, {ComplexMatrix(2, 3)}), Error);
    EXPECT_NO_THROW(KrausSet(2, 3, {ComplexMatrix(3, 2)}));
}

TEST(apply_kraus, identity_channel) {
    Rng rng(1);
    const auto rho = random_density_matrix(2, rng);
    EXPECT_TRUE(matrices_near(apply_kraus(KrausSet(ComplexMatrix::identity(2)), rho), rho, 1e-15));
}

TEST(apply_kraus, fully_depolarizing_ground_state) {
    // X|0><0|X = Y|0><0|Y^dagger = |1><1|, Z|0><0|Z = |0><0|: (2|0><0| + 2|1><1|)/4 = I/2.
    EXPECT_TRUE(matrices_near(apply_kraus(fully_depolarizing, ComplexMatrix::unit(2, 0, 0)),
                              ComplexMatrix::identity(2) * 0.5, 1e-15));
}

TEST(apply_kraus, project_discard_decreases_trace) {
    const auto out = apply_kraus(KrausSet(ComplexMatrix::unit(2, 0, 0)), ComplexMatrix::identity(2) * 0.5);
    EXPECT_TRUE(matrices_near(out, ComplexMatrix::unit(2, 0, 0) * 0.5, 1e-15));
    EXPECT_DOUBLE_EQ(out.trace().real(), 0.5);
}

TEST(apply_kraus, shape_mismatch) {
    EXPECT_THROW(apply_kraus(fully_depolarizing, ComplexMatrix::identity(3)), Error);
}

TEST(apply_kraus, linear_positive_and_trace_nonincreasing) {
    Rng rng(21);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n1 = 2 + t % 2, n2 = 2 + (t / 2) % 2;
        const auto k = zoo_channel("random_cptp", {static_cast<double>(t), static_cast<double>(1 + t % 4)}, n1, n2);
        const auto h1 = random_hermitian(n1, rng), h2 = random_hermitian(n1, rng);
        const double a = coeff(rng), b = coeff(rng);
        EXPECT_TRUE(matrices_near(apply_kraus(k, h1 * a + h2 * b), apply_kraus(k, h1) * a + apply_kraus(k, h2) * b,
                                  1e-10));
        const auto rho = random_density_matrix(n1, rng);
        const auto out = apply_kraus(k, rho);
        EXPECT_GE(hermitian_eig(out).min_eigenvalue(), -1e-12);
        EXPECT_LE(out.trace().real(), rho.trace().real() + 1e-9);
    }
}

TEST(kraus_to_choi, identity_channel) {
    const auto j = kraus_to_choi(KrausSet(ComplexMatrix::identity(2)));
    ComplexMatrix expected(4, 4);
    for (auto [r, c] : {std::pair{0, 0}, {0, 3}, {3, 0}, {3, 3}}) expected(r, c) = 1.0;
    EXPECT_EQ(j.matrix(), expected);
}

TEST(kraus_to_choi, depolarizing_closed_form) {
    for (double p : {0.0, 0.1, 0.3, 0.5, 1.0}) {
        const auto j = kraus_to_choi(zoo_channel("depolarizing", {p}, 2));
        EXPECT_TRUE(matrices_near(j.matrix(), depolarizing_choi_by_blocks(p), 1e-14)) << p;
        const auto eig = hermitian_eig(j.matrix());
        EXPECT_NEAR(eig.eigenvalues[0], 2.0 - 1.5 * p, 1e-12);
        for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(eig.eigenvalues[k], p / 2.0, 1e-12);
    }
}

TEST(kraus_to_choi, amplitude_damping_spectrum) {
    // vec(A0) = (1, 0, 0, 1/sqrt2), vec(A1) = (0, 0, 1/sqrt2, 0): orthogonal, squared norms 1.5 and 0.5.
    const auto eig = hermitian_eig(kraus_to_choi(amplitude_damping_half()).matrix());
    const std::vector<double> expected{1.5, 0.5, 0.0, 0.0};
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(eig.eigenvalues[k], expected[k], 1e-14);
}

TEST(kraus_to_choi, blocks_are_channel_images) {
    for (int seed = 0; seed < 10; ++seed) {
        const auto k = zoo_channel("random_cptp", {static_cast<double>(seed), 3}, 3, 2);
        const auto j = kraus_to_choi(k);
        const auto by_blocks = choi_from_map(3, 2, [&](const ComplexMatrix& m) { return apply_kraus(k, m); });
        EXPECT_TRUE(matrices_near(j.matrix(), by_blocks.matrix(), 1e-14));
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c)
                EXPECT_TRUE(matrices_near(j.block(r, c), apply_kraus(k, ComplexMatrix::unit(3, r, c)), 1e-14));
    }
}

TEST(choi_to_kraus, identity_choi_gives_identity_up_to_phase) {
    const auto k = choi_to_kraus(kraus_to_choi(KrausSet(ComplexMatrix::identity(2))));
    ASSERT_EQ(k.size(), 1u);
    EXPECT_TRUE(matrices_near(k[0], ComplexMatrix::identity(2), 1e-12));
}

TEST(choi_to_kraus, maximally_mixing_choi) {
    const ChoiMatrix j(2, 2, ComplexMatrix::identity(4));
    const auto k = choi_to_kraus(j);
    ASSERT_EQ(k.size(), 4u);
    for (const auto& a : k.operators()) EXPECT_NEAR(hilbert_schmidt(a, a).real(), 1.0, 1e-12);
    EXPECT_TRUE(matrices_near(kraus_to_choi(k).matrix(), j.matrix(), 1e-12));
}

TEST(choi_to_kraus, amplitude_damping_recovers_two_operators) {
    const auto truth = amplitude_damping_half();
    const auto j = kraus_to_choi(truth);
    const auto k = choi_to_kraus(j);
    ASSERT_EQ(k.size(), 2u);
    EXPECT_NEAR(hilbert_schmidt(k[0], k[0]).real(), 1.5, 1e-12);
    EXPECT_NEAR(hilbert_schmidt(k[1], k[1]).real(), 0.5, 1e-12);
    EXPECT_LT(frobenius_distance(kraus_to_choi(k).matrix(), j.matrix()), 1e-9);
    EXPECT_TRUE(kraus_equivalent(k, truth, 1e-9));
}

TEST(choi_to_kraus, rejects_non_cp_with_offending_eigenvalue) {
    const ChoiMatrix j(2, 2, ComplexMatrix::diagonal({1.0, 0.5, 0.5, -0.1}));
    try {
        choi_to_kraus(j);
        FAIL() << "expected an error";
    } catch (const NotCompletelyPositive& e) {
        EXPECT_NEAR(e.min_eigenvalue(), -0.1, 1e-14);
        EXPECT_NE(std::string(e.what()).find("not completely positive"), std::string::npos);
    }
    // Round-off negatives inside the admission band are clipped.
    EXPECT_EQ(choi_to_kraus(ChoiMatrix(2, 2, ComplexMatrix::diagonal({1.0, 0, 0, -1e-9}))).size(), 1u);
}

TEST(choi_to_kraus, round_trip_is_canonical) {
    Rng rng(77);
    for (int t = 0; t < 40; ++t) {
        const std::size_t n1 = 2 + t % 2, n2 = 2 + (t / 2) % 2;
        const double count = 1 + t % static_cast<int>(n1 * n2);
        const auto k = zoo_channel("random_cptp", {100.0 + t, count}, n1, n2);
        const auto j = kraus_to_choi(k);
        const auto extracted = choi_to_kraus(j);
        EXPECT_LE(extracted.size(), n1 * n2);
        EXPECT_LT(frobenius_distance(kraus_to_choi(extracted).matrix(), j.matrix()), 1e-8);
        const auto eig = hermitian_eig(j.matrix());
        for (std::size_t a = 0; a < extracted.size(); ++a)
            for (std::size_t b = 0; b < extracted.size(); ++b) {
                const cplx overlap = hilbert_schmidt(extracted[a], extracted[b]);
                EXPECT_NEAR(std::abs(overlap - (a == b ? eig.eigenvalues[a] : 0.0)), 0.0, 1e-8);
            }
        for (int s = 0; s < 5; ++s) {
            const auto rho = random_density_matrix(n1, rng);
            EXPECT_TRUE(matrices_near(apply_kraus(extracted, rho), apply_kraus(k, rho), 1e-8));
        }
    }
}

TEST(apply_stinespring, trivial_partition_is_identity) {
    const ComplexMatrix one{{1}};
    const StinespringModel s(2, 1, ComplexMatrix::identity(2), one, 2, 1, one);
    Rng rng(2);
    const auto rho = random_density_matrix(2, rng);
    EXPECT_TRUE(matrices_near(apply_stinespring(s, rho), rho, 1e-15));
}

TEST(apply_stinespring, cnot_dephases) {
    // CNOT (|a><b| (x) |0><0|) CNOT = |a><b| (x) |a><b| (ancilla copies the system label);
    // tracing the ancilla leaves |a><b| delta_ab.
    const ComplexMatrix rho{{0.7, cplx(0.1, 0.2)}, {cplx(0.1, -0.2), 0.3}};
    EXPECT_TRUE(matrices_near(apply_stinespring(cnot_dephasing(), rho), ComplexMatrix::diagonal({0.7, 0.3}), 1e-15));
}

TEST(apply_stinespring, swap_is_constant_channel) {
    // SWAP (M (x) |0><0|) SWAP = |0><0| (x) M; tracing the second factor leaves Tr(M)|0><0|.
    const ComplexMatrix rho{{0.4, cplx(0.3, -0.1)}, {cplx(0.3, 0.1), 0.6}};
    EXPECT_TRUE(matrices_near(apply_stinespring(swap_constant(), rho), ComplexMatrix::unit(2, 0, 0), 1e-15));
}

TEST(apply_stinespring, agrees_with_kraus_counterparts) {
    const auto dephasing = zoo_channel("phase_damping", {1.0}, 2);
    const auto constant = zoo_channel("amplitude_damping", {1.0}, 2);
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
        const auto rho = random_density_matrix(2, rng);
        EXPECT_TRUE(matrices_near(apply_stinespring(cnot_dephasing(), rho), apply_kraus(dephasing, rho), 1e-10));
        EXPECT_TRUE(matrices_near(apply_stinespring(swap_constant(), rho), apply_kraus(constant, rho), 1e-10));
    }
    EXPECT_TRUE(matrices_near(stinespring_to_choi(cnot_dephasing()).matrix(), kraus_to_choi(dephasing).matrix(), 1e-12));
}

TEST(apply_stinespring, post_selection_is_trace_decreasing) {
    const ComplexMatrix cnot{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
    const StinespringModel s(2, 2, cnot, ComplexMatrix::unit(2, 0, 0), 2, 2, ComplexMatrix::unit(2, 0, 0));
    const auto verdict = check_cp_tp(stinespring_to_choi(s));
    EXPECT_TRUE(verdict.is_cp);
    EXPECT_TRUE(verdict.is_trace_nonincreasing);
    EXPECT_FALSE(verdict.is_trace_preserving);
    EXPECT_TRUE(kraus_equivalent(choi_to_kraus(stinespring_to_choi(s)), KrausSet(ComplexMatrix::unit(2, 0, 0)), 1e-12));
}

TEST(stinespring_model, validates_components) {
    const ComplexMatrix not_unitary{{1, 1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    EXPECT_THROW(StinespringModel(2, 2, not_unitary, ComplexMatrix::unit(2, 0, 0), 2, 2, ComplexMatrix::identity(2)),
                 Error);
    EXPECT_THROW(StinespringModel(2, 2, ComplexMatrix::identity(4), ComplexMatrix::unit(2, 0, 0), 3, 2,
                                  ComplexMatrix::identity(2)),
                 Error);
    EXPECT_THROW(StinespringModel(2, 2, ComplexMatrix::identity(4), ComplexMatrix::identity(2), 2, 2,
                                  ComplexMatrix::identity(2)),
                 Error);
    EXPECT_THROW(StinespringModel(2, 2, ComplexMatrix::identity(4), ComplexMatrix::unit(2, 0, 0), 2, 2,
                                  ComplexMatrix{{1, 1}, {0, 0}}),
                 Error);
}

TEST(check_cp_tp, examples) {
    for (double gamma : {0.0, 0.25, 0.5, 1.0}) {
        const auto v = check_cp_tp(zoo_channel("amplitude_damping", {gamma}, 2));
        EXPECT_TRUE(v.is_cp);
        EXPECT_TRUE(v.is_trace_preserving);
        EXPECT_TRUE(v.is_trace_nonincreasing);
        EXPECT_LT(v.deviation_from_identity, 1e-12);
    }
    const auto pd = check_cp_tp(KrausSet(ComplexMatrix::unit(2, 0, 0)));
    EXPECT_FALSE(pd.is_trace_preserving);
    EXPECT_TRUE(pd.is_trace_nonincreasing);
    EXPECT_NEAR(pd.deviation_from_identity, 1.0, 1e-15);

    const auto grow = check_cp_tp(KrausSet(ComplexMatrix::identity(2) * std::sqrt(1.5)));
    EXPECT_FALSE(grow.is_trace_nonincreasing);
    EXPECT_FALSE(grow.is_trace_preserving);
}

TEST(check_cp_tp, choi_route_matches_kraus_route) {
    for (int seed = 0; seed < 10; ++seed) {
        const auto k = zoo_channel("random_cptp", {static_cast<double>(seed), 2}, 2, 3);
        const auto scaled = KrausSet(2, 3, {k[0] * 0.9, k[1] * 0.8});
        for (const auto& ch : {k, scaled}) {
            const auto a = check_cp_tp(ch);
            const auto b = check_cp_tp(kraus_to_choi(ch));
            EXPECT_EQ(a.is_trace_preserving, b.is_trace_preserving);
            EXPECT_EQ(a.is_trace_nonincreasing, b.is_trace_nonincreasing);
            EXPECT_NEAR(a.deviation_from_identity, b.deviation_from_identity, 1e-12);
        }
    }
    const auto bad = check_cp_tp(ChoiMatrix(2, 2, ComplexMatrix::diagonal({1.0, 0.5, 0.5, -0.1})));
    EXPECT_FALSE(bad.is_cp);
    EXPECT_NEAR(bad.min_choi_eigenvalue, -0.1, 1e-14);
}

TEST(kraus_equivalent, examples) {
    const auto phase = std::polar(1.0, 0.83);
    EXPECT_TRUE(kraus_equivalent(KrausSet(ComplexMatrix::identity(2)), KrausSet(ComplexMatrix::identity(2) * phase),
                                 1e-12));
    EXPECT_TRUE(kraus_equivalent(fully_depolarizing, choi_to_kraus(kraus_to_choi(fully_depolarizing)), 1e-12));
    const KrausSet dephasing(2, 2, {ComplexMatrix::unit(2, 0, 0), ComplexMatrix::unit(2, 1, 1)});
    EXPECT_FALSE(kraus_equivalent(KrausSet(ComplexMatrix::identity(2)), dephasing, 1e-6));
    EXPECT_THROW(kraus_equivalent(KrausSet(ComplexMatrix::identity(2)), KrausSet(ComplexMatrix::identity(3)), 1e-6),
                 Error);
}

TEST(kraus_equivalent, unitary_mixing_of_operators) {
    // B_k = sum_j u_kj A_j describes the same channel for any unitary u.
    Rng rng(31);
    const auto a = zoo_channel("random_cptp", {5, 3}, 2, 2);
    const auto u = random_unitary(3, rng);
    std::vector<ComplexMatrix> mixed;
    for (std::size_t k = 0; k < 3; ++k) {
        ComplexMatrix b(2, 2);
        for (std::size_t j = 0; j < 3; ++j) b += a[j] * u(k, j);
        mixed.push_back(b);
    }
    EXPECT_TRUE(kraus_equivalent(a, KrausSet(2, 2, mixed), 1e-12));
}

TEST(complete_positivity, extension_preserves_positivity) {
    Rng rng(55);
    for (int t = 0; t < 30; ++t) {
        const auto k = zoo_channel("random_cptp", {200.0 + t, 2}, 2, 2);
        const auto m = random_density_matrix(4, rng) * 3.0;
        ComplexMatrix out(4, 4);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) out.set_block(i, j, apply_kraus(k, m.block(i, j, 2, 2)));
        EXPECT_GE(hermitian_eig(out).min_eigenvalue(), -1e-8);
    }
}

TEST(choi_matrix, validates_shape_and_hermiticity) {
    EXPECT_THROW(ChoiMatrix(2, 2, ComplexMatrix::identity(3)), Error);
    EXPECT_THROW(ChoiMatrix(2, 1, ComplexMatrix{{0, 1}, {0, 0}}), Error);
}

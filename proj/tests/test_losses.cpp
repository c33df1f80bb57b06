#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "textclust/losses.hpp"

using namespace textclust;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
    std::vector<Vector> v;
    for (auto row : r) v.emplace_back(row);
    return Matrix::from_rows(v);
}

// Per-view loss of the joined view set, evaluated term by term.
double direct_contrastive(const Matrix& z1, const Matrix& z2, double tau) {
    const std::size_t n = z1.rows();
    std::vector<std::span<const double>> views;
    for (std::size_t i = 0; i < n; ++i) views.push_back(z1.row(i));
    for (std::size_t i = 0; i < n; ++i) views.push_back(z2.row(i));
    double total = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) {
        const std::size_t pos = i < n ? i + n : i - n;
        double denom = 0.0;
        for (std::size_t j = 0; j < 2 * n; ++j)
            if (j != i) denom += std::exp(cosine_sim(views[i], views[j]) / tau);
        total += -std::log(std::exp(cosine_sim(views[i], views[pos]) / tau) / denom);
    }
    return total / static_cast<double>(2 * n);
}

}  // namespace

TEST(Cosine, Basics) {
    const Vector v{0.3, -2.0, 5.0};
    EXPECT_NEAR(cosine_sim(v, v), 1.0, 1e-15);
    EXPECT_EQ(cosine_sim(Vector{1, 0}, Vector{0, 1}), 0.0);
    EXPECT_NEAR(cosine_sim(Vector{1, 0}, Vector{1, 1}), 1.0 / std::sqrt(2.0), 1e-15);
    try {
        cosine_sim(Vector{0, 0}, Vector{1, 0});
        FAIL();
    } catch (const std::invalid_argument& ex) {
        EXPECT_STREQ(ex.what(), "zero vector in cosine");
    }
}

TEST(Cosine, StaysInRange) {
    std::mt19937_64 gen(1);
    for (int t = 0; t < 200; ++t) {
        const auto m = oracle::random_matrix(gen, 2, 5);
        const double c = cosine_sim(m.row(0), m.row(1));
        EXPECT_GE(c, -1.0);
        EXPECT_LE(c, 1.0);
    }
    const Vector big{1e200, 1e200};
    EXPECT_LE(cosine_sim(big, big), 1.0);
}

TEST(Contrastive, SingleInstanceIsZero) {
    EXPECT_EQ(contrastive_loss(rows({{1, 2, 3}}), rows({{-1, 0.5, 2}}), 0.5).loss, 0.0);
}

TEST(Contrastive, TwoInstanceWorkedCase) {
    const Matrix z1 = rows({{1, 0}, {0, 1}}), z2 = rows({{1, 0}, {0, 1}});
    const double want = std::log((std::exp(1.0) + 2.0) / std::exp(1.0));
    EXPECT_NEAR(want, 0.55144, 1e-5);
    EXPECT_NEAR(contrastive_loss(z1, z2, 1.0).loss, want, 1e-12);
    EXPECT_NEAR(direct_contrastive(z1, z2, 1.0), want, 1e-12);
}

TEST(Contrastive, MatchesDirectEvaluation) {
    std::mt19937_64 gen(2);
    for (double tau : {0.1, 0.5, 1.0}) {
        const auto z1 = oracle::random_matrix(gen, 5, 4), z2 = oracle::random_matrix(gen, 5, 4);
        EXPECT_NEAR(contrastive_loss(z1, z2, tau).loss, direct_contrastive(z1, z2, tau), 1e-12);
    }
}

TEST(Contrastive, GradientMatchesCentralDifferences) {
    std::mt19937_64 gen(3);
    Matrix z1 = oracle::random_matrix(gen, 4, 8), z2 = oracle::random_matrix(gen, 4, 8);
    const auto res = contrastive_loss(z1, z2, 0.5);
    const auto n1 = oracle::central_difference([&] { return contrastive_loss(z1, z2, 0.5).loss; }, z1.flat());
    const auto n2 = oracle::central_difference([&] { return contrastive_loss(z1, z2, 0.5).loss; }, z2.flat());
    EXPECT_LT(oracle::max_relative_error(res.grad_z1.flat(), n1), 1e-4);
    EXPECT_LT(oracle::max_relative_error(res.grad_z2.flat(), n2), 1e-4);
}

TEST(Contrastive, ScaleInvariant) {
    std::mt19937_64 gen(4);
    Matrix z1 = oracle::random_matrix(gen, 6, 3), z2 = oracle::random_matrix(gen, 6, 3);
    const double base = contrastive_loss(z1, z2, 0.7).loss;
    for (double& v : z1.data()) v *= 42.0;
    for (double& v : z2.data()) v *= 42.0;
    EXPECT_NEAR(contrastive_loss(z1, z2, 0.7).loss, base, 1e-12);
}

TEST(Contrastive, RejectsBadTemperature) {
    const Matrix z = rows({{1, 0}});
    EXPECT_THROW(contrastive_loss(z, z, 0.0), std::invalid_argument);
    EXPECT_THROW(contrastive_loss(z, z, 1.5), std::invalid_argument);
    EXPECT_NO_THROW(contrastive_loss(z, z, 1.0));
}

TEST(SoftAssign, EquidistantIsUniform) {
    const auto q = soft_assign(rows({{0, 0}}), rows({{1, 0}, {-1, 0}}));
    EXPECT_NEAR(q.q(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(q.q(0, 1), 0.5, 1e-15);
}

TEST(SoftAssign, HandEvaluatedKernel) {
    // α = 1: distances 0 and 1 give kernels 1 and 0.5
    const auto q = soft_assign(rows({{0, 0}}), rows({{0, 0}, {1, 0}}), 1.0);
    EXPECT_NEAR(q.q(0, 0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(q.q(0, 1), 1.0 / 3.0, 1e-15);
}

TEST(SoftAssign, GeneralAlphaKernel) {
    const double alpha = 2.5;
    const auto q = soft_assign(rows({{0, 0}}), rows({{1, 0}, {0, 2}}), alpha);
    const double k1 = std::pow(1.0 + 1.0 / alpha, -(alpha + 1) / 2), k2 = std::pow(1.0 + 4.0 / alpha, -(alpha + 1) / 2);
    EXPECT_NEAR(q.q(0, 0), k1 / (k1 + k2), 1e-14);
}

TEST(SoftAssign, SwappingCentroidsSwapsColumns) {
    std::mt19937_64 gen(5);
    const auto e = oracle::random_matrix(gen, 6, 3), c = oracle::random_matrix(gen, 2, 3);
    Matrix swapped(2, 3);
    for (std::size_t j = 0; j < 3; ++j) {
        swapped(0, j) = c(1, j);
        swapped(1, j) = c(0, j);
    }
    const auto a = soft_assign(e, c), b = soft_assign(e, swapped);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_DOUBLE_EQ(a.q(i, 0), b.q(i, 1));
        EXPECT_DOUBLE_EQ(a.q(i, 1), b.q(i, 0));
    }
}

TEST(SoftAssign, Errors) {
    EXPECT_THROW(soft_assign(rows({{0, 0}}), rows({{1, 0}})), std::invalid_argument);
    EXPECT_THROW(soft_assign(rows({{0, 0}}), rows({{1, 0}, {0, 1}}), 0.0), std::invalid_argument);
    EXPECT_THROW(soft_assign(rows({{INFINITY, 0}}), rows({{1, 0}, {0, 1}})), std::invalid_argument);
}

TEST(Target, SingleSampleIsFixedPoint) {
    const auto q = soft_assign(rows({{0.2, 0.1}}), rows({{0, 0}, {1, 1}, {2, 0}}));
    const auto p = target_distribution(q);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(p.p(0, k), q.q(0, k), 1e-15);
}

TEST(Target, HandEvaluatedSquaredForm) {
    SoftAssignment q{rows({{0.9, 0.1}, {0.5, 0.5}}), 1.0};
    const auto p = target_distribution(q);
    EXPECT_NEAR(p.p(1, 0), 0.3, 1e-12);
    EXPECT_NEAR(p.p(1, 1), 0.7, 1e-12);
    EXPECT_NEAR(p.f[0], 1.4, 1e-15);
    EXPECT_NEAR(p.f[1], 0.6, 1e-15);
}

TEST(Target, UniformStaysUniform) {
    SoftAssignment q{rows({{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}}), 1.0};
    const auto p = target_distribution(q);
    for (double v : p.p.data()) EXPECT_NEAR(v, 0.25, 1e-15);
}

TEST(Target, EmptySoftCluster) {
    SoftAssignment q{rows({{1.0, 0.0}, {1.0, 0.0}}), 1.0};
    try {
        target_distribution(q);
        FAIL();
    } catch (const std::invalid_argument& ex) {
        EXPECT_STREQ(ex.what(), "empty soft cluster");
    }
}

TEST(Target, RowsAreDistributions) {
    std::mt19937_64 gen(6);
    for (int t = 0; t < 300; ++t) {
        const auto q = soft_assign(oracle::random_matrix(gen, 1 + t % 8, 4), oracle::random_matrix(gen, 2 + t % 3, 4));
        const auto p = target_distribution(q);
        for (std::size_t i = 0; i < p.p.rows(); ++i) {
            double sq = 0.0, sp = 0.0;
            for (std::size_t k = 0; k < p.p.cols(); ++k) {
                EXPECT_GT(q.q(i, k), 0.0);
                sq += q.q(i, k);
                sp += p.p(i, k);
            }
            EXPECT_NEAR(sq, 1.0, 1e-9);
            EXPECT_NEAR(sp, 1.0, 1e-9);
        }
    }
}

// With equal soft frequencies the target is q² renormalized, which never
// raises entropy.
TEST(Target, SharpensWhenFrequenciesAreBalanced) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int t = 0; t < 500; ++t) {
        // a row and its cyclic shifts give every column the same total
        const std::size_t k = 2 + t % 3;
        Vector base(k);
        double s = 0.0;
        for (double& v : base) s += (v = u(gen));
        for (double& v : base) v /= s;
        Matrix q(k, k);
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < k; ++c) q(r, c) = base[(r + c) % k];
        const auto p = target_distribution(SoftAssignment{q, 1.0});
        for (std::size_t r = 0; r < k; ++r) EXPECT_LE(entropy(p.p.row(r)), entropy(q.row(r)) + 1e-12);
    }
}

// Frequency normalization can flatten a row whose dominant cluster is
// heavily populated elsewhere.
TEST(Target, FrequencyWeightingCanRaiseEntropy) {
    SoftAssignment q{rows({{0.6, 0.4}, {0.9, 0.1}}), 1.0};
    const auto p = target_distribution(q);
    EXPECT_NEAR(p.p(0, 0), 3.0 / 7.0, 1e-12);
    EXPECT_GT(entropy(p.p.row(0)), entropy(q.q.row(0)));
}

TEST(Kl, IdentityIsZero) {
    const auto m = rows({{0.2, 0.8}, {0.5, 0.5}});
    EXPECT_EQ(kl_divergence(m, m), 0.0);
}

TEST(Kl, PointMassAgainstUniform) {
    EXPECT_NEAR(kl_divergence(rows({{1.0, 0.0}}), rows({{0.5, 0.5}})), std::log(2.0), 1e-12);
    EXPECT_NEAR(std::log(2.0), 0.69315, 1e-5);
}

TEST(Kl, NonNegativeAndZeroOnlyAtEquality) {
    std::mt19937_64 gen(8);
    for (int t = 0; t < 300; ++t) {
        const auto q = soft_assign(oracle::random_matrix(gen, 4, 3), oracle::random_matrix(gen, 3, 3));
        const auto p = target_distribution(q);
        const double kl = kl_divergence(p.p, q.q);
        EXPECT_GE(kl, 0.0);
        bool equal = true;
        for (std::size_t i = 0; i < p.p.size(); ++i) equal = equal && std::abs(p.p.data()[i] - q.q.data()[i]) <= 1e-9;
        if (!equal) EXPECT_GT(kl, 0.0);
    }
    EXPECT_THROW(kl_divergence(rows({{1, 0}}), rows({{1, 0, 0}})), std::invalid_argument);
}

TEST(Kl, ClusterLossGradientMatchesCentralDifferences) {
    std::mt19937_64 gen(9);
    for (double alpha : {1.0, 2.0}) {
        Matrix e = oracle::random_matrix(gen, 4, 5), c = oracle::random_matrix(gen, 3, 5);
        const auto q = soft_assign(e, c, alpha);
        const auto p = target_distribution(q);
        const auto res = kl_cluster_loss(p, q, e, c);
        EXPECT_NEAR(res.loss, kl_divergence(p.p, q.q), 1e-15);
        auto f = [&] { return kl_cluster_loss(p, soft_assign(e, c, alpha), e, c).loss; };
        EXPECT_LT(oracle::max_relative_error(res.grad_embeddings.flat(), oracle::central_difference(f, e.flat())), 1e-4);
        EXPECT_LT(oracle::max_relative_error(res.grad_centroids.flat(), oracle::central_difference(f, c.flat())), 1e-4);
    }
}

TEST(Total, ExactSum) {
    EXPECT_EQ(total_loss(0.0, 0.0).total, 0.0);
    const auto t = total_loss(0.5514, 0.6931, 0.5);
    EXPECT_EQ(t.total, 0.5514 + 0.6931);
    EXPECT_NEAR(t.total, 1.2445, 1e-12);
    EXPECT_GE(t.total, t.contrastive);
    EXPECT_GE(t.total, t.clustering);
    EXPECT_THROW(total_loss(NAN, 0.0), std::invalid_argument);
}

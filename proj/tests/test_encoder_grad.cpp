#include <gtest/gtest.h>

#include "encoder_objective.hpp"

using namespace textclust;

TEST(EncoderGradient, FullObjectiveMatchesCentralDifferences) {
    const auto res = fixture::check_encoder_gradient(fixture::smooth_seed(21));
    EXPECT_EQ(res.checked, EncoderParams::random(EncoderShape{}, 0).parameter_count());
    EXPECT_LT(res.worst, 1e-4) << "worst at " << res.worst_param;
}

TEST(EncoderGradient, SeveralSmoothDrawsAgree) {
    std::uint64_t seed = 100;
    for (int draw = 0; draw < 3; ++draw) {
        seed = fixture::smooth_seed(seed);
        const auto res = fixture::check_encoder_gradient(seed);
        EXPECT_LT(res.worst, 1e-4) << "seed " << seed << " worst at " << res.worst_param;
        ++seed;
    }
}

TEST(EncoderGradient, LayerNormBackwardMatchesCentralDifferences) {
    std::mt19937_64 gen(4);
    Matrix x = oracle::random_matrix(gen, 3, 7);
    const Matrix w = oracle::random_matrix(gen, 3, 7);
    auto f = [&] {
        const auto y = layer_norm(x);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += y.data()[i] * w.data()[i];
        return s;
    };
    std::vector<double> sigma;
    const auto y = layer_norm(x, &sigma);
    const auto analytic = layer_norm_backward(y, sigma, w);
    const auto numeric = oracle::central_difference(f, x.flat());
    EXPECT_LT(oracle::max_relative_error(analytic.flat(), numeric), 1e-6);
}

TEST(EncoderGradient, BackwardAccumulates) {
    fixture::EncoderObjective obj(3);
    EncoderCache cache;
    encoder_forward(obj.params, obj.x[0], &cache);
    const Vector g(16, 0.1);
    auto once = EncoderParams::zeros(obj.params.shape());
    auto twice = EncoderParams::zeros(obj.params.shape());
    encoder_backward(obj.params, cache, g, once);
    encoder_backward(obj.params, cache, g, twice);
    encoder_backward(obj.params, cache, g, twice);
    std::vector<Matrix*> a, b;
    once.for_each([&](const std::string&, Matrix& m) { a.push_back(&m); });
    twice.for_each([&](const std::string&, Matrix& m) { b.push_back(&m); });
    for (std::size_t t = 0; t < a.size(); ++t)
        for (std::size_t i = 0; i < a[t]->size(); ++i) EXPECT_NEAR(2.0 * a[t]->flat()[i], b[t]->flat()[i], 1e-14);
}

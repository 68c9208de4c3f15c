#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "eerm/ingest.hpp"
#include "eerm/moments.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace eerm;
using namespace eerm::moments;

TEST_CASE("estimate_moments") {
    SUBCASE("two identical points have no spread") {
        const Dataset d = testutil::make_xyu({{1.5, -2.0, 3.0}, {1.5, -2.0, 3.0}});
        const GaussianMoments m = estimate_moments(d);
        CHECK(m.var_x == 0.0);
        CHECK(m.var_y == 0.0);
        CHECK(m.var_u == 0.0);
        CHECK(m.cov_xy == 0.0);
    }
    SUBCASE("two-point symmetry under the 1/m convention") {
        const Dataset d = testutil::make_xyu({{0, 0, 0}, {2, 2, 2}});
        const GaussianMoments m = estimate_moments(d);
        CHECK(m.mu_x == doctest::Approx(1.0));
        CHECK(m.mu_y == doctest::Approx(1.0));
        CHECK(m.mu_u == doctest::Approx(1.0));
        CHECK(m.var_x == doctest::Approx(1.0));
        CHECK(m.var_y == doctest::Approx(1.0));
        CHECK(m.var_u == doctest::Approx(1.0));
        CHECK(m.cov_xy == doctest::Approx(1.0));
        CHECK(m.cov_xu == doctest::Approx(1.0));
        CHECK(m.cov_yu == doctest::Approx(1.0));
    }
    SUBCASE("fewer than two points is an error") {
        const Dataset d = testutil::make_xyu({{1, 1, 1}});
        CHECK_THROWS_AS(estimate_moments(d), std::invalid_argument);
    }
    SUBCASE("permutation invariance") {
        std::mt19937_64 rng(7);
        const Dataset d = testutil::random_dataset(rng, 40, 1);
        const GaussianMoments a = estimate_moments(d);
        std::vector<LabeledPoint> shuffled = d.points();
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const GaussianMoments b =
            estimate_moments(Dataset(std::move(shuffled), d.label_kind(), d.signal_kind()));
        CHECK(b.var_x == doctest::Approx(a.var_x).epsilon(1e-12));
        CHECK(b.cov_xy == doctest::Approx(a.cov_xy).epsilon(1e-12));
        CHECK(b.cov_yu == doctest::Approx(a.cov_yu).epsilon(1e-12));
    }
    SUBCASE("recovers the generator's moments at large m") {
        const GaussianMoments truth = testutil::fixture_moments();
        const Dataset d = ingest::synth_gaussian(truth, 100000, 20240517);
        const GaussianMoments est = estimate_moments(d);
        CHECK(est.var_x == doctest::Approx(truth.var_x).epsilon(0.05));
        CHECK(est.var_y == doctest::Approx(truth.var_y).epsilon(0.05));
        CHECK(est.var_u == doctest::Approx(truth.var_u).epsilon(0.05));
        CHECK(est.cov_xy == doctest::Approx(truth.cov_xy).epsilon(0.05));
        CHECK(est.cov_xu == doctest::Approx(truth.cov_xu).epsilon(0.05));
        CHECK(est.cov_yu == doctest::Approx(truth.cov_yu).epsilon(0.05));
    }
}

TEST_CASE("conditional variance of x given u") {
    SUBCASE("independent signal leaves var_x") {
        GaussianMoments m;
        m.var_x = 2.5;
        m.var_u = 1.0;
        const auto cv = conditional_variance_x_given_u(m);
        CHECK(cv.value == doctest::Approx(2.5));
        CHECK_FALSE(cv.signal_degenerate);
    }
    SUBCASE("fully determined x has zero conditional variance") {
        GaussianMoments m;
        m.var_x = m.var_u = m.cov_xu = 3.0;  // x = u
        CHECK(conditional_variance_x_given_u(m).value == doctest::Approx(0.0));
    }
    SUBCASE("fixture arithmetic backs out exactly 1") {
        const auto cv = conditional_variance_x_given_u(testutil::fixture_moments());
        CHECK(cv.value == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("degenerate signal is flagged and falls back to var_x") {
        GaussianMoments m;
        m.var_x = 4.0;
        m.var_u = 0.0;
        const auto cv = conditional_variance_x_given_u(m);
        CHECK(cv.signal_degenerate);
        CHECK(cv.value == doctest::Approx(4.0));
    }
    SUBCASE("never negative over random PSD moments") {
        std::mt19937_64 rng(99);
        for (int rep = 0; rep < 300; ++rep) {
            const GaussianMoments m = testutil::random_moments(rng);
            CHECK(conditional_variance_x_given_u(m).value >= 0.0);
        }
    }
}

TEST_CASE("conditional variance of the prediction") {
    const GaussianMoments fixture = testutil::fixture_moments();
    CHECK(conditional_variance_pred(fixture, 0.0) == 0.0);
    CHECK(conditional_variance_pred(fixture, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double w1 = fixture.cov_xy / fixture.var_x;  // 2.6507..., the plateau slope
    CHECK(conditional_variance_pred(fixture, w1) == doctest::Approx(7.0264433882).epsilon(1e-9));
}

TEST_CASE("entropy_gaussian") {
    CHECK(entropy_gaussian(1.0) == 0.0);
    CHECK(entropy_gaussian(std::exp(2.0)) == doctest::Approx(1.0).epsilon(1e-12));
    // Same value as the knee of the fixture curve.
    CHECK(entropy_gaussian(7.0264433882024555) ==
          doctest::Approx(0.9748403293138361).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(entropy_gaussian(0.0), doctest::Contains("degenerate"),
                         std::domain_error);
    CHECK_THROWS_AS(entropy_gaussian(-1.0), std::domain_error);
}

TEST_CASE("entropy_estimate_linear") {
    SUBCASE("perfect alignment: value 0, alpha 1") {
        // h(x) = x and u = x, so predictions equal signals.
        const Dataset d = testutil::make_xyu({{1, 0, 1}, {2, 0, 2}, {-1, 0, -1}});
        const auto [value, alpha] = entropy_estimate_linear(d, {{1.0, 0.0}, 0.0});
        CHECK(value == doctest::Approx(0.0));
        CHECK(alpha == doctest::Approx(1.0));
    }
    SUBCASE("all-zero signal: alpha 0 and mean squared prediction") {
        const Dataset d = testutil::make_xyu({{1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
        const auto [value, alpha] = entropy_estimate_linear(d, {{1.0, 0.0}, 0.0});
        CHECK(alpha == 0.0);
        CHECK(value == doctest::Approx((1.0 + 4.0 + 9.0) / 3.0));
    }
    SUBCASE("three-point closed form, checked against a grid search") {
        // Predictions (1,2,3) via slope 1 intercept 0; signals (1,1,2).
        const Dataset d = testutil::make_xyu({{1, 0, 1}, {2, 0, 1}, {3, 0, 2}});
        const LinearHypothesis h{{1.0, 0.0}, 0.0};
        const auto [value, alpha] = entropy_estimate_linear(d, h);
        CHECK(alpha == doctest::Approx(1.5));
        CHECK(value == doctest::Approx(1.0 / 6.0));
        const auto [grid_value, grid_alpha] = oracles::alignment_grid_search(d, h, -5, 5, 1e-4);
        CHECK(value == doctest::Approx(grid_value).epsilon(1e-6));
        CHECK(alpha == doctest::Approx(grid_alpha).epsilon(1e-3));
    }
    SUBCASE("grid-search equivalence on random instances") {
        std::mt19937_64 rng(31);
        for (int rep = 0; rep < 20; ++rep) {
            const Dataset d = testutil::random_dataset(rng, 9, 1);
            std::uniform_real_distribution<double> u(-1.5, 1.5);
            const LinearHypothesis h{{u(rng), u(rng)}, 0.0};
            const auto [value, alpha] = entropy_estimate_linear(d, h);
            const auto [grid_value, grid_alpha] =
                oracles::alignment_grid_search(d, h, -5, 5, 1e-3);
            CHECK(value <= grid_value + 1e-9);
            CHECK(value == doctest::Approx(grid_value).epsilon(1e-4));
        }
    }
    SUBCASE("quadratic homogeneity in the weights") {
        std::mt19937_64 rng(41);
        for (int rep = 0; rep < 30; ++rep) {
            const Dataset d = testutil::random_dataset(rng, 12, 2);
            std::uniform_real_distribution<double> u(-2.0, 2.0);
            LinearHypothesis h{{u(rng), u(rng), u(rng)}, 0.0};
            const double c = u(rng);
            LinearHypothesis hc = h;
            for (double& w : hc.weights) w *= c;
            const double base = entropy_estimate_linear(d, h).value;
            CHECK(entropy_estimate_linear(d, hc).value ==
                  doctest::Approx(c * c * base).epsilon(1e-9));
        }
    }
    SUBCASE("converges to w1^2 sigma^2_{x|u} on sampled data") {
        const GaussianMoments truth = testutil::fixture_moments();
        const double cond = conditional_variance_x_given_u(truth).value;
        const double w1 = 1.7;
        const Dataset d = ingest::synth_gaussian(truth, 100000, 7);
        const double est = entropy_estimate_linear(d, {{w1, 0.0}, 0.0}).value;
        CHECK(est == doctest::Approx(w1 * w1 * cond).epsilon(0.05));
    }
}

TEST_CASE("entropy_estimate_tree") {
    CHECK(entropy_estimate_tree(1) == 0.0);
    CHECK(entropy_estimate_tree(3) == 2.0);
    CHECK(entropy_estimate_tree(0) == 0.0);
    CHECK_THROWS_AS(entropy_estimate_tree(-1), std::invalid_argument);
}

TEST_CASE("GaussianMoments::validate rejects bad matrices") {
    GaussianMoments m;
    m.var_x = 1.0;
    m.var_y = 1.0;
    m.var_u = 1.0;
    m.cov_xy = 2.0;  // violates the (x,y) minor
    CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("(x,y)"), std::invalid_argument);
    m.cov_xy = 0.0;
    m.var_x = -0.5;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

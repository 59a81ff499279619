#include <doctest.h>

#include <cmath>
#include <vector>

#include "driftdiff/diagnostics.hpp"
#include "driftdiff/errors.hpp"
#include "driftdiff/rng.hpp"
#include "helpers.hpp"

using namespace driftdiff;
using namespace testing_helpers;

TEST_SUITE("diagnostics") {

TEST_CASE("sliding variance of a constant series is zero") {
    const ReturnSeries r = make_returns(std::vector<double>(500, 0.3));
    const StationarityCurve curve = sliding_variance(r, {2, 10, 100});
    for (double w : curve.w_values) CHECK(w == 0.0);
}

TEST_CASE("sliding variance of iid normals saturates at the population variance") {
    RandomStream rng(101);
    std::vector<double> values(100000);
    for (double& v : values) v = rng.normal();
    const ReturnSeries r = make_returns(std::move(values));
    const StationarityCurve curve = sliding_variance(r, {100, 1000});
    for (double w : curve.w_values) CHECK(w == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sliding variance of a linear trend grows without saturating") {
    // Every window of r_i = i has sample variance S(S+1)/12 exactly.
    std::vector<double> values(3000);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);
    const ReturnSeries r = make_returns(std::move(values));
    const StationarityCurve curve = sliding_variance(r, {10, 100, 1000});
    for (std::size_t k = 0; k < curve.window_sizes.size(); ++k) {
        const double s = curve.window_sizes[k];
        CHECK(curve.w_values[k] == doctest::Approx(s * (s + 1.0) / 12.0).epsilon(1e-9));
    }
}

TEST_CASE("sliding variance excludes masked points") {
    ReturnSeries r = make_returns({1.0, 1.0, 50.0, 1.0, 1.0, 1.0});
    r.clip_mask = {0, 0, 1, 0, 0, 0};
    const StationarityCurve curve = sliding_variance(r, {3});
    CHECK(curve.w_values[0] == 0.0);  // the outlier never enters any window
}

TEST_CASE("sliding variance argument errors") {
    const ReturnSeries r = make_returns({0.1, 0.2, 0.3});
    CHECK_THROWS_AS(sliding_variance(r, {1}), std::invalid_argument);
    CHECK_THROWS_AS(sliding_variance(r, {5}), std::invalid_argument);
}

TEST_CASE("transition matrix of a deterministic alternation is the anti-diagonal") {
    std::vector<double> values(1000);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = i % 2 == 0 ? -1.0 : 1.0;
    const ReturnSeries r = make_returns(std::move(values));
    const TransitionMatrix m = transition_matrix(r, 1, 2);
    CHECK(m.at(0, 1) == 1.0);
    CHECK(m.at(1, 0) == 1.0);
    CHECK(m.at(0, 0) == 0.0);
    CHECK(m.at(1, 1) == 0.0);
}

TEST_CASE("transition matrix of iid uniforms is flat") {
    RandomStream rng(7);
    std::vector<double> values(1000000);
    for (double& v : values) v = rng.uniform();
    const ReturnSeries r = make_returns(std::move(values));
    const TransitionMatrix m = transition_matrix(r, 1, 4);
    for (int a = 0; a < 4; ++a) {
        REQUIRE(m.defined(a));
        for (int b = 0; b < 4; ++b) {
            CHECK(m.at(a, b) == doctest::Approx(0.25).epsilon(0.04));
        }
    }
}

TEST_CASE("defined transition rows sum to one") {
    RandomStream rng(8);
    std::vector<double> values(5000);
    for (double& v : values) v = rng.normal();
    const ReturnSeries r = make_returns(std::move(values));
    const TransitionMatrix m = transition_matrix(r, 2, 25);
    for (int a = 0; a < m.n_bins; ++a) {
        double row = 0.0;
        for (int b = 0; b < m.n_bins; ++b) row += m.at(a, b);
        if (m.defined(a)) {
            CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
        } else {
            CHECK(row == 0.0);
        }
    }
}

TEST_CASE("an unvisited source bin is flagged undefined") {
    // Two clusters with a gap leave the middle bin empty.
    std::vector<double> values;
    RandomStream rng(9);
    for (int i = 0; i < 500; ++i) values.push_back(0.05 * rng.uniform());
    for (int i = 0; i < 500; ++i) values.push_back(1.0 + 0.05 * rng.uniform());
    const ReturnSeries r = make_returns(std::move(values));
    const TransitionMatrix m = transition_matrix(r, 1, 3);
    CHECK(m.defined(0));
    CHECK(!m.defined(1));
    CHECK(m.defined(2));
}

TEST_CASE("a first-order Markov chain satisfies Chapman-Kolmogorov") {
    const std::vector<double> chain =
        simulate_two_state_chain(1000000, 0.3, 0.35, -0.5, 0.5, 11);
    const ReturnSeries r = make_returns(chain);
    for (int lag : {1, 2, 3}) {
        CHECK(ck_deviation(r, lag, 2) < 0.05);
    }
}

TEST_CASE("Q decreases with sample size for a Markov chain") {
    // Q is sampling noise here, so average a few seeds and use an 8-state
    // alphabet (more matrix entries concentrate the statistic).
    double previous = 1e9;
    for (std::size_t n : {10000u, 100000u, 1000000u}) {
        double total = 0.0;
        for (std::uint64_t seed : {13u, 14u, 15u}) {
            const std::vector<double> chain = simulate_k_state_chain(n, 8, seed);
            total += ck_deviation(make_returns(chain), 1, 8);
        }
        CHECK(total < previous);
        previous = total;
    }
}

TEST_CASE("a deterministic period-3 cycle composes exactly") {
    std::vector<double> values(999);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i % 3);
    const ReturnSeries r = make_returns(std::move(values));
    CHECK(ck_deviation(r, 1, 3) == 0.0);
}

TEST_CASE("an MA(2) process violates Chapman-Kolmogorov against a matched AR(1)") {
    // Same marginal variance and lag-1 autocorrelation; only the MA(2)
    // carries lag-2 structure the composition cannot reproduce.
    const double b1 = 0.4, b2 = 0.8;
    const double var = 1.0 + b1 * b1 + b2 * b2;
    const double rho1 = b1 * (1.0 + b2) / var;
    const std::size_t n = 100000;
    const double q_ma = ck_deviation(make_returns(simulate_ma2(n, b1, b2, 17)), 1, 20);
    const double q_ar = ck_deviation(make_returns(simulate_ar1(n, rho1, var, 18)), 1, 20);
    CHECK(q_ma >= 2.0 * q_ar);
}

TEST_CASE("Q depends only on the binned joint counts") {
    // Two alphabets with identical discrete structure must give identical Q.
    const std::vector<double> chain = simulate_two_state_chain(50000, 0.2, 0.45, 0.0, 1.0, 23);
    std::vector<double> relabeled(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        relabeled[i] = chain[i] == 0.0 ? 10.0 : 30.0;
    }
    const double q1 = ck_deviation(make_returns(chain), 1, 2);
    const double q2 = ck_deviation(make_returns(relabeled), 1, 2);
    CHECK(q1 == q2);
}

TEST_CASE("ck_deviation requires enough data for the doubled lag") {
    const ReturnSeries r = make_returns({0.1, 0.2, 0.3, 0.4});
    CHECK_THROWS_AS(ck_deviation(r, 2, 2), EstimationError);
}

TEST_CASE("markov length fit is exact on a noiseless exponential") {
    const MarkovTestResult fit = fit_markov_length(
        {1, 2, 3}, {std::exp(-1.0), std::exp(-2.0), std::exp(-3.0)});
    REQUIRE(fit.fit_ok);
    CHECK(fit.amplitude == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.markov_length == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.fit_residual == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("markov length fit recovers random amplitudes and scales exactly") {
    RandomStream rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const double amplitude = 0.05 + 5.0 * rng.uniform();
        const double t_m = 0.1 + 4.0 * rng.uniform();
        std::vector<int> lags;
        std::vector<double> q;
        for (int lag = 1; lag <= 8; ++lag) {
            lags.push_back(lag);
            q.push_back(amplitude * std::exp(-lag / t_m));
        }
        const MarkovTestResult fit = fit_markov_length(lags, q);
        REQUIRE(fit.fit_ok);
        CHECK(fit.amplitude == doctest::Approx(amplitude).epsilon(1e-9));
        CHECK(fit.markov_length == doctest::Approx(t_m).epsilon(1e-9));
    }
}

TEST_CASE("markov length fit reports failure on flat or growing Q") {
    const MarkovTestResult flat = fit_markov_length({1, 2, 3}, {0.5, 0.5, 0.5});
    CHECK(!flat.fit_ok);
    CHECK(std::isnan(flat.markov_length));
    const MarkovTestResult growing = fit_markov_length({1, 2, 3}, {0.1, 0.2, 0.4});
    CHECK(!growing.fit_ok);
}

TEST_CASE("markov length fit drops non-positive values and may run out of points") {
    const MarkovTestResult fit =
        fit_markov_length({1, 2, 3, 4}, {0.8, 0.0, 0.2, 0.1});  // zero is excluded
    CHECK(fit.fit_ok);
    CHECK_THROWS_AS(fit_markov_length({1, 2, 3}, {0.5, 0.0, 0.0}), std::invalid_argument);
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>

#include "mcc/estimators.hpp"
#include "mcc/experiments.hpp"
#include "mcc/model.hpp"
#include "mcc/rng.hpp"
#include "oracles.hpp"

using namespace mcc;

namespace {

ScalarEIVDataset observed(std::vector<double> x_obs, std::vector<double> d) {
    ScalarEIVDataset ds;
    ds.n = x_obs.size();
    ds.x_obs = std::move(x_obs);
    ds.d = std::move(d);
    return ds;
}

ScalarEIVDataset example1_dataset(std::uint64_t seed, double mu_u = 10.0, double mu_v = 10.0,
                                  std::size_t n = 1000) {
    return generate_scalar_dataset(3.0, InputSampler::two_interval(), {0.15, mu_u, 0.001},
                                   {0.15, mu_v, 0.001}, n, seed);
}

double sum_sq(const ScalarEIVDataset& ds, double w) {
    double s = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) {
        const double e = ds.d[i] - w * ds.x_obs[i];
        s += e * e;
    }
    return s;
}

double sum_abs(const ScalarEIVDataset& ds, double w) {
    double s = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) s += std::abs(ds.d[i] - w * ds.x_obs[i]);
    return s;
}

double tls_cost(const ScalarEIVDataset& ds, double w) { return sum_sq(ds, w) / (1.0 + w * w); }

/// Example-1 style kernel width: Corollary-1 rule at the realized clean count.
double rule_sigma(const ScalarEIVDataset& ds) {
    const CleanSet clean = clean_index_set(ds, 0.07, 0.07);
    const double combined = 0.07 + 3.0 * 0.07;
    const double ratio = double(clean.m) / double(ds.n - clean.m);
    return 1.2 * combined / std::sqrt(2.0 * std::log(ratio));
}

}  // namespace

// --- MSE -----------------------------------------------------------------------

TEST_CASE("mse closed form on tiny instances") {
    CHECK(mse_estimate(observed({1, 2}, {3, 6})).w() == 3.0);
    const auto ds = observed({1, 1, 1, 1}, {1, 1, 1, 9});
    const EstimateResult fit = mse_estimate(ds);
    CHECK(fit.w() == 3.0);
    const double w_oracle =
        oracle::zoomed_argmin([&](double w) { return sum_sq(ds, w); }, 0.0, 10.0, 20001);
    CHECK(std::abs(fit.w() - w_oracle) < 1e-6);
    CHECK(fit.residuals.size() == 4);
    CHECK(fit.residuals[0] == -2.0);
}

TEST_CASE("mse rejects all-zero inputs") {
    CHECK_THROWS_AS(mse_estimate(observed({0, 0}, {1, 2})), std::invalid_argument);
}

TEST_CASE("mse closed form equals dense search on random instances") {
    for (int trial = 0; trial < 20; ++trial) {
        const auto ds = example1_dataset(derive_seed(100, "mse", trial), 5.0, 5.0, 80);
        const double w_fit = mse_estimate(ds).w();
        const double w_oracle =
            oracle::zoomed_argmin([&](double w) { return sum_sq(ds, w); }, -10, 10, 4001);
        CHECK(std::abs(w_fit - w_oracle) < 2e-5);
    }
}

TEST_CASE("vector mse rejects a singular Gram matrix") {
    VectorEIVDataset ds;
    ds.n = 10;
    ds.p = 2;
    ds.x_obs_rows.resize(10, 2);
    ds.d.resize(10);
    for (int i = 0; i < 10; ++i) {
        ds.x_obs_rows(i, 0) = double(i);
        ds.x_obs_rows(i, 1) = 2.0 * i;  // linearly dependent column
        ds.d(i) = 3.0 * i;
    }
    CHECK_THROWS_AS(mse_estimate(ds), std::invalid_argument);
}

// --- LAD -----------------------------------------------------------------------

TEST_CASE("lad weighted median on tiny instances") {
    const auto ds = observed({1, 1, 1, 1}, {1, 1, 1, 9});
    const EstimateResult fit = lad_estimate(ds);
    CHECK(fit.w() == 1.0);
    const double w_oracle =
        oracle::zoomed_argmin([&](double w) { return sum_abs(ds, w); }, 0.0, 10.0, 20001);
    CHECK(std::abs(fit.w() - w_oracle) < 1e-6);

    CHECK(lad_estimate(observed({1, 2, -1}, {3, 6, -3})).w() == 3.0);
}

TEST_CASE("lad tie rule returns the lower ratio") {
    // cumulative weight hits exactly half between the two ratios
    CHECK(lad_estimate(observed({1, 1}, {1, 2})).w() == 1.0);
    CHECK(lad_estimate(observed({1, 1, 1, 1}, {1, 2, 3, 4})).w() == 2.0);
}

TEST_CASE("lad drops zero-input samples and rejects all-zero inputs") {
    CHECK(lad_estimate(observed({0, 1, 1, 1}, {100, 3, 3, 3})).w() == 3.0);
    CHECK_THROWS_AS(lad_estimate(observed({0, 0}, {1, 2})), std::invalid_argument);
}

TEST_CASE("lad weighted median is globally optimal against random candidates") {
    auto rng = make_stream(4, "lad-cand");
    std::uniform_real_distribution<double> unit(-10.0, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ds = example1_dataset(derive_seed(200, "lad", trial), 8.0, 8.0, 60);
        const double best = sum_abs(ds, lad_estimate(ds).w());
        for (int k = 0; k < 1000; ++k)
            CHECK(best <= sum_abs(ds, unit(rng)) * (1.0 + 1e-12) + 1e-12);
    }
}

// --- TLS -----------------------------------------------------------------------

TEST_CASE("tls recovers a noise-free line exactly") {
    const auto fit = tls_estimate(observed({1, 2, -1.5}, {3, 6, -4.5}));
    CHECK(fit.w() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("tls matches the dense minimizer of the orthogonal cost") {
    const auto ds = observed({1, -1}, {3.1, -2.9});
    const double w_fit = tls_estimate(ds).w();
    const double w_oracle =
        oracle::zoomed_argmin([&](double w) { return tls_cost(ds, w); }, -10, 10, 40001);
    CHECK(std::abs(w_fit - w_oracle) < 2e-6);
    CHECK(w_fit == doctest::Approx(3.00300029976016).epsilon(1e-10));
}

TEST_CASE("tls rejects degenerate directions") {
    // isotropic moment matrix: no distinct smallest direction
    CHECK_THROWS_AS(tls_estimate(observed({1, 0, -1, 0}, {0, 1, 0, -1})), std::runtime_error);
    // all mass on the output axis: vertical fit, no finite slope
    CHECK_THROWS_AS(tls_estimate(observed({0, 0}, {1, -1})), std::runtime_error);
}

TEST_CASE("vector tls recovers a noise-free fir system") {
    const GaussianMixtureSpec off{0.0, 0.0, 0.0};
    Eigen::VectorXd w0(5);
    w0 << 0.3, -0.2, 0.5, 0.1, -0.4;
    const auto ds = generate_fir_dataset(w0, 200, 1.0, off, off, 33);
    const Eigen::VectorXd w_hat = tls_estimate(ds).w_vec();
    CHECK((w_hat - w0).lpNorm<Eigen::Infinity>() < 1e-8);
}

// --- MCC objective / gradient -----------------------------------------------------

TEST_CASE("mcc objective hits its landmarks") {
    const auto perfect = observed({1, 2, -1}, {3, 6, -3});
    CHECK(mcc_objective(perfect, 3.0, 0.5) == 1.0);

    const double sigma = 0.7;
    const auto single = observed({1}, {3});
    const double w_half = 3.0 + sigma * std::sqrt(2.0 * std::log(2.0));
    CHECK(mcc_objective(single, w_half, sigma) == doctest::Approx(0.5).epsilon(1e-12));

    CHECK(mcc_objective(single, 1e9, 0.5) < 1e-12);  // kernel decay
    CHECK_THROWS_AS(mcc_objective(single, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mcc_objective(single, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("mcc objective stays in (0, 1]") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto ds = example1_dataset(derive_seed(300, "obj", trial), 10.0, 10.0, 50);
        auto rng = make_stream(301, "objw", trial);
        std::uniform_real_distribution<double> unit(-8.0, 8.0);
        for (int k = 0; k < 50; ++k) {
            const double j = mcc_objective(ds, unit(rng), 0.3);
            CHECK(j > 0.0);
            CHECK(j <= 1.0);
        }
    }
}

TEST_CASE("mcc gradient vanishes at a perfect fit and on symmetric data") {
    CHECK(mcc_gradient(observed({1, 2}, {3, 6}), 3.0, 0.5) == 0.0);
    const double w = 1.7, delta = 0.3;
    CHECK(mcc_gradient(observed({1, 1}, {w + delta, w - delta}), w, 0.4) == 0.0);
}

TEST_CASE("mcc gradient matches central finite differences") {
    auto rng = make_stream(6, "grad");
    std::uniform_real_distribution<double> w_draw(-5.0, 5.0);
    std::uniform_real_distribution<double> sigma_draw(0.1, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const auto ds = example1_dataset(derive_seed(400, "grad", trial), 6.0, 6.0, 60);
        const double w = w_draw(rng);
        const double sigma = sigma_draw(rng);
        const double analytic = mcc_gradient(ds, w, sigma);
        const double numeric = oracle::central_difference(
            [&](double ww) { return mcc_objective(ds, ww, sigma); }, w, 1e-6);
        CHECK(std::abs(analytic - numeric) <= 1e-5 * std::max(std::abs(numeric), 1e-10));
    }
}

TEST_CASE("vector mcc gradient matches finite differences") {
    const auto ds = generate_fir_dataset(default_fir_taps(), 80, 1.0, {0.3, 5.0, 0.01},
                                         {0.3, 5.0, 0.01}, 44);
    auto rng = make_stream(45, "vgrad");
    std::uniform_real_distribution<double> draw(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd w(9);
        for (int k = 0; k < 9; ++k) w(k) = draw(rng);
        const double sigma = 0.5 + 0.5 * trial / 4.0;
        const Eigen::VectorXd analytic = mcc_gradient(ds, w, sigma);
        Eigen::VectorXd numeric(9);
        for (int k = 0; k < 9; ++k) {
            numeric(k) = oracle::central_difference(
                [&](double t) {
                    Eigen::VectorXd ww = w;
                    ww(k) = t;
                    return mcc_objective(ds, ww, sigma);
                },
                w(k), 1e-6);
        }
        CHECK((analytic - numeric).norm() <= 1e-5 * std::max(numeric.norm(), 1e-10));
    }
}

// --- fixed point ------------------------------------------------------------------

TEST_CASE("fixed point suppresses the outlier") {
    const auto ds = observed({1, 1, 1, 1}, {1, 1, 1, 9});
    MCCConfig config;
    config.sigma = 0.5;
    const EstimateResult fit = mcc_estimate_fixed_point(ds, config);
    CHECK(std::abs(fit.w() - 1.0) < 1e-3);
    CHECK(fit.converged);
    CHECK(fit.starts_tried == 3);

    MCCConfig grid_config = config;
    grid_config.search_lo = 0.0;
    grid_config.search_hi = 10.0;
    const EstimateResult grid = mcc_estimate_grid(ds, grid_config);
    CHECK(std::abs(fit.w() - grid.w()) < 1e-3);
}

TEST_CASE("fixed point lands on a noise-free fit immediately") {
    const auto ds = observed({1, 2, -1.5, 0.7}, {3, 6, -4.5, 2.1});
    MCCConfig config;
    config.sigma = 0.8;
    const EstimateResult fit = mcc_estimate_fixed_point(ds, config);
    CHECK(fit.w() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.converged);
    CHECK(fit.iterations <= 3);
    CHECK(fit.objective == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fixed point returns the best of its starts") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto ds = example1_dataset(derive_seed(500, "fp", trial), 10.0, 10.0, 300);
        MCCConfig config;
        config.sigma = rule_sigma(ds);
        const EstimateResult fit = mcc_estimate_fixed_point(ds, config);
        CHECK(fit.objective >= mcc_objective(ds, lad_estimate(ds).w(), config.sigma) - 1e-15);
        CHECK(fit.objective >= mcc_objective(ds, mse_estimate(ds).w(), config.sigma) - 1e-15);
    }
}

TEST_CASE("fixed point is stationary at convergence") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto ds = example1_dataset(derive_seed(600, "stat", trial), 12.0, 8.0, 200);
        MCCConfig config;
        config.sigma = rule_sigma(ds);
        const EstimateResult fit = mcc_estimate_fixed_point(ds, config);
        REQUIRE(fit.converged);
        CHECK(std::abs(mcc_gradient(ds, fit.w(), config.sigma)) <= 10.0 * config.tol);
    }
}

TEST_CASE("fixed point reports failure when every start underflows") {
    const auto ds = observed({1, 1}, {-1e9, 1e9});
    MCCConfig config;
    config.sigma = 1e-6;
    config.multistart = 1;  // only the coarse-grid start, far from both ratios
    config.search_lo = -10.0;
    config.search_hi = 10.0;
    CHECK_THROWS_AS(mcc_estimate_fixed_point(ds, config), std::runtime_error);
}

TEST_CASE("grid oracle never loses to the fixed point") {
    for (int trial = 0; trial < 20; ++trial) {
        const auto ds = example1_dataset(derive_seed(700, "dom", trial), 10.0, 10.0, 300);
        MCCConfig config;
        config.sigma = rule_sigma(ds);
        const double j_fp = mcc_estimate_fixed_point(ds, config).objective;
        const double j_grid = mcc_estimate_grid(ds, config).objective;
        CHECK(j_grid >= j_fp - 1e-9);
    }
}

// --- grid -------------------------------------------------------------------------

TEST_CASE("grid solver finds the clean optimum") {
    const auto ds = observed({1, 2, -1.5}, {3, 6, -4.5});
    MCCConfig config;
    config.sigma = 0.5;
    config.search_lo = -10.0;
    config.search_hi = 10.0;
    const EstimateResult fit = mcc_estimate_grid(ds, config);
    CHECK(std::abs(fit.w() - 3.0) < 1e-6);
    CHECK(fit.diagnostic.empty());
}

TEST_CASE("grid solver objective on the four-point outlier instance") {
    const auto ds = observed({1, 1, 1, 1}, {1, 1, 1, 9});
    MCCConfig config;
    config.sigma = 0.5;
    config.search_lo = 0.0;
    config.search_hi = 10.0;
    const EstimateResult fit = mcc_estimate_grid(ds, config);
    CHECK(std::abs(fit.w() - 1.0) < 1e-6);
    CHECK(fit.objective == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("grid solver flags a maximum at the window endpoint") {
    const auto ds = observed({1, 2, -1.5}, {3, 6, -4.5});
    MCCConfig config;
    config.sigma = 0.5;
    config.search_lo = -10.0;
    config.search_hi = 2.0;  // optimum sits at w = 3, outside
    const EstimateResult fit = mcc_estimate_grid(ds, config);
    CHECK(!fit.diagnostic.empty());
    CHECK(fit.w() == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("grid and multistart fixed point agree on Example-1 data") {
    for (int trial = 0; trial < 20; ++trial) {
        const auto ds = example1_dataset(derive_seed(800, "agree", trial));
        MCCConfig config;
        config.sigma = rule_sigma(ds);
        const double w_grid = mcc_estimate_grid(ds, config).w();
        const double w_fp = mcc_estimate_fixed_point(ds, config).w();
        CHECK(std::abs(w_grid - w_fp) < 1e-3);
    }
}

TEST_CASE("grid solver validates its configuration") {
    const auto ds = observed({1, 2}, {3, 6});
    MCCConfig config;
    config.sigma = 0.5;
    config.grid_points = 2;
    CHECK_THROWS_AS(mcc_estimate_grid(ds, config), std::invalid_argument);
    config.grid_points = 100;
    config.search_lo = 2.0;
    config.search_hi = -2.0;
    CHECK_THROWS_AS(mcc_estimate_grid(ds, config), std::invalid_argument);
}

// --- EDA --------------------------------------------------------------------------

TEST_CASE("eda matches the grid oracle on Example-1 data") {
    for (int trial = 0; trial < 2; ++trial) {
        const auto ds = example1_dataset(derive_seed(900, "eda", trial));
        MCCConfig config;
        config.sigma = rule_sigma(ds);
        config.seed = derive_seed(901, "eda-seed", trial);
        const double w_grid = mcc_estimate_grid(ds, config).w();
        const double w_eda = mcc_estimate_eda(ds, config).w();
        CHECK(std::abs(w_grid - w_eda) < 1e-2);
    }
}

TEST_CASE("eda recovers a noise-free fir system inside a +-2 box") {
    const GaussianMixtureSpec off{0.0, 0.0, 0.0};
    const auto ds = generate_fir_dataset(default_fir_taps(), 150, 1.0, off, off, 55);
    MCCConfig config;
    config.sigma = 1.0;
    config.search_lo = -2.0;
    config.search_hi = 2.0;
    config.seed = 99;
    const EstimateResult fit = mcc_estimate_eda(ds, config);
    CHECK((fit.w_vec() - default_fir_taps()).squaredNorm() < 1e-4);
}

TEST_CASE("eda is deterministic under a fixed seed") {
    const auto ds = example1_dataset(derive_seed(902, "eda-det", 0), 10.0, 10.0, 120);
    MCCConfig config;
    config.sigma = 0.3;
    config.seed = 1234;
    const double w1 = mcc_estimate_eda(ds, config).w();
    const double w2 = mcc_estimate_eda(ds, config).w();
    CHECK(w1 == w2);
    config.seed = 1235;
    config.eda_generations = 5;  // coarse run differs visibly across seeds
    const double w3 = mcc_estimate_eda(ds, config).w();
    config.seed = 1236;
    const double w4 = mcc_estimate_eda(ds, config).w();
    CHECK(w3 != w4);
}

TEST_CASE("eda enforces the population precondition") {
    const auto ds = observed({1, 2}, {3, 6});
    MCCConfig config;
    config.sigma = 0.5;
    config.eda_population = 60;
    config.eda_elites = 40;
    CHECK_THROWS_AS(mcc_estimate_eda(ds, config), std::invalid_argument);
}

// --- gradient ascent -----------------------------------------------------------------

TEST_CASE("gradient ascent climbs to the clean optimum") {
    const auto ds = observed({1, 2, -1.5, 0.7}, {3, 6, -4.5, 2.1});
    MCCConfig config;
    config.sigma = 0.8;
    config.max_iters = 2000;
    const EstimateResult fit = mcc_estimate_gradient(ds, config);
    CHECK(std::abs(fit.w() - 3.0) < 1e-5);
}

// --- large-sigma behavior ---------------------------------------------------------------

TEST_CASE("mcc approaches mse as the kernel width grows") {
    const auto ds = example1_dataset(derive_seed(903, "wide", 0));
    MCCConfig config;
    config.sigma = 1e3;
    const double w_grid = mcc_estimate_grid(ds, config).w();
    const double w_mse = mse_estimate(ds).w();
    CHECK(std::abs(w_grid - w_mse) <= 1e-3);
}

// --- serialization ------------------------------------------------------------------

TEST_CASE("estimate records carry the parameter components") {
    const EstimateResult scalar_fit = mse_estimate(observed({1, 2}, {3, 6}));
    const auto scalar_record = estimate_record("mse", scalar_fit);
    CHECK(scalar_record[0] == std::pair<std::string, std::string>{"estimator", "mse"});
    CHECK(scalar_record[1].first == "w_hat");
    CHECK(scalar_record[1].second == "3");

    const GaussianMixtureSpec off{0.0, 0.0, 0.0};
    Eigen::VectorXd w0(3);
    w0 << 1.0, -2.0, 0.5;
    const auto ds = generate_fir_dataset(w0, 50, 1.0, off, off, 3);
    const auto vec_record = estimate_record("mse", mse_estimate(ds));
    CHECK(vec_record[1].first == "w_hat_0");
    CHECK(vec_record[3].first == "w_hat_2");
}

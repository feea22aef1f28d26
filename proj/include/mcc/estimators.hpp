#ifndef MCC_ESTIMATORS_HPP
#define MCC_ESTIMATORS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcc/model.hpp"

namespace mcc {

enum class MCCSolver { fixed_point, grid, eda, gradient_ascent };

const char* to_string(MCCSolver solver);
MCCSolver solver_from_name(const std::string& name);

/// Configuration for the MCC solvers. The search interval defaults to
/// [-10 s, 10 s] with s = max(1, |w_MSE|) when unset.
struct MCCConfig {
    double sigma = 1.0;  // kernel width, > 0
    MCCSolver solver = MCCSolver::fixed_point;
    int max_iters = 500;
    double tol = 1e-8;  // parameter-change convergence threshold
    std::optional<double> search_lo, search_hi;
    int grid_points = 2001;
    int multistart = 3;
    int eda_population = 200;
    int eda_elites = 50;
    int eda_generations = 100;
    double eda_variance_floor = 1e-12;
    double step_size = 0.5;      // gradient-ascent only; scaled internally
    std::uint64_t seed = 0;      // EDA sampling stream

    void validate() const;
};

/// Fit result shared by all estimators. w_hat holds a single component for
/// scalar fits. `objective` is the criterion value at w_hat (mean squared
/// error, mean absolute error, TLS ratio, or correntropy respectively).
struct EstimateResult {
    std::vector<double> w_hat;
    double objective = 0.0;
    std::vector<double> residuals;  // e_i = d_i - w_hat . x_obs_i
    int iterations = 0;
    bool converged = true;
    int starts_tried = 1;
    std::string diagnostic;

    double w() const;  // scalar accessor, throws unless w_hat has 1 entry
    Eigen::VectorXd w_vec() const;
};

// --- baselines --------------------------------------------------------------

/// Least squares: w = sum(x~ d) / sum(x~^2); rejects all-zero inputs.
EstimateResult mse_estimate(const ScalarEIVDataset& dataset);
/// Normal-equations least squares; rejects a singular Gram matrix.
EstimateResult mse_estimate(const VectorEIVDataset& dataset);

/// Exact least-absolute-deviation fit via the weighted median of d_i/x~_i
/// with weights |x~_i|; samples with x~_i = 0 contribute constants and are
/// dropped from the median.
EstimateResult lad_estimate(const ScalarEIVDataset& dataset);
/// IRLS on the smoothed absolute value (floor 1e-8 on |e| in the weights).
EstimateResult lad_estimate(const VectorEIVDataset& dataset);

/// Total least squares, minimizing sum (d - w x~)^2 / (1 + w^2) through the
/// eigenvector of the smallest eigenvalue of the 2x2 moment matrix.
EstimateResult tls_estimate(const ScalarEIVDataset& dataset);
/// SVD-based TLS on the augmented matrix [X~ | d].
EstimateResult tls_estimate(const VectorEIVDataset& dataset);

// --- correntropy ------------------------------------------------------------

/// Empirical correntropy (1/N) sum exp(-(d_i - w x~_i)^2 / (2 sigma^2)),
/// always in (0, 1].
double mcc_objective(const ScalarEIVDataset& dataset, double w, double sigma);
double mcc_objective(const VectorEIVDataset& dataset, const Eigen::VectorXd& w, double sigma);

/// d/dw of the empirical correntropy:
///   (1/(N sigma^2)) sum exp(-e_i^2/(2 sigma^2)) e_i x~_i.
double mcc_gradient(const ScalarEIVDataset& dataset, double w, double sigma);
Eigen::VectorXd mcc_gradient(const VectorEIVDataset& dataset, const Eigen::VectorXd& w,
                             double sigma);

/// Half-quadratic fixed point w <- sum(g x~ d)/sum(g x~^2) with
/// g = exp(-e^2/(2 sigma^2)), run from several starts (LAD, MSE and the best
/// coarse-grid points); returns the iterate with the highest correntropy.
EstimateResult mcc_estimate_fixed_point(const ScalarEIVDataset& dataset, const MCCConfig& config);
/// Vector analogue via weighted normal equations; starts are {MSE, LAD, 0}.
EstimateResult mcc_estimate_fixed_point(const VectorEIVDataset& dataset, const MCCConfig& config);

/// Global-optimum oracle for the scalar parameter: dense evaluation over the
/// search interval followed by golden-section refinement in the best bracket.
/// A maximum at the interval endpoint is flagged in the diagnostic.
EstimateResult mcc_estimate_grid(const ScalarEIVDataset& dataset, const MCCConfig& config);

/// Univariate-Gaussian estimation-of-distribution solver; deterministic for
/// a fixed config.seed.
EstimateResult mcc_estimate_eda(const ScalarEIVDataset& dataset, const MCCConfig& config);
EstimateResult mcc_estimate_eda(const VectorEIVDataset& dataset, const MCCConfig& config);

/// Plain gradient ascent with backtracking; mostly a reference solver.
EstimateResult mcc_estimate_gradient(const ScalarEIVDataset& dataset, const MCCConfig& config);

/// Default search interval [-10 s, 10 s], s = max(1, |w_MSE|); falls back to
/// s = 1 when the MSE fit is rejected.
std::pair<double, double> default_search_window(const ScalarEIVDataset& dataset);
std::pair<double, double> default_search_window(const VectorEIVDataset& dataset);

/// Flat key-value serialization (estimator name, w_hat components,
/// objective, iterations, converged).
std::vector<std::pair<std::string, std::string>> estimate_record(const std::string& estimator,
                                                                 const EstimateResult& result);

}  // namespace mcc

#endif

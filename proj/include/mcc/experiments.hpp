#ifndef MCC_EXPERIMENTS_HPP
#define MCC_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mcc/bounds.hpp"
#include "mcc/estimators.hpp"
#include "mcc/model.hpp"

namespace mcc {

enum class SweepParameter { mu_u, mu_v, alpha, sigma_kernel };
enum class Scenario { scalar, fir };
enum class EstimatorKind { mse, lad, tls, mcc };

const char* to_string(SweepParameter parameter);
const char* to_string(Scenario scenario);
const char* to_string(EstimatorKind estimator);
SweepParameter sweep_parameter_from_name(const std::string& name);
Scenario scenario_from_name(const std::string& name);
EstimatorKind estimator_from_name(const std::string& name);

/// The paper-style 9-tap triangle [0.1 0.2 0.3 0.4 0.5 0.4 0.3 0.2 0.1].
Eigen::VectorXd default_fir_taps();

/// Fixed part of a sweep: everything but the swept parameter.
struct ExperimentConfig {
    Scenario scenario = Scenario::scalar;
    double w0 = 3.0;
    Eigen::VectorXd w0_fir;  // used when scenario == fir
    std::size_t n = 1000;
    int runs = 100;
    double alpha = 0.15, beta = 0.15;
    double mu_u = 10.0, mu_v = 10.0;
    double var_u = 0.001, var_v = 0.001;
    double eps_u = 0.07, eps_v = 0.07;
    double lambda = 1.2;
    /// Explicit kernel width. When unset, scalar MCC uses the Corollary-1
    /// rule with `lambda` and the replicate's realized clean-set size, and
    /// FIR MCC uses `sigma_fir`.
    std::optional<double> sigma_override;
    double sigma_fir = 1.0;
    double input_variance = 1.0;  // fir true-input variance
    InputSampler input = InputSampler::two_interval();
    std::vector<EstimatorKind> estimators = {EstimatorKind::mse, EstimatorKind::lad,
                                             EstimatorKind::tls, EstimatorKind::mcc};
    std::uint64_t master_seed = 0;
    unsigned threads = 1;  // 0 = hardware concurrency
    int grid_points = 2001;
};

struct SweepSpec {
    std::string name;  // preset name, empty for ad-hoc sweeps
    SweepParameter parameter = SweepParameter::mu_u;
    std::vector<double> values;
    ExperimentConfig fixed;

    void validate() const;
};

/// Per-estimator statistics at one sweep point. For the scalar scenario the
/// statistic is w_hat; for FIR it is the squared weight error ||w - w0||^2.
/// Deviations use the sample (n-1) convention; a constant sequence has 0.
struct EstimatorCell {
    double mean = 0.0;
    double stddev = 0.0;
    int runs_ok = 0;
};

struct SweepPoint {
    double value = 0.0;
    std::vector<EstimatorCell> cells;  // parallel to spec.fixed.estimators
    std::optional<double> xi;          // mean over admissible replicates
    bool xi_admissible = false;        // every replicate admissible
    double mean_m = 0.0;
    std::optional<double> mean_c;
};

struct SweepSummary {
    SweepSpec spec;
    std::vector<SweepPoint> points;
};

SweepSummary run_scalar_sweep(const SweepSpec& spec);
SweepSummary run_alpha_sweep(const SweepSpec& spec);
SweepSummary run_sigma_sweep(const SweepSpec& spec);
SweepSummary run_fir_sweep(const SweepSpec& spec);
/// Dispatches on scenario / swept parameter.
SweepSummary run_sweep(const SweepSpec& spec);

/// Property check of the error bound: random admissible scalar
/// configurations, grid-oracle global maximizer, |w_grid - w0| <= xi, and
/// objective dominance J(w) < J(w0) for sampled w outside the xi-ball.
/// Violations are the reported result, not errors.
struct VerifyReport {
    int trials = 0;
    int bound_violations = 0;
    int dominance_violations = 0;
    int dominance_samples_per_trial = 100;
    int corollary2_trials = 0;
    std::vector<double> margins;  // |w_grid - w0| / xi per trial
    double margin_min = 0.0, margin_median = 0.0, margin_mean = 0.0, margin_p90 = 0.0,
           margin_max = 0.0;

    int total_violations() const { return bound_violations + dominance_violations; }
    std::string to_text() const;
};

VerifyReport verify_bound_property(int trials, std::uint64_t seed);

// --- summary CSV + manifest ---------------------------------------------------

/// Header: sweep_param,sweep_value,estimator,mean,std,runs_ok,xi,
/// xi_admissible,mean_m,mean_c,w0 — one row per (sweep value, estimator);
/// absent values (xi at inadmissible points, w0 in the FIR scenario) are
/// empty fields.
std::string summary_to_csv(const SweepSummary& summary);
void write_summary_csv(const SweepSummary& summary, const std::string& path);

std::string sweep_manifest_json(const SweepSpec& spec);
void write_manifest(const SweepSpec& spec, const std::string& path);

/// Named presets: table1, table2, fig4-alpha, fig5-sigma, fig6-fir, fig7-fir.
SweepSpec preset_sweep(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace mcc

#endif

#include "mcc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mcc/format.hpp"
#include "mcc/rng.hpp"

namespace mcc {

namespace {

/// Runs fn(0..count-1), each index exactly once, on up to `threads` workers.
/// Work items own disjoint output slots, so scheduling cannot change results.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& worker : workers) worker.join();
}

double sample_stddev(const std::vector<double>& values, double mean) {
    if (values.size() <= 1) return 0.0;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

const char* to_string(SweepParameter parameter) {
    switch (parameter) {
        case SweepParameter::mu_u: return "mu_u";
        case SweepParameter::mu_v: return "mu_v";
        case SweepParameter::alpha: return "alpha";
        case SweepParameter::sigma_kernel: return "sigma_kernel";
    }
    return "unknown";
}

const char* to_string(Scenario scenario) {
    return scenario == Scenario::scalar ? "scalar" : "fir";
}

const char* to_string(EstimatorKind estimator) {
    switch (estimator) {
        case EstimatorKind::mse: return "mse";
        case EstimatorKind::lad: return "lad";
        case EstimatorKind::tls: return "tls";
        case EstimatorKind::mcc: return "mcc";
    }
    return "unknown";
}

SweepParameter sweep_parameter_from_name(const std::string& name) {
    if (name == "mu_u") return SweepParameter::mu_u;
    if (name == "mu_v") return SweepParameter::mu_v;
    if (name == "alpha") return SweepParameter::alpha;
    if (name == "sigma_kernel" || name == "sigma") return SweepParameter::sigma_kernel;
    throw std::invalid_argument("unknown sweep parameter '" + name + "'");
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "scalar") return Scenario::scalar;
    if (name == "fir") return Scenario::fir;
    throw std::invalid_argument("unknown scenario '" + name + "'");
}

EstimatorKind estimator_from_name(const std::string& name) {
    if (name == "mse") return EstimatorKind::mse;
    if (name == "lad") return EstimatorKind::lad;
    if (name == "tls") return EstimatorKind::tls;
    if (name == "mcc") return EstimatorKind::mcc;
    throw std::invalid_argument("unknown estimator '" + name + "'");
}

Eigen::VectorXd default_fir_taps() {
    Eigen::VectorXd taps(9);
    taps << 0.1, 0.2, 0.3, 0.4, 0.5, 0.4, 0.3, 0.2, 0.1;
    return taps;
}

void SweepSpec::validate() const {
    if (values.empty()) throw std::invalid_argument("SweepSpec: values must be nonempty");
    if (!std::is_sorted(values.begin(), values.end()))
        throw std::invalid_argument("SweepSpec: values must be sorted");
    if (fixed.runs < 1) throw std::invalid_argument("SweepSpec: runs must be >= 1");
    if (fixed.n < 1) throw std::invalid_argument("SweepSpec: n must be >= 1");
    if (fixed.estimators.empty())
        throw std::invalid_argument("SweepSpec: estimator set must be nonempty");
    if (fixed.scenario == Scenario::fir && fixed.w0_fir.size() == 0)
        throw std::invalid_argument("SweepSpec: fir scenario needs w0_fir taps");
}

namespace {

ExperimentConfig apply_sweep_value(const SweepSpec& spec, double value) {
    ExperimentConfig cfg = spec.fixed;
    switch (spec.parameter) {
        case SweepParameter::mu_u: cfg.mu_u = value; break;
        case SweepParameter::mu_v: cfg.mu_v = value; break;
        case SweepParameter::alpha:
            cfg.alpha = value;
            cfg.beta = value;  // the alpha study ties beta to alpha
            break;
        case SweepParameter::sigma_kernel: cfg.sigma_override = value; break;
    }
    return cfg;
}

/// Kernel width for a scalar replicate. Defaults to the Corollary-1 rule at
/// the replicate's realized clean-set size; m is clamped into (n/2, n-1] so
/// the rule stays defined through breakdown regions, where the bound itself
/// is reported inadmissible.
double resolve_scalar_sigma(const ExperimentConfig& cfg, std::size_t n, std::size_t m) {
    if (cfg.sigma_override) return *cfg.sigma_override;
    const double combined = cfg.eps_v + std::abs(cfg.w0) * cfg.eps_u;
    if (combined == 0.0) return 1.0;  // any sigma > 0 is admissible at zero deviation
    const std::size_t lo = n / 2 + std::max<std::size_t>(1, n / 100);
    const std::size_t hi = n > 1 ? n - 1 : 1;
    const std::size_t m_rule = std::min(std::max(m, std::min(lo, hi)), hi);
    const double ratio = static_cast<double>(m_rule) / static_cast<double>(n - m_rule);
    return cfg.lambda * combined / std::sqrt(2.0 * std::log(ratio));
}

struct ReplicateBound {
    std::optional<double> xi;
    bool admissible = false;
    std::size_t m = 0;
    std::optional<double> c;
};

/// Bound for one replicate. Uses m_eff = min(m, n-1): the theorem only
/// lower-bounds the clean contributions, so shrinking the clean set is
/// conservative, and it keeps the fully-clean degenerate case well-defined.
ReplicateBound replicate_bound(const ExperimentConfig& cfg, const CleanSet& clean, std::size_t n,
                               double w0_abs, double sigma_used) {
    ReplicateBound out;
    out.m = clean.m;
    out.c = clean.c;
    const std::size_t m_eff = std::min(clean.m, n > 1 ? n - 1 : clean.m);
    if (2 * m_eff <= n || !clean.c || !(*clean.c > 0.0)) return out;

    const double combined = cfg.eps_v + w0_abs * cfg.eps_u;
    BoundReport report;
    if (combined == 0.0) {
        report = xi_corollary2(n, m_eff, sigma_used, *clean.c);
    } else if (cfg.sigma_override) {
        BoundInputs inputs;
        inputs.n = n;
        inputs.m = m_eff;
        inputs.eps_u = cfg.eps_u;
        inputs.eps_v = cfg.eps_v;
        inputs.w0_abs = w0_abs;
        inputs.c = *clean.c;
        inputs.sigma = sigma_used;
        report = xi_theorem1(inputs);
    } else {
        report = xi_corollary1(n, m_eff, cfg.lambda, *clean.c, cfg.eps_u, cfg.eps_v, w0_abs);
    }
    out.admissible = report.admissible;
    out.xi = report.xi;
    return out;
}

struct ReplicateResult {
    std::vector<std::optional<double>> stats;  // per estimator
    ReplicateBound bound;
};

SweepPoint aggregate_point(double value, const std::vector<ReplicateResult>& replicates,
                           std::size_t n_estimators) {
    SweepPoint point;
    point.value = value;
    point.cells.resize(n_estimators);
    for (std::size_t j = 0; j < n_estimators; ++j) {
        std::vector<double> stats;
        stats.reserve(replicates.size());
        for (const auto& rep : replicates)
            if (rep.stats[j]) stats.push_back(*rep.stats[j]);
        EstimatorCell& cell = point.cells[j];
        cell.runs_ok = static_cast<int>(stats.size());
        if (!stats.empty()) {
            cell.mean = std::accumulate(stats.begin(), stats.end(), 0.0) /
                        static_cast<double>(stats.size());
            cell.stddev = sample_stddev(stats, cell.mean);
        }
    }

    double m_sum = 0.0, c_sum = 0.0, xi_sum = 0.0;
    std::size_t c_count = 0, xi_count = 0;
    bool all_admissible = !replicates.empty();
    for (const auto& rep : replicates) {
        m_sum += static_cast<double>(rep.bound.m);
        if (rep.bound.c) {
            c_sum += *rep.bound.c;
            ++c_count;
        }
        if (rep.bound.admissible && rep.bound.xi) {
            xi_sum += *rep.bound.xi;
            ++xi_count;
        }
        all_admissible = all_admissible && rep.bound.admissible;
    }
    point.mean_m = replicates.empty() ? 0.0 : m_sum / static_cast<double>(replicates.size());
    if (c_count > 0) point.mean_c = c_sum / static_cast<double>(c_count);
    point.xi_admissible = all_admissible;
    if (all_admissible && xi_count > 0)
        point.xi = xi_sum / static_cast<double>(xi_count);
    return point;
}

SweepSummary run_scalar_core(const SweepSpec& spec) {
    spec.validate();
    if (spec.fixed.scenario != Scenario::scalar)
        throw std::invalid_argument("scalar sweep requires the scalar scenario");

    SweepSummary summary;
    summary.spec = spec;
    const std::size_t n_estimators = spec.fixed.estimators.size();
    const int runs = spec.fixed.runs;

    for (std::size_t k = 0; k < spec.values.size(); ++k) {
        const ExperimentConfig cfg = apply_sweep_value(spec, spec.values[k]);
        const GaussianMixtureSpec u_spec{cfg.alpha, cfg.mu_u, cfg.var_u};
        const GaussianMixtureSpec v_spec{cfg.beta, cfg.mu_v, cfg.var_v};

        std::vector<ReplicateResult> replicates(runs);
        parallel_for(static_cast<std::size_t>(runs), cfg.threads, [&](std::size_t r) {
            ReplicateResult rep;
            rep.stats.resize(n_estimators);
            const std::uint64_t data_seed = derive_seed(cfg.master_seed, "data", k, r);
            const ScalarEIVDataset ds = generate_scalar_dataset(cfg.w0, cfg.input, u_spec,
                                                                v_spec, cfg.n, data_seed);
            const CleanSet clean = clean_index_set(ds, cfg.eps_u, cfg.eps_v);
            const double sigma = resolve_scalar_sigma(cfg, cfg.n, clean.m);

            for (std::size_t j = 0; j < n_estimators; ++j) {
                try {
                    switch (cfg.estimators[j]) {
                        case EstimatorKind::mse: rep.stats[j] = mse_estimate(ds).w(); break;
                        case EstimatorKind::lad: rep.stats[j] = lad_estimate(ds).w(); break;
                        case EstimatorKind::tls: rep.stats[j] = tls_estimate(ds).w(); break;
                        case EstimatorKind::mcc: {
                            MCCConfig mcc_cfg;
                            mcc_cfg.sigma = sigma;
                            mcc_cfg.solver = MCCSolver::grid;
                            mcc_cfg.grid_points = cfg.grid_points;
                            mcc_cfg.seed = derive_seed(cfg.master_seed, "solver", k, r);
                            rep.stats[j] = mcc_estimate_grid(ds, mcc_cfg).w();
                            break;
                        }
                    }
                } catch (const std::exception&) {
                    rep.stats[j] = std::nullopt;  // excluded from this estimator's stats
                }
            }
            rep.bound = replicate_bound(cfg, clean, cfg.n, std::abs(cfg.w0), sigma);
            replicates[r] = std::move(rep);
        });
        summary.points.push_back(aggregate_point(spec.values[k], replicates, n_estimators));
    }
    return summary;
}

}  // namespace

SweepSummary run_scalar_sweep(const SweepSpec& spec) { return run_scalar_core(spec); }

SweepSummary run_alpha_sweep(const SweepSpec& spec) {
    if (spec.parameter != SweepParameter::alpha)
        throw std::invalid_argument("run_alpha_sweep: swept parameter must be alpha");
    return run_scalar_core(spec);
}

SweepSummary run_sigma_sweep(const SweepSpec& spec) {
    if (spec.parameter != SweepParameter::sigma_kernel)
        throw std::invalid_argument("run_sigma_sweep: swept parameter must be sigma_kernel");
    return run_scalar_core(spec);
}

SweepSummary run_fir_sweep(const SweepSpec& spec) {
    spec.validate();
    if (spec.fixed.scenario != Scenario::fir)
        throw std::invalid_argument("run_fir_sweep: requires the fir scenario");

    SweepSummary summary;
    summary.spec = spec;
    const std::size_t n_estimators = spec.fixed.estimators.size();
    const int runs = spec.fixed.runs;

    for (std::size_t k = 0; k < spec.values.size(); ++k) {
        const ExperimentConfig cfg = apply_sweep_value(spec, spec.values[k]);
        const GaussianMixtureSpec u_spec{cfg.alpha, cfg.mu_u, cfg.var_u};
        const GaussianMixtureSpec v_spec{cfg.beta, cfg.mu_v, cfg.var_v};
        const Eigen::VectorXd& w0 = cfg.w0_fir;
        const double sigma = cfg.sigma_override.value_or(cfg.sigma_fir);

        std::vector<ReplicateResult> replicates(runs);
        parallel_for(static_cast<std::size_t>(runs), cfg.threads, [&](std::size_t r) {
            ReplicateResult rep;
            rep.stats.resize(n_estimators);
            const std::uint64_t data_seed = derive_seed(cfg.master_seed, "data", k, r);
            const VectorEIVDataset ds = generate_fir_dataset(w0, cfg.n, cfg.input_variance,
                                                             u_spec, v_spec, data_seed);
            const CleanSet clean = clean_index_set(ds, cfg.eps_u, cfg.eps_v);

            for (std::size_t j = 0; j < n_estimators; ++j) {
                try {
                    Eigen::VectorXd w_hat;
                    switch (cfg.estimators[j]) {
                        case EstimatorKind::mse: w_hat = mse_estimate(ds).w_vec(); break;
                        case EstimatorKind::lad: w_hat = lad_estimate(ds).w_vec(); break;
                        case EstimatorKind::tls: w_hat = tls_estimate(ds).w_vec(); break;
                        case EstimatorKind::mcc: {
                            MCCConfig mcc_cfg;
                            mcc_cfg.sigma = sigma;
                            mcc_cfg.seed = derive_seed(cfg.master_seed, "solver", k, r);
                            try {
                                w_hat = mcc_estimate_fixed_point(ds, mcc_cfg).w_vec();
                            } catch (const std::exception&) {
                                w_hat = mcc_estimate_eda(ds, mcc_cfg).w_vec();  // fallback
                            }
                            break;
                        }
                    }
                    rep.stats[j] = (w_hat - w0).squaredNorm();
                } catch (const std::exception&) {
                    rep.stats[j] = std::nullopt;
                }
            }
            // No vector-case bound theory: xi stays absent, clean-set stats
            // are still informative.
            rep.bound.m = clean.m;
            rep.bound.c = clean.c;
            rep.bound.admissible = false;
            replicates[r] = std::move(rep);
        });
        summary.points.push_back(aggregate_point(spec.values[k], replicates, n_estimators));
    }
    return summary;
}

SweepSummary run_sweep(const SweepSpec& spec) {
    if (spec.fixed.scenario == Scenario::fir) return run_fir_sweep(spec);
    switch (spec.parameter) {
        case SweepParameter::alpha: return run_alpha_sweep(spec);
        case SweepParameter::sigma_kernel: return run_sigma_sweep(spec);
        default: return run_scalar_sweep(spec);
    }
}

// --- bound property verification ------------------------------------------------

namespace {

struct VerifyTrial {
    ScalarEIVDataset dataset;
    double w0 = 0.0;
    double sigma = 0.0;
    double xi = 0.0;
    bool corollary2 = false;
};

/// Mixture-contaminated trial with positive clean-noise thresholds.
std::optional<VerifyTrial> make_mixture_trial(std::uint64_t seed, std::uint64_t index,
                                              std::uint64_t attempt) {
    auto rng = make_stream(seed, "trial", index, attempt);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    VerifyTrial trial;
    trial.w0 = -5.0 + 10.0 * unit(rng);
    const std::size_t n = 200 + static_cast<std::size_t>(unit(rng) * 300);
    const double alpha = 0.2 * unit(rng);
    const double beta = 0.2 * unit(rng);
    const double mu_u = 20.0 * unit(rng);
    const double mu_v = 20.0 * unit(rng);
    const double var_u = std::pow(10.0, -4.0 + 2.0 * unit(rng));
    const double var_v = std::pow(10.0, -4.0 + 2.0 * unit(rng));
    const double eps_u = std::clamp(4.0 * std::sqrt(var_u), 0.02, 0.5);
    const double eps_v = std::clamp(4.0 * std::sqrt(var_v), 0.02, 0.5);
    const double lambda = 1.05 + 1.45 * unit(rng);

    trial.dataset = generate_scalar_dataset(trial.w0, InputSampler::two_interval(),
                                            GaussianMixtureSpec{alpha, mu_u, var_u},
                                            GaussianMixtureSpec{beta, mu_v, var_v}, n,
                                            derive_seed(seed, "trial-data", index, attempt));
    const CleanSet clean = clean_index_set(trial.dataset, eps_u, eps_v);
    const std::size_t m_eff = std::min(clean.m, n - 1);
    if (2 * m_eff <= n || !clean.c || !(*clean.c > 0.0)) return std::nullopt;

    const BoundReport report = xi_corollary1(n, m_eff, lambda, *clean.c, eps_u, eps_v,
                                             std::abs(trial.w0));
    if (!report.admissible || !report.xi) return std::nullopt;
    trial.sigma = *report.sigma;
    trial.xi = *report.xi;
    return trial;
}

/// Zero-deviation trial: clean samples carry exactly zero noise, so the
/// Corollary-2 branch applies at any sigma > 0.
VerifyTrial make_exact_trial(std::uint64_t seed, std::uint64_t index) {
    auto rng = make_stream(seed, "trial-exact", index);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    VerifyTrial trial;
    trial.corollary2 = true;
    trial.w0 = -5.0 + 10.0 * unit(rng);
    const std::size_t n = 200 + static_cast<std::size_t>(unit(rng) * 300);
    const std::size_t m = static_cast<std::size_t>(std::ceil(n * (0.55 + 0.4 * unit(rng))));

    std::vector<double> x(n), u(n, 0.0), v(n, 0.0);
    ScalarEIVDataset& ds = trial.dataset;
    ds.n = n;
    ds.w0 = trial.w0;
    ds.x_obs.resize(n);
    ds.d.resize(n);
    const InputSampler input = InputSampler::two_interval();
    for (std::size_t i = 0; i < n; ++i) x[i] = input.draw(rng);
    for (std::size_t i = m; i < n; ++i) {
        const double kind = unit(rng);
        auto magnitude = [&] { return (unit(rng) < 0.5 ? -1.0 : 1.0) * (2.0 + 18.0 * unit(rng)); };
        if (kind < 0.4)
            u[i] = magnitude();
        else if (kind < 0.8)
            v[i] = magnitude();
        else {
            u[i] = magnitude();
            v[i] = magnitude();
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        ds.x_obs[i] = x[i] + u[i];
        ds.d[i] = trial.w0 * x[i] + v[i];
    }
    ds.x = std::move(x);
    ds.u = std::move(u);
    ds.v = std::move(v);

    const CleanSet clean = clean_index_set(ds, 0.0, 0.0);
    trial.sigma = 0.02 + 0.48 * unit(rng);
    const BoundReport report = xi_corollary2(n, clean.m, trial.sigma, *clean.c);
    trial.xi = *report.xi;
    return trial;
}

double grid_maximizer(const ScalarEIVDataset& ds, double center, double radius, double sigma,
                      double tol) {
    for (int attempt = 0; attempt < 3; ++attempt) {
        MCCConfig cfg;
        cfg.sigma = sigma;
        cfg.solver = MCCSolver::grid;
        cfg.tol = tol;
        cfg.search_lo = center - radius;
        cfg.search_hi = center + radius;
        const double spacing = sigma / 10.0;
        const long wanted = static_cast<long>(2.0 * radius / spacing) + 1;
        cfg.grid_points = static_cast<int>(std::clamp<long>(wanted, 4001, 400001));
        const EstimateResult result = mcc_estimate_grid(ds, cfg);
        if (result.diagnostic.empty()) return result.w();
        radius *= 4.0;  // maximum sat at the window edge; widen and retry
    }
    MCCConfig cfg;
    cfg.sigma = sigma;
    cfg.solver = MCCSolver::grid;
    cfg.tol = tol;
    cfg.search_lo = center - radius;
    cfg.search_hi = center + radius;
    cfg.grid_points = 400001;
    return mcc_estimate_grid(ds, cfg).w();
}

}  // namespace

std::string VerifyReport::to_text() const {
    std::ostringstream out;
    out << "trials: " << trials << "\n"
        << "violations: " << total_violations() << "\n"
        << "bound violations (|w_grid - w0| > xi): " << bound_violations << "\n"
        << "dominance violations (J(w) >= J(w0) outside the xi-ball): " << dominance_violations
        << " of " << trials * dominance_samples_per_trial << " samples\n"
        << "corollary-2 trials (zero combined deviation): " << corollary2_trials << "\n"
        << "margin |w_grid - w0| / xi: min=" << format_double(margin_min, 6)
        << " median=" << format_double(margin_median, 6)
        << " mean=" << format_double(margin_mean, 6) << " p90=" << format_double(margin_p90, 6)
        << " max=" << format_double(margin_max, 6) << "\n";
    return out.str();
}

VerifyReport verify_bound_property(int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("verify_bound_property: trials must be >= 1");

    VerifyReport report;
    report.trials = trials;
    report.margins.resize(trials);
    std::vector<int> bound_bad(trials, 0), dominance_bad(trials, 0), exact(trials, 0);

    parallel_for(static_cast<std::size_t>(trials), 0, [&](std::size_t t) {
        VerifyTrial trial;
        if (t % 5 == 4) {
            trial = make_exact_trial(seed, t);
        } else {
            std::optional<VerifyTrial> candidate;
            for (std::uint64_t attempt = 0; attempt < 64 && !candidate; ++attempt)
                candidate = make_mixture_trial(seed, t, attempt);
            trial = candidate ? *candidate : make_exact_trial(seed, t);
        }
        exact[t] = trial.corollary2 ? 1 : 0;

        const double combined_over_c = trial.corollary2 ? 0.0 : trial.xi;  // xi >= combined/c
        const double radius = 2.0 * trial.xi + combined_over_c + 5.0;
        const double w_grid = grid_maximizer(trial.dataset, trial.w0, radius, trial.sigma, 1e-12);
        const double err = std::abs(w_grid - trial.w0);
        report.margins[t] = err / trial.xi;
        if (err > trial.xi) bound_bad[t] = 1;

        auto rng = make_stream(seed, "dominance", t);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const double j0 = mcc_objective(trial.dataset, trial.w0, trial.sigma);
        int bad = 0;
        for (int s = 0; s < report.dominance_samples_per_trial; ++s) {
            const double u = unit(rng);
            const double r = s % 2 == 0 ? trial.xi * (1.000001 + 3.0 * u * u)
                                        : trial.xi * 1.000001 + u * (10.0 + 3.0 * trial.xi);
            const double w = trial.w0 + (unit(rng) < 0.5 ? -r : r);
            if (!(mcc_objective(trial.dataset, w, trial.sigma) < j0)) ++bad;
        }
        dominance_bad[t] = bad;
    });

    for (int t = 0; t < trials; ++t) {
        report.bound_violations += bound_bad[t];
        report.dominance_violations += dominance_bad[t];
        report.corollary2_trials += exact[t];
    }
    std::vector<double> sorted = report.margins;
    std::sort(sorted.begin(), sorted.end());
    report.margin_min = sorted.front();
    report.margin_max = sorted.back();
    report.margin_median = sorted[sorted.size() / 2];
    report.margin_p90 = sorted[static_cast<std::size_t>(0.9 * (sorted.size() - 1))];
    report.margin_mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                         static_cast<double>(sorted.size());
    return report;
}

// --- CSV + manifest -----------------------------------------------------------

std::string summary_to_csv(const SweepSummary& summary) {
    const auto& estimators = summary.spec.fixed.estimators;
    const bool scalar = summary.spec.fixed.scenario == Scenario::scalar;
    std::string out =
        "sweep_param,sweep_value,estimator,mean,std,runs_ok,xi,xi_admissible,mean_m,mean_c,w0\n";
    auto fmt = [](double v) { return format_double(v, 12); };
    for (const auto& point : summary.points) {
        for (std::size_t j = 0; j < estimators.size(); ++j) {
            const EstimatorCell& cell = point.cells[j];
            out += to_string(summary.spec.parameter);
            out += ',';
            out += fmt(point.value);
            out += ',';
            out += to_string(estimators[j]);
            out += ',';
            out += cell.runs_ok > 0 ? fmt(cell.mean) : std::string();
            out += ',';
            out += cell.runs_ok > 0 ? fmt(cell.stddev) : std::string();
            out += ',';
            out += std::to_string(cell.runs_ok);
            out += ',';
            out += point.xi ? fmt(*point.xi) : std::string();
            out += ',';
            out += point.xi_admissible ? "true" : "false";
            out += ',';
            out += fmt(point.mean_m);
            out += ',';
            out += point.mean_c ? fmt(*point.mean_c) : std::string();
            out += ',';
            out += scalar ? fmt(summary.spec.fixed.w0) : std::string();
            out += '\n';
        }
    }
    return out;
}

void write_summary_csv(const SweepSummary& summary, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << summary_to_csv(summary);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string sweep_manifest_json(const SweepSpec& spec) {
    nlohmann::json j;
    j["preset"] = spec.name;
    j["sweep_parameter"] = to_string(spec.parameter);
    j["values"] = spec.values;
    const ExperimentConfig& cfg = spec.fixed;
    j["scenario"] = to_string(cfg.scenario);
    if (cfg.scenario == Scenario::scalar) {
        j["w0"] = cfg.w0;
    } else {
        j["w0"] = std::vector<double>(cfg.w0_fir.data(), cfg.w0_fir.data() + cfg.w0_fir.size());
    }
    j["n"] = cfg.n;
    j["runs"] = cfg.runs;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["mu_u"] = cfg.mu_u;
    j["mu_v"] = cfg.mu_v;
    j["var_u"] = cfg.var_u;
    j["var_v"] = cfg.var_v;
    j["eps_u"] = cfg.eps_u;
    j["eps_v"] = cfg.eps_v;
    j["lambda"] = cfg.lambda;
    if (cfg.sigma_override) j["sigma"] = *cfg.sigma_override;
    j["sigma_fir"] = cfg.sigma_fir;
    j["input_variance"] = cfg.input_variance;
    j["input"] = cfg.input.kind_name();
    std::vector<std::string> estimator_names;
    for (EstimatorKind e : cfg.estimators) estimator_names.emplace_back(to_string(e));
    j["estimators"] = estimator_names;
    j["master_seed"] = cfg.master_seed;
    j["grid_points"] = cfg.grid_points;
    j["threads"] = cfg.threads;
    return j.dump(2) + "\n";
}

void write_manifest(const SweepSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << sweep_manifest_json(spec);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// --- presets -------------------------------------------------------------------

namespace {

std::vector<double> arange(double lo, double hi, double step) {
    std::vector<double> values;
    for (double v = lo; v <= hi + 1e-12; v += step) values.push_back(v);
    return values;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"table1", "table2", "fig4-alpha", "fig5-sigma", "fig6-fir", "fig7-fir"};
}

SweepSpec preset_sweep(const std::string& name) {
    SweepSpec spec;
    spec.name = name;
    if (name == "table1") {
        spec.parameter = SweepParameter::mu_u;
        spec.values = arange(0.0, 20.0, 2.0);
        spec.fixed.mu_v = 10.0;
    } else if (name == "table2") {
        spec.parameter = SweepParameter::mu_v;
        spec.values = arange(0.0, 20.0, 2.0);
        spec.fixed.mu_u = 10.0;
    } else if (name == "fig4-alpha") {
        spec.parameter = SweepParameter::alpha;
        spec.values = arange(0.0, 0.5, 0.05);
        for (double v : {0.6, 0.7, 0.8, 0.9}) spec.values.push_back(v);
        spec.fixed.mu_u = 5.0;
        spec.fixed.mu_v = 5.0;
    } else if (name == "fig5-sigma") {
        spec.parameter = SweepParameter::sigma_kernel;
        spec.values = {0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1000.0};
        spec.fixed.mu_u = 5.0;
        spec.fixed.mu_v = 5.0;
        spec.fixed.runs = 20;
        spec.fixed.estimators = {EstimatorKind::mse, EstimatorKind::mcc};
    } else if (name == "fig6-fir" || name == "fig7-fir") {
        spec.parameter = name == "fig6-fir" ? SweepParameter::mu_u : SweepParameter::mu_v;
        spec.values = arange(0.0, 20.0, 2.0);
        spec.fixed.scenario = Scenario::fir;
        spec.fixed.w0_fir = default_fir_taps();
        spec.fixed.n = 2000;
        spec.fixed.runs = 20;
        spec.fixed.alpha = 0.3;
        spec.fixed.beta = 0.3;
        spec.fixed.var_u = 0.01;
        spec.fixed.var_v = 0.01;
        spec.fixed.mu_u = name == "fig6-fir" ? 0.0 : 5.0;  // fig6 sweeps mu_u itself
        spec.fixed.mu_v = name == "fig6-fir" ? 2.0 : 0.0;
        spec.fixed.input_variance = 1.0;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return spec;
}

}  // namespace mcc

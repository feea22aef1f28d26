#include "mcc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mcc/format.hpp"
#include "mcc/rng.hpp"

namespace mcc {

namespace {

constexpr double kDenominatorFloor = 1e-300;

std::vector<double> scalar_residuals(const std::vector<double>& x_obs,
                                     const std::vector<double>& d, double w) {
    std::vector<double> e(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) e[i] = d[i] - w * x_obs[i];
    return e;
}

std::vector<double> vector_residuals(const VectorEIVDataset& ds, const Eigen::VectorXd& w) {
    Eigen::VectorXd e = ds.d - ds.x_obs_rows * w;
    return std::vector<double>(e.data(), e.data() + e.size());
}

double correntropy(const std::vector<double>& x_obs, const std::vector<double>& d, double w,
                   double sigma) {
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    double sum = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double e = d[i] - w * x_obs[i];
        sum += std::exp(-e * e * inv2s2);
    }
    return sum / static_cast<double>(d.size());
}

void require_sigma(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("MCC: kernel width sigma must be > 0");
}

void require_nonempty(std::size_t n, const char* who) {
    if (n == 0) throw std::invalid_argument(std::string(who) + ": empty dataset");
}

}  // namespace

const char* to_string(MCCSolver solver) {
    switch (solver) {
        case MCCSolver::fixed_point: return "fixed-point";
        case MCCSolver::grid: return "grid";
        case MCCSolver::eda: return "eda";
        case MCCSolver::gradient_ascent: return "gradient-ascent";
    }
    return "unknown";
}

MCCSolver solver_from_name(const std::string& name) {
    if (name == "fixed-point" || name == "fixed_point" || name == "fp")
        return MCCSolver::fixed_point;
    if (name == "grid") return MCCSolver::grid;
    if (name == "eda") return MCCSolver::eda;
    if (name == "gradient-ascent" || name == "gradient") return MCCSolver::gradient_ascent;
    throw std::invalid_argument("unknown MCC solver '" + name + "'");
}

void MCCConfig::validate() const {
    require_sigma(sigma);
    if (!(tol > 0.0)) throw std::invalid_argument("MCCConfig: tol must be > 0");
    if (max_iters < 1) throw std::invalid_argument("MCCConfig: max_iters must be >= 1");
    if (search_lo && search_hi && !(*search_lo < *search_hi))
        throw std::invalid_argument("MCCConfig: need search_lo < search_hi");
    if (eda_elites >= eda_population)
        throw std::invalid_argument("MCCConfig: need eda_elites < eda_population");
}

double EstimateResult::w() const {
    if (w_hat.size() != 1) throw std::logic_error("EstimateResult: not a scalar fit");
    return w_hat[0];
}

Eigen::VectorXd EstimateResult::w_vec() const {
    return Eigen::Map<const Eigen::VectorXd>(w_hat.data(), static_cast<Eigen::Index>(w_hat.size()));
}

// --- MSE ---------------------------------------------------------------------

EstimateResult mse_estimate(const ScalarEIVDataset& ds) {
    require_nonempty(ds.n, "mse_estimate");
    double sxx = 0.0, sxd = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) {
        sxx += ds.x_obs[i] * ds.x_obs[i];
        sxd += ds.x_obs[i] * ds.d[i];
    }
    if (!(sxx > 0.0))
        throw std::invalid_argument("mse_estimate: all observed inputs are zero");
    EstimateResult result;
    result.w_hat = {sxd / sxx};
    result.residuals = scalar_residuals(ds.x_obs, ds.d, result.w_hat[0]);
    double sse = 0.0;
    for (double e : result.residuals) sse += e * e;
    result.objective = sse / static_cast<double>(ds.n);
    return result;
}

EstimateResult mse_estimate(const VectorEIVDataset& ds) {
    require_nonempty(ds.n, "mse_estimate");
    const Eigen::MatrixXd gram = ds.x_obs_rows.transpose() * ds.x_obs_rows;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible())
        throw std::invalid_argument("mse_estimate: singular regressor Gram matrix");
    const Eigen::VectorXd w = lu.solve(ds.x_obs_rows.transpose() * ds.d);
    EstimateResult result;
    result.w_hat.assign(w.data(), w.data() + w.size());
    result.residuals = vector_residuals(ds, w);
    double sse = 0.0;
    for (double e : result.residuals) sse += e * e;
    result.objective = sse / static_cast<double>(ds.n);
    return result;
}

// --- LAD ---------------------------------------------------------------------

EstimateResult lad_estimate(const ScalarEIVDataset& ds) {
    require_nonempty(ds.n, "lad_estimate");
    std::vector<std::pair<double, double>> ratio_weight;  // (d/x~, |x~|)
    ratio_weight.reserve(ds.n);
    for (std::size_t i = 0; i < ds.n; ++i) {
        if (ds.x_obs[i] != 0.0)
            ratio_weight.emplace_back(ds.d[i] / ds.x_obs[i], std::abs(ds.x_obs[i]));
    }
    if (ratio_weight.empty())
        throw std::invalid_argument("lad_estimate: all observed inputs are zero");
    std::sort(ratio_weight.begin(), ratio_weight.end());

    double total = 0.0;
    for (const auto& [ratio, weight] : ratio_weight) total += weight;
    // Weighted median; when the cumulative weight hits exactly half, the
    // minimizing set is an interval and the lower ratio is returned.
    const double half = total / 2.0;
    double cum = 0.0;
    double w = ratio_weight.back().first;
    for (const auto& [ratio, weight] : ratio_weight) {
        cum += weight;
        if (cum >= half) {
            w = ratio;
            break;
        }
    }

    EstimateResult result;
    result.w_hat = {w};
    result.residuals = scalar_residuals(ds.x_obs, ds.d, w);
    double sae = 0.0;
    for (double e : result.residuals) sae += std::abs(e);
    result.objective = sae / static_cast<double>(ds.n);
    return result;
}

EstimateResult lad_estimate(const VectorEIVDataset& ds) {
    require_nonempty(ds.n, "lad_estimate");
    constexpr double kAbsFloor = 1e-8;
    constexpr double kTol = 1e-8;
    constexpr int kMaxIters = 200;

    Eigen::VectorXd w = mse_estimate(ds).w_vec();
    bool converged = false;
    int it = 0;
    for (; it < kMaxIters; ++it) {
        const Eigen::VectorXd e = ds.d - ds.x_obs_rows * w;
        Eigen::VectorXd weights(e.size());
        for (Eigen::Index i = 0; i < e.size(); ++i)
            weights(i) = 1.0 / std::max(std::abs(e(i)), kAbsFloor);
        const Eigen::MatrixXd wr = weights.asDiagonal() * ds.x_obs_rows;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(ds.x_obs_rows.transpose() * wr);
        if (!lu.isInvertible())
            throw std::runtime_error("lad_estimate: singular reweighted system");
        const Eigen::VectorXd w_new = lu.solve(wr.transpose() * ds.d);
        const double dw = (w_new - w).lpNorm<Eigen::Infinity>();
        w = w_new;
        if (dw < kTol) {
            converged = true;
            ++it;
            break;
        }
    }

    EstimateResult result;
    result.w_hat.assign(w.data(), w.data() + w.size());
    result.residuals = vector_residuals(ds, w);
    double sae = 0.0;
    for (double e : result.residuals) sae += std::abs(e);
    result.objective = sae / static_cast<double>(ds.n);
    result.iterations = it;
    result.converged = converged;
    return result;
}

// --- TLS ---------------------------------------------------------------------

EstimateResult tls_estimate(const ScalarEIVDataset& ds) {
    if (ds.n < 2) throw std::invalid_argument("tls_estimate: need at least 2 samples");
    double sxx = 0.0, sxd = 0.0, sdd = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) {
        sxx += ds.x_obs[i] * ds.x_obs[i];
        sxd += ds.x_obs[i] * ds.d[i];
        sdd += ds.d[i] * ds.d[i];
    }
    const double scale = sxx + sdd;
    if (!(scale > 0.0)) throw std::invalid_argument("tls_estimate: all-zero data");
    const double gap = std::hypot(sxx - sdd, 2.0 * sxd);
    if (gap <= 1e-14 * scale)
        throw std::runtime_error(
            "tls_estimate: smallest singular direction is not distinct (isotropic data)");
    const double lambda_min = 0.5 * (scale - gap);
    // Eigenvector of the moment matrix [[sxx, sxd], [sxd, sdd]] at lambda_min
    // is the fitted line's normal (-w, 1) up to scale; pick the better-
    // conditioned of the two analytic forms.
    double nx, ny;
    if (std::abs(lambda_min - sxx) + std::abs(sxd) > std::abs(lambda_min - sdd) + std::abs(sxd)) {
        nx = sxd;
        ny = lambda_min - sxx;
    } else {
        nx = lambda_min - sdd;
        ny = sxd;
    }
    if (nx == 0.0 && ny == 0.0) {  // sxd == 0 and lambda_min equals both moments
        nx = 0.0;
        ny = 1.0;
    }
    const double norm = std::hypot(nx, ny);
    if (std::abs(ny) <= 1e-14 * norm)
        throw std::runtime_error("tls_estimate: no finite solution (vertical fit direction)");
    const double w = -nx / ny;

    EstimateResult result;
    result.w_hat = {w};
    result.residuals = scalar_residuals(ds.x_obs, ds.d, w);
    double sse = 0.0;
    for (double e : result.residuals) sse += e * e;
    result.objective = sse / (1.0 + w * w) / static_cast<double>(ds.n);
    return result;
}

EstimateResult tls_estimate(const VectorEIVDataset& ds) {
    if (ds.n < ds.p + 1) throw std::invalid_argument("tls_estimate: need n >= p + 1");
    Eigen::MatrixXd augmented(ds.n, ds.p + 1);
    augmented.leftCols(static_cast<Eigen::Index>(ds.p)) = ds.x_obs_rows;
    augmented.col(static_cast<Eigen::Index>(ds.p)) = ds.d;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(augmented, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const Eigen::Index last = sv.size() - 1;
    if (last >= 1 && sv(last - 1) - sv(last) <= 1e-12 * sv(0))
        throw std::runtime_error("tls_estimate: smallest singular direction is not distinct");
    const Eigen::VectorXd v = svd.matrixV().col(last);
    if (std::abs(v(last)) <= 1e-12)
        throw std::runtime_error("tls_estimate: no finite solution (zero last component)");
    const Eigen::VectorXd w = -v.head(last) / v(last);

    EstimateResult result;
    result.w_hat.assign(w.data(), w.data() + w.size());
    result.residuals = vector_residuals(ds, w);
    double sse = 0.0;
    for (double e : result.residuals) sse += e * e;
    result.objective = sse / (1.0 + w.squaredNorm()) / static_cast<double>(ds.n);
    return result;
}

// --- MCC objective and gradient ----------------------------------------------

double mcc_objective(const ScalarEIVDataset& ds, double w, double sigma) {
    require_sigma(sigma);
    require_nonempty(ds.n, "mcc_objective");
    return correntropy(ds.x_obs, ds.d, w, sigma);
}

double mcc_objective(const VectorEIVDataset& ds, const Eigen::VectorXd& w, double sigma) {
    require_sigma(sigma);
    require_nonempty(ds.n, "mcc_objective");
    const Eigen::VectorXd e = ds.d - ds.x_obs_rows * w;
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) sum += std::exp(-e(i) * e(i) * inv2s2);
    return sum / static_cast<double>(ds.n);
}

double mcc_gradient(const ScalarEIVDataset& ds, double w, double sigma) {
    require_sigma(sigma);
    require_nonempty(ds.n, "mcc_gradient");
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    double sum = 0.0;
    for (std::size_t i = 0; i < ds.n; ++i) {
        const double e = ds.d[i] - w * ds.x_obs[i];
        sum += std::exp(-e * e * inv2s2) * e * ds.x_obs[i];
    }
    return sum / (static_cast<double>(ds.n) * sigma * sigma);
}

Eigen::VectorXd mcc_gradient(const VectorEIVDataset& ds, const Eigen::VectorXd& w, double sigma) {
    require_sigma(sigma);
    require_nonempty(ds.n, "mcc_gradient");
    const Eigen::VectorXd e = ds.d - ds.x_obs_rows * w;
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    Eigen::VectorXd weighted(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i)
        weighted(i) = std::exp(-e(i) * e(i) * inv2s2) * e(i);
    return ds.x_obs_rows.transpose() * weighted /
           (static_cast<double>(ds.n) * sigma * sigma);
}

// --- fixed point ---------------------------------------------------------

namespace {

struct FixedPointRun {
    double w = 0.0;
    int iterations = 0;
    bool converged = false;
    bool ok = false;
};

FixedPointRun fixed_point_scalar(const std::vector<double>& x_obs, const std::vector<double>& d,
                                 double w_init, double sigma, double tol, int max_iters) {
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    auto step = [&](double w, bool& valid) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double e = d[i] - w * x_obs[i];
            const double g = std::exp(-e * e * inv2s2);
            num += g * x_obs[i] * d[i];
            den += g * x_obs[i] * x_obs[i];
        }
        valid = den > kDenominatorFloor;
        return valid ? num / den : w;
    };

    FixedPointRun run;
    run.w = w_init;
    for (; run.iterations < max_iters; ++run.iterations) {
        bool valid = false;
        const double w_new = step(run.w, valid);
        if (!valid || !std::isfinite(w_new)) return run;  // start failed
        const double dw = std::abs(w_new - run.w);
        run.w = w_new;
        if (dw < tol) {
            run.converged = true;
            ++run.iterations;
            break;
        }
    }
    run.ok = true;
    // Quiet polish toward the exact fixed point; each step is a monotone
    // ascent of the objective, so this can only improve the returned iterate.
    double prev_dw = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 200; ++k) {
        bool valid = false;
        const double w_new = step(run.w, valid);
        if (!valid || !std::isfinite(w_new)) break;
        const double dw = std::abs(w_new - run.w);
        if (dw >= prev_dw) break;
        run.w = w_new;
        prev_dw = dw;
        if (dw < 1e-16 * std::max(1.0, std::abs(run.w))) break;
    }
    return run;
}

std::pair<double, double> resolve_window(const MCCConfig& config,
                                         const std::pair<double, double>& fallback) {
    const double lo = config.search_lo.value_or(fallback.first);
    const double hi = config.search_hi.value_or(fallback.second);
    if (!(lo < hi)) throw std::invalid_argument("MCC: need search_lo < search_hi");
    return {lo, hi};
}

EstimateResult finish_scalar(const ScalarEIVDataset& ds, double w, double sigma) {
    EstimateResult result;
    result.w_hat = {w};
    result.residuals = scalar_residuals(ds.x_obs, ds.d, w);
    result.objective = correntropy(ds.x_obs, ds.d, w, sigma);
    return result;
}

EstimateResult finish_vector(const VectorEIVDataset& ds, const Eigen::VectorXd& w, double sigma) {
    EstimateResult result;
    result.w_hat.assign(w.data(), w.data() + w.size());
    result.residuals = vector_residuals(ds, w);
    result.objective = mcc_objective(ds, w, sigma);
    return result;
}

}  // namespace

std::pair<double, double> default_search_window(const ScalarEIVDataset& ds) {
    double scale = 1.0;
    try {
        scale = std::max(1.0, std::abs(mse_estimate(ds).w()));
    } catch (const std::exception&) {
    }
    return {-10.0 * scale, 10.0 * scale};
}

std::pair<double, double> default_search_window(const VectorEIVDataset& ds) {
    double scale = 1.0;
    try {
        const Eigen::VectorXd w = mse_estimate(ds).w_vec();
        scale = std::max(1.0, w.lpNorm<Eigen::Infinity>());
    } catch (const std::exception&) {
    }
    return {-10.0 * scale, 10.0 * scale};
}

EstimateResult mcc_estimate_fixed_point(const ScalarEIVDataset& ds, const MCCConfig& config) {
    config.validate();
    require_nonempty(ds.n, "mcc_estimate_fixed_point");

    // Multistart set: best coarse-grid points guard against bad basins of the
    // non-concave objective; LAD is robust and cheap; MSE covers the
    // large-sigma regime.
    const auto window = resolve_window(config, default_search_window(ds));
    constexpr int kCoarsePoints = 64;
    std::vector<std::pair<double, double>> coarse;  // (objective, w)
    coarse.reserve(kCoarsePoints);
    for (int i = 0; i < kCoarsePoints; ++i) {
        const double w = window.first +
                         (window.second - window.first) * i / double(kCoarsePoints - 1);
        coarse.emplace_back(correntropy(ds.x_obs, ds.d, w, config.sigma), w);
    }
    std::sort(coarse.begin(), coarse.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<double> starts;
    starts.push_back(coarse.front().second);
    try {
        starts.push_back(lad_estimate(ds).w());
    } catch (const std::exception&) {
    }
    try {
        starts.push_back(mse_estimate(ds).w());
    } catch (const std::exception&) {
    }
    for (std::size_t i = 1; i < coarse.size() && starts.size() < 16; ++i)
        starts.push_back(coarse[i].second);
    const std::size_t n_starts = std::min<std::size_t>(std::max(1, config.multistart),
                                                       starts.size());

    bool any_ok = false;
    double best_w = 0.0, best_obj = -1.0;
    int best_iters = 0;
    bool best_converged = false;
    for (std::size_t s = 0; s < n_starts; ++s) {
        const FixedPointRun run = fixed_point_scalar(ds.x_obs, ds.d, starts[s], config.sigma,
                                                     config.tol, config.max_iters);
        if (!run.ok) continue;
        const double obj = correntropy(ds.x_obs, ds.d, run.w, config.sigma);
        if (!any_ok || obj > best_obj) {
            any_ok = true;
            best_obj = obj;
            best_w = run.w;
            best_iters = run.iterations;
            best_converged = run.converged;
        }
    }
    if (!any_ok)
        throw std::runtime_error(
            "mcc_estimate_fixed_point: every initialization failed (weighted denominator "
            "underflow)");

    EstimateResult result = finish_scalar(ds, best_w, config.sigma);
    result.iterations = best_iters;
    result.converged = best_converged;
    result.starts_tried = static_cast<int>(n_starts);
    return result;
}

EstimateResult mcc_estimate_fixed_point(const VectorEIVDataset& ds, const MCCConfig& config) {
    config.validate();
    require_nonempty(ds.n, "mcc_estimate_fixed_point");
    const double inv2s2 = 1.0 / (2.0 * config.sigma * config.sigma);
    const Eigen::Index p = static_cast<Eigen::Index>(ds.p);

    std::vector<Eigen::VectorXd> starts;
    try {
        starts.push_back(mse_estimate(ds).w_vec());
    } catch (const std::exception&) {
    }
    try {
        starts.push_back(lad_estimate(ds).w_vec());
    } catch (const std::exception&) {
    }
    starts.push_back(Eigen::VectorXd::Zero(p));
    const std::size_t n_starts = std::min<std::size_t>(std::max(1, config.multistart),
                                                       starts.size());

    bool any_ok = false;
    Eigen::VectorXd best_w = Eigen::VectorXd::Zero(p);
    double best_obj = -1.0;
    int best_iters = 0;
    bool best_converged = false;

    for (std::size_t s = 0; s < n_starts; ++s) {
        Eigen::VectorXd w = starts[s];
        bool converged = false;
        bool failed = false;
        int it = 0;
        double prev_dw = std::numeric_limits<double>::infinity();
        const int polish_budget = 200;
        for (; it < config.max_iters + polish_budget; ++it) {
            const Eigen::VectorXd e = ds.d - ds.x_obs_rows * w;
            Eigen::VectorXd g(e.size());
            for (Eigen::Index i = 0; i < e.size(); ++i) g(i) = std::exp(-e(i) * e(i) * inv2s2);
            if (!(g.sum() > kDenominatorFloor)) {
                failed = !converged;
                break;
            }
            const Eigen::MatrixXd weighted = g.asDiagonal() * ds.x_obs_rows;
            Eigen::FullPivLU<Eigen::MatrixXd> lu(ds.x_obs_rows.transpose() * weighted);
            if (!lu.isInvertible()) {
                failed = !converged;
                break;
            }
            const Eigen::VectorXd w_new = lu.solve(weighted.transpose() * ds.d);
            if (!w_new.allFinite()) {
                failed = !converged;
                break;
            }
            const double dw = (w_new - w).lpNorm<Eigen::Infinity>();
            if (converged && dw >= prev_dw) break;  // polish stopped improving
            w = w_new;
            prev_dw = dw;
            if (dw < config.tol) converged = true;
            if (dw < 1e-16 * std::max(1.0, w.lpNorm<Eigen::Infinity>())) {
                ++it;
                break;
            }
            if (!converged && it + 1 >= config.max_iters) {
                ++it;
                break;
            }
        }
        if (failed) continue;
        const double obj = mcc_objective(ds, w, config.sigma);
        if (!any_ok || obj > best_obj) {
            any_ok = true;
            best_obj = obj;
            best_w = w;
            best_iters = std::min(it, config.max_iters);
            best_converged = converged;
        }
    }
    if (!any_ok)
        throw std::runtime_error(
            "mcc_estimate_fixed_point: every initialization failed (degenerate weighted "
            "normal equations)");

    EstimateResult result = finish_vector(ds, best_w, config.sigma);
    result.iterations = best_iters;
    result.converged = best_converged;
    result.starts_tried = static_cast<int>(n_starts);
    return result;
}

// --- grid oracle ---------------------------------------------------------

EstimateResult mcc_estimate_grid(const ScalarEIVDataset& ds, const MCCConfig& config) {
    config.validate();
    require_nonempty(ds.n, "mcc_estimate_grid");
    if (config.grid_points < 3)
        throw std::invalid_argument("mcc_estimate_grid: need grid_points >= 3");

    const auto [lo, hi] = resolve_window(config, default_search_window(ds));
    const int npts = config.grid_points;
    const double step = (hi - lo) / double(npts - 1);

    auto f = [&](double w) { return correntropy(ds.x_obs, ds.d, w, config.sigma); };

    int best_idx = 0;
    double best_val = -1.0;
    for (int i = 0; i < npts; ++i) {
        const double val = f(lo + step * i);
        if (val > best_val) {
            best_val = val;
            best_idx = i;
        }
    }
    const double w_grid = lo + step * best_idx;

    // Golden-section refinement inside the best bracket.
    double a = lo + step * std::max(0, best_idx - 1);
    double b = lo + step * std::min(npts - 1, best_idx + 1);
    const double invphi = 0.6180339887498948482;
    const double xtol = std::max(config.tol, 1e-13);
    double c = b - invphi * (b - a);
    double d2 = a + invphi * (b - a);
    double fc = f(c), fd = f(d2);
    int iters = 0;
    while (b - a > xtol && iters < 300) {
        if (fc >= fd) {
            b = d2;
            d2 = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d2;
            fc = fd;
            d2 = a + invphi * (b - a);
            fd = f(d2);
        }
        ++iters;
    }
    double w_best = fc >= fd ? c : d2;
    if (f(w_best) < best_val) w_best = w_grid;  // never lose to the raw grid point

    EstimateResult result = finish_scalar(ds, w_best, config.sigma);
    result.iterations = iters;
    result.converged = true;
    if (best_idx == 0 || best_idx == npts - 1)
        result.diagnostic = "maximum at search-window endpoint; window likely too small";
    return result;
}

// --- EDA -------------------------------------------------------------------

namespace {

template <typename Objective>
std::pair<Eigen::VectorXd, double> run_eda(Eigen::Index dim, const Eigen::VectorXd& lo,
                                           const Eigen::VectorXd& hi, const MCCConfig& config,
                                           Objective&& objective) {
    if (config.eda_population < 2 * config.eda_elites)
        throw std::invalid_argument("mcc_estimate_eda: need population >= 2 * elites");
    if (config.eda_elites < 1 || config.eda_generations < 1)
        throw std::invalid_argument("mcc_estimate_eda: elites and generations must be >= 1");

    auto rng = make_stream(config.seed, "eda");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int pop_size = config.eda_population;
    const int elites = config.eda_elites;

    std::vector<Eigen::VectorXd> population(pop_size);
    for (auto& member : population) {
        member.resize(dim);
        for (Eigen::Index j = 0; j < dim; ++j)
            member(j) = lo(j) + (hi(j) - lo(j)) * unit(rng);
    }

    Eigen::VectorXd best = population.front();
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<double> scores(pop_size);
    std::vector<int> order(pop_size);

    for (int gen = 0; gen < config.eda_generations; ++gen) {
        for (int i = 0; i < pop_size; ++i) {
            scores[i] = objective(population[i]);
            if (scores[i] > best_val) {
                best_val = scores[i];
                best = population[i];
            }
        }
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + elites, order.end(),
                          [&](int a, int b) { return scores[a] > scores[b]; });

        Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
        for (int k = 0; k < elites; ++k) mean += population[order[k]];
        mean /= double(elites);
        Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
        for (int k = 0; k < elites; ++k) {
            const Eigen::VectorXd diff = population[order[k]] - mean;
            var += diff.cwiseProduct(diff);
        }
        var /= double(elites);
        for (Eigen::Index j = 0; j < dim; ++j)
            var(j) = std::max(var(j), config.eda_variance_floor);

        for (auto& member : population) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                std::normal_distribution<double> normal(mean(j), std::sqrt(var(j)));
                member(j) = normal(rng);
            }
        }
    }
    return {best, best_val};
}

}  // namespace

EstimateResult mcc_estimate_eda(const ScalarEIVDataset& ds, const MCCConfig& config) {
    config.validate();
    require_nonempty(ds.n, "mcc_estimate_eda");
    const auto window = resolve_window(config, default_search_window(ds));
    Eigen::VectorXd lo(1), hi(1);
    lo << window.first;
    hi << window.second;
    const auto [best, value] =
        run_eda(1, lo, hi, config,
                [&](const Eigen::VectorXd& w) {
                    return correntropy(ds.x_obs, ds.d, w(0), config.sigma);
                });
    EstimateResult result = finish_scalar(ds, best(0), config.sigma);
    result.iterations = config.eda_generations;
    result.converged = true;
    return result;
}

EstimateResult mcc_estimate_eda(const VectorEIVDataset& ds, const MCCConfig& config) {
    config.validate();
    require_nonempty(ds.n, "mcc_estimate_eda");
    const auto window = resolve_window(config, default_search_window(ds));
    const Eigen::Index p = static_cast<Eigen::Index>(ds.p);
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(p, window.first);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(p, window.second);
    const auto [best, value] =
        run_eda(p, lo, hi, config,
                [&](const Eigen::VectorXd& w) { return mcc_objective(ds, w, config.sigma); });
    EstimateResult result = finish_vector(ds, best, config.sigma);
    result.iterations = config.eda_generations;
    result.converged = true;
    return result;
}

// --- gradient ascent ---------------------------------------------------------

EstimateResult mcc_estimate_gradient(const ScalarEIVDataset& ds, const MCCConfig& config) {
    config.validate();
    require_nonempty(ds.n, "mcc_estimate_gradient");
    double w = 0.0;
    try {
        w = lad_estimate(ds).w();
    } catch (const std::exception&) {
    }
    double step = config.step_size * config.sigma * config.sigma;
    double value = correntropy(ds.x_obs, ds.d, w, config.sigma);
    bool converged = false;
    int it = 0;
    for (; it < config.max_iters; ++it) {
        const double grad = mcc_gradient(ds, w, config.sigma);
        double t = step;
        double w_new = w + t * grad;
        double v_new = correntropy(ds.x_obs, ds.d, w_new, config.sigma);
        while (v_new < value && t > 1e-18) {
            t *= 0.5;
            w_new = w + t * grad;
            v_new = correntropy(ds.x_obs, ds.d, w_new, config.sigma);
        }
        if (v_new < value) break;  // no ascent progress at machine scale
        const double dw = std::abs(w_new - w);
        w = w_new;
        value = v_new;
        step = std::min(t * 2.0, 1e6);
        if (dw < config.tol) {
            converged = true;
            ++it;
            break;
        }
    }
    EstimateResult result = finish_scalar(ds, w, config.sigma);
    result.iterations = it;
    result.converged = converged;
    return result;
}

std::vector<std::pair<std::string, std::string>> estimate_record(const std::string& estimator,
                                                                 const EstimateResult& result) {
    std::vector<std::pair<std::string, std::string>> record;
    record.emplace_back("estimator", estimator);
    if (result.w_hat.size() == 1) {
        record.emplace_back("w_hat", format_double(result.w_hat[0], 12));
    } else {
        for (std::size_t k = 0; k < result.w_hat.size(); ++k)
            record.emplace_back("w_hat_" + std::to_string(k), format_double(result.w_hat[k], 12));
    }
    record.emplace_back("objective", format_double(result.objective, 12));
    record.emplace_back("iterations", std::to_string(result.iterations));
    record.emplace_back("converged", result.converged ? "true" : "false");
    record.emplace_back("starts_tried", std::to_string(result.starts_tried));
    return record;
}

}  // namespace mcc

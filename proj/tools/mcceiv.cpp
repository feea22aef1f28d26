// mcceiv — dataset synthesis, robust EIV estimation, error bounds and
// Monte Carlo sweeps from the command line. All randomness flows from a
// single --seed; rerunning any command with the same flags reproduces its
// output byte for byte.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcc/bounds.hpp"
#include "mcc/estimators.hpp"
#include "mcc/experiments.hpp"
#include "mcc/format.hpp"
#include "mcc/model.hpp"
#include "mcc/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;

/// Flat JSON config files mirroring the long flag names; values given on the
/// command line take precedence over file values.
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        nlohmann::json j = nlohmann::json::object();
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string& name = opt->get_lnames()[0];
            if (opt->count() > 0) {
                if (opt->results().size() == 1)
                    j[name] = opt->results()[0];
                else
                    j[name] = opt->results();
            } else if (default_also) {
                j[name] = opt->get_default_str();
            }
        }
        return j.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::FileError("config must be a flat JSON object");
        std::vector<CLI::ConfigItem> items;
        for (auto it = j.begin(); it != j.end(); ++it) {
            CLI::ConfigItem item;
            item.name = it.key();
            for (char& ch : item.name)
                if (ch == '_') ch = '-';
            const nlohmann::json& value = it.value();
            auto as_string = [](const nlohmann::json& v) {
                if (v.is_string()) return v.get<std::string>();
                if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
                return v.dump();
            };
            if (value.is_array())
                for (const auto& element : value) item.inputs.push_back(as_string(element));
            else
                item.inputs.push_back(as_string(value));
            items.push_back(std::move(item));
        }
        return items;
    }
};

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string quoted = "\"";
    for (char ch : cell) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

// --- dataset loading -----------------------------------------------------------

struct LoadedDataset {
    bool fir = false;
    mcc::ScalarEIVDataset scalar;
    mcc::VectorEIVDataset fir_data;
    nlohmann::json metadata;  // empty object when no sidecar exists

    std::size_t n() const { return fir ? fir_data.n : scalar.n; }
    std::optional<double> w0_abs() const {
        if (fir) return std::nullopt;
        if (scalar.w0) return std::abs(*scalar.w0);
        return std::nullopt;
    }
};

LoadedDataset load_dataset(const std::string& path) {
    LoadedDataset loaded;
    mcc::SeriesData series = mcc::read_series_csv(path);

    std::ifstream meta_in(mcc::sidecar_path(path));
    if (meta_in) {
        try {
            meta_in >> loaded.metadata;
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("metadata sidecar is not valid JSON: " + std::string(e.what()));
        }
    } else {
        loaded.metadata = nlohmann::json::object();
    }

    const std::string scenario = loaded.metadata.value("scenario", "scalar");
    if (scenario == "fir") {
        loaded.fir = true;
        const std::size_t p = loaded.metadata.value("p", std::size_t{0});
        if (p == 0) throw std::runtime_error("fir dataset metadata lacks the tap count 'p'");
        std::optional<Eigen::VectorXd> w0;
        if (loaded.metadata.contains("w0")) {
            const auto taps = loaded.metadata["w0"].get<std::vector<double>>();
            w0 = Eigen::Map<const Eigen::VectorXd>(taps.data(),
                                                   static_cast<Eigen::Index>(taps.size()));
        }
        loaded.fir_data = mcc::fir_from_series(std::move(series), p, std::move(w0));
    } else {
        std::optional<double> w0;
        if (loaded.metadata.contains("w0")) w0 = loaded.metadata["w0"].get<double>();
        loaded.scalar = mcc::scalar_from_series(std::move(series), w0);
    }
    return loaded;
}

// --- generate -------------------------------------------------------------------

struct GenerateOptions {
    std::string scenario = "scalar";
    double w0 = 3.0;
    std::vector<double> taps;
    std::size_t n = 1000;
    double alpha = 0.15, beta = 0.15;
    double mu_u = 10.0, mu_v = 10.0;
    double var_u = 0.001, var_v = 0.001;
    std::string input = "uniform2";
    double input_variance = 1.0;
    double input_magnitude = 1.5;
    std::uint64_t seed = 0;
    std::string output = "dataset.csv";
};

void run_generate(const GenerateOptions& opt) {
    if (opt.n == 0) throw CLI::ValidationError("--n", "sample count must be >= 1");
    const mcc::GaussianMixtureSpec u_spec{opt.alpha, opt.mu_u, opt.var_u};
    const mcc::GaussianMixtureSpec v_spec{opt.beta, opt.mu_v, opt.var_v};

    nlohmann::json meta;
    meta["scenario"] = opt.scenario;
    meta["n"] = opt.n;
    meta["seed"] = opt.seed;
    meta["noise_u"] = {{"weight", opt.alpha}, {"outlier_mean", opt.mu_u}, {"variance", opt.var_u}};
    meta["noise_v"] = {{"weight", opt.beta}, {"outlier_mean", opt.mu_v}, {"variance", opt.var_v}};

    if (opt.scenario == "scalar") {
        mcc::InputSampler input;
        const auto kind = mcc::InputSampler::kind_from_name(opt.input);
        if (kind == mcc::InputSampler::Kind::gaussian)
            input = mcc::InputSampler::gaussian(opt.input_variance);
        else if (kind == mcc::InputSampler::Kind::constant_magnitude)
            input = mcc::InputSampler::constant(opt.input_magnitude);
        else
            input = mcc::InputSampler::two_interval();
        const mcc::ScalarEIVDataset ds =
            mcc::generate_scalar_dataset(opt.w0, input, u_spec, v_spec, opt.n, opt.seed);
        mcc::write_series_csv(mcc::to_series(ds), opt.output);
        meta["w0"] = opt.w0;
        meta["input"] = input.kind_name();
        if (kind == mcc::InputSampler::Kind::gaussian) meta["input_variance"] = opt.input_variance;
        if (kind == mcc::InputSampler::Kind::constant_magnitude)
            meta["input_magnitude"] = opt.input_magnitude;
    } else if (opt.scenario == "fir") {
        std::vector<double> taps = opt.taps;
        if (taps.empty()) {
            const Eigen::VectorXd defaults = mcc::default_fir_taps();
            taps.assign(defaults.data(), defaults.data() + defaults.size());
        }
        const Eigen::VectorXd w0 =
            Eigen::Map<const Eigen::VectorXd>(taps.data(), static_cast<Eigen::Index>(taps.size()));
        const mcc::VectorEIVDataset ds = mcc::generate_fir_dataset(
            w0, opt.n, opt.input_variance, u_spec, v_spec, opt.seed);
        mcc::write_series_csv(mcc::to_series(ds), opt.output);
        meta["w0"] = taps;
        meta["p"] = taps.size();
        meta["input"] = "gaussian";
        meta["input_variance"] = opt.input_variance;
    } else {
        throw CLI::ValidationError("--scenario", "expected 'scalar' or 'fir'");
    }
    write_text_file(mcc::sidecar_path(opt.output), meta.dump(2) + "\n");
    std::cout << "wrote " << opt.output << " and " << mcc::sidecar_path(opt.output) << "\n";
}

// --- estimate -------------------------------------------------------------------

struct EstimateOptions {
    std::string data;
    std::vector<std::string> estimators = {"mse", "lad", "tls", "mcc"};
    std::optional<double> sigma;
    std::string solver = "fixed-point";
    double eps_u = 0.07, eps_v = 0.07;
    double lambda = 1.2;
    std::optional<double> w0_abs;
    double tol = 1e-8;
    int max_iters = 500;
    int grid_points = 2001;
    std::optional<double> search_lo, search_hi;
    int multistart = 3;
    int eda_population = 200, eda_elites = 50, eda_generations = 100;
    std::uint64_t seed = 0;
    std::string output = "estimates.csv";
};

/// Kernel width when --sigma is absent: Corollary-1 rule from the dataset's
/// retained noises.
double resolve_estimate_sigma(const EstimateOptions& opt, const LoadedDataset& dataset) {
    if (opt.sigma) return *opt.sigma;
    const std::optional<double> w0_abs = opt.w0_abs ? opt.w0_abs : dataset.w0_abs();
    if (dataset.fir)
        throw CLI::ValidationError("--sigma", "required for fir datasets (no kernel rule exists)");
    if (!w0_abs)
        throw CLI::ValidationError(
            "--sigma", "required when the dataset carries no w0 (or pass --w0-abs)");
    if (!dataset.scalar.u || !dataset.scalar.v)
        throw CLI::ValidationError("--sigma", "required when the dataset has no retained noises");
    const mcc::CleanSet clean = mcc::clean_index_set(dataset.scalar, opt.eps_u, opt.eps_v);
    const double combined = opt.eps_v + *w0_abs * opt.eps_u;
    if (combined == 0.0) return 1.0;
    const std::size_t n = dataset.scalar.n;
    const std::size_t m = std::min(std::max<std::size_t>(clean.m, n / 2 + 1), n - 1);
    const double ratio = static_cast<double>(m) / static_cast<double>(n - m);
    return opt.lambda * combined / std::sqrt(2.0 * std::log(ratio));
}

void run_estimate(const EstimateOptions& opt) {
    const LoadedDataset dataset = load_dataset(opt.data);

    mcc::MCCConfig config;
    config.solver = mcc::solver_from_name(opt.solver);
    config.tol = opt.tol;
    config.max_iters = opt.max_iters;
    config.grid_points = opt.grid_points;
    config.search_lo = opt.search_lo;
    config.search_hi = opt.search_hi;
    config.multistart = opt.multistart;
    config.eda_population = opt.eda_population;
    config.eda_elites = opt.eda_elites;
    config.eda_generations = opt.eda_generations;
    config.seed = mcc::derive_seed(opt.seed, "estimate");

    bool sigma_needed = false;
    for (const std::string& name : opt.estimators) sigma_needed |= name == "mcc";
    if (sigma_needed) config.sigma = resolve_estimate_sigma(opt, dataset);

    struct Row {
        std::string estimator;
        bool ok = false;
        mcc::EstimateResult result;
        std::string message;
    };
    std::vector<Row> rows;
    for (const std::string& name : opt.estimators) {
        Row row;
        row.estimator = name;
        try {
            if (!dataset.fir) {
                const mcc::ScalarEIVDataset& ds = dataset.scalar;
                if (name == "mse") row.result = mcc::mse_estimate(ds);
                else if (name == "lad") row.result = mcc::lad_estimate(ds);
                else if (name == "tls") row.result = mcc::tls_estimate(ds);
                else if (name == "mcc") {
                    switch (config.solver) {
                        case mcc::MCCSolver::grid: row.result = mcc::mcc_estimate_grid(ds, config); break;
                        case mcc::MCCSolver::eda: row.result = mcc::mcc_estimate_eda(ds, config); break;
                        case mcc::MCCSolver::gradient_ascent:
                            row.result = mcc::mcc_estimate_gradient(ds, config);
                            break;
                        default: row.result = mcc::mcc_estimate_fixed_point(ds, config); break;
                    }
                } else {
                    throw CLI::ValidationError("--estimators", "unknown estimator '" + name + "'");
                }
            } else {
                const mcc::VectorEIVDataset& ds = dataset.fir_data;
                if (name == "mse") row.result = mcc::mse_estimate(ds);
                else if (name == "lad") row.result = mcc::lad_estimate(ds);
                else if (name == "tls") row.result = mcc::tls_estimate(ds);
                else if (name == "mcc") {
                    switch (config.solver) {
                        case mcc::MCCSolver::eda: row.result = mcc::mcc_estimate_eda(ds, config); break;
                        case mcc::MCCSolver::fixed_point:
                            row.result = mcc::mcc_estimate_fixed_point(ds, config);
                            break;
                        default:
                            throw std::runtime_error("solver '" + opt.solver +
                                                     "' supports scalar datasets only");
                    }
                } else {
                    throw CLI::ValidationError("--estimators", "unknown estimator '" + name + "'");
                }
            }
            row.ok = true;
        } catch (const CLI::Error&) {
            throw;  // usage problems keep exit code 2
        } catch (const std::exception& e) {
            row.ok = false;
            row.message = e.what();
        }
        rows.push_back(std::move(row));
    }

    std::size_t w_dim = 1;
    for (const Row& row : rows)
        if (row.ok) w_dim = std::max(w_dim, row.result.w_hat.size());

    std::ostringstream csv;
    csv << "estimator,ok";
    if (w_dim == 1)
        csv << ",w_hat";
    else
        for (std::size_t k = 0; k < w_dim; ++k) csv << ",w_hat_" << k;
    csv << ",objective,iterations,converged,starts_tried,message\n";
    for (const Row& row : rows) {
        csv << row.estimator << ',' << (row.ok ? "true" : "false");
        for (std::size_t k = 0; k < w_dim; ++k) {
            csv << ',';
            if (row.ok && k < row.result.w_hat.size())
                csv << mcc::format_double(row.result.w_hat[k], 12);
        }
        if (row.ok) {
            csv << ',' << mcc::format_double(row.result.objective, 12) << ','
                << row.result.iterations << ',' << (row.result.converged ? "true" : "false") << ','
                << row.result.starts_tried << ',' << csv_escape(row.result.diagnostic);
        } else {
            csv << ",,,," << ',' << csv_escape(row.message);
        }
        csv << '\n';
    }
    write_text_file(opt.output, csv.str());
    std::cout << "wrote " << opt.output << "\n";
}

// --- bound ----------------------------------------------------------------------

struct BoundOptions {
    std::optional<std::string> data;
    std::optional<std::size_t> n, m;
    double eps_u = 0.07, eps_v = 0.07;
    std::optional<double> w0_abs, c, sigma, lambda;
    std::string output;
};

void run_bound(const BoundOptions& opt) {
    std::size_t n = 0, m = 0;
    double c = 0.0;
    double w0_abs = 0.0;
    std::string assumption_diag;

    if (opt.data) {
        const LoadedDataset dataset = load_dataset(*opt.data);
        const std::optional<double> meta_w0 = dataset.w0_abs();
        if (opt.w0_abs)
            w0_abs = *opt.w0_abs;
        else if (meta_w0)
            w0_abs = *meta_w0;
        else
            throw CLI::ValidationError("--w0-abs", "required when the dataset carries no w0");
        const mcc::AssumptionCheck check =
            dataset.fir ? mcc::check_assumptions(dataset.fir_data, opt.eps_u, opt.eps_v)
                        : mcc::check_assumptions(dataset.scalar, opt.eps_u, opt.eps_v);
        n = dataset.n();
        m = check.clean_set.m;
        c = check.clean_set.c.value_or(0.0);
        if (!check.admissible) assumption_diag = check.diagnostics;
    } else {
        if (!opt.n || !opt.m)
            throw CLI::ValidationError("bound", "pass --data, or at least --n and --m");
        n = *opt.n;
        m = *opt.m;
        c = opt.c.value_or(0.0);
        w0_abs = opt.w0_abs.value_or(0.0);
        if (!(m < n && 2 * m > n))
            assumption_diag = "Assumption 1 violated: need n > m > n/2, got n=" +
                              std::to_string(n) + ", m=" + std::to_string(m);
        else if (!(c > 0.0))
            assumption_diag = "Assumption 2 violated: need c > 0";
        else if (opt.eps_u > 0.0 && !opt.w0_abs)
            throw CLI::ValidationError("--w0-abs", "required when eps_u > 0");
    }

    const double combined = opt.eps_v + w0_abs * opt.eps_u;
    mcc::BoundReport report;
    if (!assumption_diag.empty()) {
        report.inputs.n = n;
        report.inputs.m = m;
        report.inputs.eps_u = opt.eps_u;
        report.inputs.eps_v = opt.eps_v;
        report.inputs.w0_abs = w0_abs;
        report.inputs.c = c;
        report.inputs.sigma = opt.sigma;
        report.inputs.lambda = opt.lambda;
        report.sigma = opt.sigma;
        report.combined_eps = combined;
        report.admissible = false;
        report.failure_reason = assumption_diag;
        report.formula = combined == 0.0 ? mcc::BoundFormula::corollary2
                         : opt.sigma     ? mcc::BoundFormula::theorem1
                                         : mcc::BoundFormula::corollary1;
    } else if (combined == 0.0) {
        if (!opt.sigma)
            throw CLI::ValidationError("--sigma", "required when the combined deviation is 0");
        report = mcc::xi_corollary2(n, m, *opt.sigma, c);
    } else if (opt.sigma) {
        mcc::BoundInputs inputs;
        inputs.n = n;
        inputs.m = m;
        inputs.eps_u = opt.eps_u;
        inputs.eps_v = opt.eps_v;
        inputs.w0_abs = w0_abs;
        inputs.c = c;
        inputs.sigma = opt.sigma;
        report = mcc::xi_theorem1(inputs);
    } else {
        report = mcc::xi_corollary1(n, m, opt.lambda.value_or(1.2), c, opt.eps_u, opt.eps_v,
                                    w0_abs);
    }

    const auto record = mcc::bound_record(report);
    std::ostringstream csv;
    for (std::size_t i = 0; i < record.size(); ++i) csv << (i ? "," : "") << record[i].first;
    csv << '\n';
    for (std::size_t i = 0; i < record.size(); ++i)
        csv << (i ? "," : "") << csv_escape(record[i].second);
    csv << '\n';
    if (opt.output.empty())
        std::cout << csv.str();
    else {
        write_text_file(opt.output, csv.str());
        std::cout << "wrote " << opt.output << "\n";
    }
}

// --- sweep ----------------------------------------------------------------------

struct SweepOptions {
    std::string preset;
    std::optional<std::string> parameter;
    std::vector<double> values;
    std::optional<std::string> scenario;
    std::optional<double> w0;
    std::vector<double> taps;
    std::optional<std::size_t> n;
    std::optional<int> runs;
    std::optional<double> alpha, beta, mu_u, mu_v, var_u, var_v, eps_u, eps_v, lambda;
    std::optional<double> sigma, sigma_fir, input_variance;
    std::vector<std::string> estimators;
    std::optional<int> grid_points;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string output;
};

void run_sweep(const SweepOptions& opt) {
    mcc::SweepSpec spec;
    if (!opt.preset.empty()) {
        spec = mcc::preset_sweep(opt.preset);
    } else {
        if (!opt.parameter || opt.values.empty())
            throw CLI::ValidationError("--preset",
                                       "pass a preset, or --param plus --values for a custom sweep");
        spec.parameter = mcc::sweep_parameter_from_name(*opt.parameter);
        spec.values = opt.values;
    }
    if (opt.parameter && !opt.preset.empty())
        throw CLI::ValidationError("--param", "cannot override a preset's swept parameter");

    mcc::ExperimentConfig& cfg = spec.fixed;
    if (opt.scenario) cfg.scenario = mcc::scenario_from_name(*opt.scenario);
    if (opt.w0) cfg.w0 = *opt.w0;
    if (!opt.taps.empty())
        cfg.w0_fir = Eigen::Map<const Eigen::VectorXd>(opt.taps.data(),
                                                       static_cast<Eigen::Index>(opt.taps.size()));
    if (cfg.scenario == mcc::Scenario::fir && cfg.w0_fir.size() == 0)
        cfg.w0_fir = mcc::default_fir_taps();
    if (opt.n) cfg.n = *opt.n;
    if (opt.runs) cfg.runs = *opt.runs;
    if (opt.alpha) cfg.alpha = *opt.alpha;
    if (opt.beta) cfg.beta = *opt.beta;
    if (opt.mu_u) cfg.mu_u = *opt.mu_u;
    if (opt.mu_v) cfg.mu_v = *opt.mu_v;
    if (opt.var_u) cfg.var_u = *opt.var_u;
    if (opt.var_v) cfg.var_v = *opt.var_v;
    if (opt.eps_u) cfg.eps_u = *opt.eps_u;
    if (opt.eps_v) cfg.eps_v = *opt.eps_v;
    if (opt.lambda) cfg.lambda = *opt.lambda;
    if (opt.sigma) cfg.sigma_override = *opt.sigma;
    if (opt.sigma_fir) cfg.sigma_fir = *opt.sigma_fir;
    if (opt.input_variance) cfg.input_variance = *opt.input_variance;
    if (!opt.estimators.empty()) {
        cfg.estimators.clear();
        for (const std::string& name : opt.estimators)
            cfg.estimators.push_back(mcc::estimator_from_name(name));
    }
    if (opt.grid_points) cfg.grid_points = *opt.grid_points;
    cfg.master_seed = opt.seed;
    cfg.threads = opt.threads;

    const std::string output =
        !opt.output.empty() ? opt.output
                            : (!spec.name.empty() ? spec.name + ".csv" : std::string("sweep.csv"));
    const mcc::SweepSummary summary = mcc::run_sweep(spec);
    mcc::write_summary_csv(summary, output);
    std::string manifest = output;
    if (manifest.size() > 4 && manifest.compare(manifest.size() - 4, 4, ".csv") == 0)
        manifest.resize(manifest.size() - 4);
    manifest += ".manifest.json";
    mcc::write_manifest(spec, manifest);
    std::cout << "wrote " << output << " and " << manifest << "\n";
}

// --- verify ---------------------------------------------------------------------

struct VerifyOptions {
    int trials = 200;
    std::uint64_t seed = 0;
    std::string output;
};

int run_verify(const VerifyOptions& opt) {
    if (opt.trials < 1) throw CLI::ValidationError("--trials", "must be >= 1");
    const mcc::VerifyReport report = mcc::verify_bound_property(opt.trials, opt.seed);
    const std::string text = report.to_text();
    std::cout << text;
    if (!opt.output.empty()) write_text_file(opt.output, text);
    return report.total_violations() == 0 ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust errors-in-variables estimation under the maximum correntropy criterion"};
    app.set_version_flag("--version", "mcceiv 0.1.0");
    app.require_subcommand(1);

    int exit_code = kExitOk;

    auto configure = [](CLI::App* sub) {
        sub->config_formatter(std::make_shared<JsonConfig>());
        sub->set_config("--config", "", "flat JSON config file mirroring the long flag names");
    };

    // generate
    auto gen = std::make_shared<GenerateOptions>();
    CLI::App* generate = app.add_subcommand("generate", "synthesize a dataset CSV + metadata");
    configure(generate);
    generate->add_option("--scenario", gen->scenario, "scalar | fir")->capture_default_str();
    generate->add_option("--w0", gen->w0, "true scalar parameter")->capture_default_str();
    generate->add_option("--taps", gen->taps, "fir taps (comma separated)")->delimiter(',');
    generate->add_option("--n", gen->n, "sample count")->capture_default_str();
    generate->add_option("--alpha", gen->alpha, "input outlier proportion")->capture_default_str();
    generate->add_option("--beta", gen->beta, "output outlier proportion")->capture_default_str();
    generate->add_option("--mu-u", gen->mu_u, "input outlier location")->capture_default_str();
    generate->add_option("--mu-v", gen->mu_v, "output outlier location")->capture_default_str();
    generate->add_option("--var-u", gen->var_u, "input noise variance")->capture_default_str();
    generate->add_option("--var-v", gen->var_v, "output noise variance")->capture_default_str();
    generate->add_option("--input", gen->input, "uniform2 | gaussian | const")
        ->capture_default_str();
    generate->add_option("--input-variance", gen->input_variance, "gaussian input variance")
        ->capture_default_str();
    generate->add_option("--input-magnitude", gen->input_magnitude, "const input magnitude")
        ->capture_default_str();
    generate->add_option("--seed", gen->seed, "master seed (default 0)")
        ->envname("MCCEIV_SEED")
        ->capture_default_str();
    generate->add_option("--output", gen->output, "dataset CSV path")->capture_default_str();
    generate->callback([gen] { run_generate(*gen); });

    // estimate
    auto est = std::make_shared<EstimateOptions>();
    CLI::App* estimate = app.add_subcommand("estimate", "fit estimators to a dataset CSV");
    configure(estimate);
    estimate->add_option("--data", est->data, "dataset CSV path")->required();
    estimate->add_option("--estimators", est->estimators, "subset of mse,lad,tls,mcc")
        ->delimiter(',')
        ->capture_default_str();
    estimate->add_option("--sigma", est->sigma, "MCC kernel width (default: Corollary-1 rule)");
    estimate->add_option("--solver", est->solver, "fixed-point | grid | eda | gradient-ascent")
        ->capture_default_str();
    estimate->add_option("--eps-u", est->eps_u, "clean-noise threshold")->capture_default_str();
    estimate->add_option("--eps-v", est->eps_v, "clean-noise threshold")->capture_default_str();
    estimate->add_option("--lambda", est->lambda, "kernel rule multiplier")->capture_default_str();
    estimate->add_option("--w0-abs", est->w0_abs, "|w0| for the kernel rule");
    estimate->add_option("--tol", est->tol, "convergence threshold")->capture_default_str();
    estimate->add_option("--max-iters", est->max_iters)->capture_default_str();
    estimate->add_option("--grid-points", est->grid_points)->capture_default_str();
    estimate->add_option("--search-lo", est->search_lo, "search interval low end");
    estimate->add_option("--search-hi", est->search_hi, "search interval high end");
    estimate->add_option("--multistart", est->multistart)->capture_default_str();
    estimate->add_option("--eda-population", est->eda_population)->capture_default_str();
    estimate->add_option("--eda-elites", est->eda_elites)->capture_default_str();
    estimate->add_option("--eda-generations", est->eda_generations)->capture_default_str();
    estimate->add_option("--seed", est->seed, "master seed (default 0)")
        ->envname("MCCEIV_SEED")
        ->capture_default_str();
    estimate->add_option("--output", est->output, "results CSV path")->capture_default_str();
    estimate->callback([est] { run_estimate(*est); });

    // bound
    auto bnd = std::make_shared<BoundOptions>();
    CLI::App* bound = app.add_subcommand("bound", "evaluate the estimation-error bound");
    configure(bound);
    bound->add_option("--data", bnd->data, "dataset CSV with retained noises");
    bound->add_option("--n", bnd->n, "total sample count");
    bound->add_option("--m", bnd->m, "clean-set cardinality");
    bound->add_option("--eps-u", bnd->eps_u, "clean-noise threshold")->capture_default_str();
    bound->add_option("--eps-v", bnd->eps_v, "clean-noise threshold")->capture_default_str();
    bound->add_option("--w0-abs", bnd->w0_abs, "|w0|");
    bound->add_option("--c", bnd->c, "min clean observed-input magnitude");
    bound->add_option("--sigma", bnd->sigma, "kernel width (Theorem-1 path)");
    bound->add_option("--lambda", bnd->lambda, "threshold multiple (Corollary-1 path)");
    bound->add_option("--output", bnd->output, "write the record here instead of stdout");
    bound->callback([bnd] { run_bound(*bnd); });

    // sweep
    auto swp = std::make_shared<SweepOptions>();
    CLI::App* sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep");
    configure(sweep);
    sweep->add_option("--preset", swp->preset,
                      "table1 | table2 | fig4-alpha | fig5-sigma | fig6-fir | fig7-fir");
    sweep->add_option("--param", swp->parameter, "custom sweep parameter");
    sweep->add_option("--values", swp->values, "custom sweep values")->delimiter(',');
    sweep->add_option("--scenario", swp->scenario, "scalar | fir");
    sweep->add_option("--w0", swp->w0, "true scalar parameter");
    sweep->add_option("--taps", swp->taps, "fir taps")->delimiter(',');
    sweep->add_option("--n", swp->n, "sample count");
    sweep->add_option("--runs", swp->runs, "Monte Carlo replicates per point");
    sweep->add_option("--alpha", swp->alpha);
    sweep->add_option("--beta", swp->beta);
    sweep->add_option("--mu-u", swp->mu_u);
    sweep->add_option("--mu-v", swp->mu_v);
    sweep->add_option("--var-u", swp->var_u);
    sweep->add_option("--var-v", swp->var_v);
    sweep->add_option("--eps-u", swp->eps_u);
    sweep->add_option("--eps-v", swp->eps_v);
    sweep->add_option("--lambda", swp->lambda);
    sweep->add_option("--sigma", swp->sigma, "explicit kernel width override");
    sweep->add_option("--sigma-fir", swp->sigma_fir, "fir kernel width");
    sweep->add_option("--input-variance", swp->input_variance);
    sweep->add_option("--estimators", swp->estimators, "subset of mse,lad,tls,mcc")
        ->delimiter(',');
    sweep->add_option("--grid-points", swp->grid_points);
    sweep->add_option("--seed", swp->seed, "master seed (default 0)")
        ->envname("MCCEIV_SEED")
        ->capture_default_str();
    sweep->add_option("--threads", swp->threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    sweep->add_option("--output", swp->output, "summary CSV path (default <preset>.csv)");
    sweep->callback([swp] { run_sweep(*swp); });

    // verify
    auto ver = std::make_shared<VerifyOptions>();
    CLI::App* verify = app.add_subcommand("verify", "property-check the error bound");
    configure(verify);
    verify->add_option("--trials", ver->trials, "number of random configurations")
        ->capture_default_str();
    verify->add_option("--seed", ver->seed, "master seed (default 0)")
        ->envname("MCCEIV_SEED")
        ->capture_default_str();
    verify->add_option("--output", ver->output, "also write the report here");
    verify->callback([ver, &exit_code] { exit_code = run_verify(*ver); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return exit_code;
}

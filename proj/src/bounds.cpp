#include "mcc/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mcc/format.hpp"

namespace mcc {

namespace {

void require_assumption1(std::size_t n, std::size_t m) {
    if (!(m < n && 2 * m > n))
        throw std::invalid_argument("Assumption 1 violated: need n > m > n/2, got n=" +
                                    std::to_string(n) + ", m=" + std::to_string(m));
}

void require_positive_c(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("Assumption 2 violated: need c > 0");
}

BoundReport make_inadmissible(BoundInputs inputs, BoundFormula formula, std::string reason) {
    BoundReport report;
    report.combined_eps = inputs.combined_eps();
    report.inputs = std::move(inputs);
    report.formula = formula;
    report.admissible = false;
    report.failure_reason = std::move(reason);
    return report;
}

}  // namespace

const char* to_string(BoundFormula formula) {
    switch (formula) {
        case BoundFormula::theorem1: return "theorem1";
        case BoundFormula::corollary1: return "corollary1";
        case BoundFormula::corollary2: return "corollary2";
    }
    return "unknown";
}

double sigma_threshold(std::size_t n, std::size_t m, double eps_u, double eps_v, double w0_abs) {
    require_assumption1(n, m);
    if (!(eps_u >= 0.0) || !(eps_v >= 0.0) || !(w0_abs >= 0.0))
        throw std::invalid_argument("sigma_threshold: thresholds and |w0| must be >= 0");
    const double combined = eps_v + w0_abs * eps_u;
    if (combined == 0.0) return 0.0;
    const double ratio = static_cast<double>(m) / static_cast<double>(n - m);
    return combined / std::sqrt(2.0 * std::log(ratio));
}

BoundReport xi_theorem1(const BoundInputs& inputs) {
    require_assumption1(inputs.n, inputs.m);
    require_positive_c(inputs.c);
    if (!inputs.sigma) throw std::invalid_argument("xi_theorem1: kernel width sigma is required");
    const double sigma = *inputs.sigma;
    if (!(sigma > 0.0)) throw std::invalid_argument("xi_theorem1: sigma must be > 0");

    const double combined = inputs.combined_eps();
    const double threshold = sigma_threshold(inputs.n, inputs.m, inputs.eps_u, inputs.eps_v,
                                             inputs.w0_abs);
    const BoundFormula formula =
        combined == 0.0 ? BoundFormula::corollary2 : BoundFormula::theorem1;

    BoundReport report;
    report.inputs = inputs;
    report.combined_eps = combined;
    report.sigma_threshold = threshold;
    report.sigma = sigma;
    report.formula = formula;

    if (!(sigma > threshold)) {
        report.failure_reason = "sigma at or below the admissibility threshold";
        return report;
    }
    const double outlier_ratio =
        static_cast<double>(inputs.n - inputs.m) / static_cast<double>(inputs.m);
    const double inner = std::exp(-combined * combined / (2.0 * sigma * sigma)) - outlier_ratio;
    // sigma > threshold makes inner > 0 mathematically; guard the float range
    // so a denormal does not turn into an overflow-scale bound.
    if (!(inner > 1e-300)) {
        report.failure_reason = "inner log argument vanished (sigma too close to threshold)";
        return report;
    }
    // inner < 1 always holds: exp(.) <= 1 and the outlier ratio is positive.
    report.xi = (std::sqrt(-2.0 * sigma * sigma * std::log(inner)) + combined) / inputs.c;
    report.admissible = true;
    return report;
}

BoundReport xi_corollary1(std::size_t n, std::size_t m, double lambda, double c, double eps_u,
                          double eps_v, double w0_abs) {
    require_assumption1(n, m);
    require_positive_c(c);
    if (!(lambda > 1.0)) throw std::invalid_argument("xi_corollary1: lambda must be > 1");
    const double combined = eps_v + w0_abs * eps_u;
    if (!(combined > 0.0))
        throw std::invalid_argument(
            "xi_corollary1: combined deviation is zero; use xi_corollary2");

    BoundInputs inputs;
    inputs.n = n;
    inputs.m = m;
    inputs.eps_u = eps_u;
    inputs.eps_v = eps_v;
    inputs.w0_abs = w0_abs;
    inputs.c = c;
    inputs.lambda = lambda;

    const double r = static_cast<double>(n - m) / static_cast<double>(m);
    const double threshold = combined / std::sqrt(2.0 * std::log(1.0 / r));
    const double sigma = lambda * threshold;
    const double diff = std::pow(r, 1.0 / (lambda * lambda)) - r;

    BoundReport report;
    report.inputs = inputs;
    report.combined_eps = combined;
    report.sigma_threshold = threshold;
    report.sigma = sigma;
    report.formula = BoundFormula::corollary1;
    if (!(diff > 0.0)) {
        // lambda so close to 1 that r^(1/lambda^2) - r underflows.
        report.failure_reason = "inner difference vanished (lambda too close to 1)";
        return report;
    }
    report.xi = (lambda * std::sqrt(std::log(diff) / std::log(r)) + 1.0) * combined / c;
    report.admissible = true;
    return report;
}

BoundReport xi_corollary2(std::size_t n, std::size_t m, double sigma, double c) {
    require_assumption1(n, m);
    require_positive_c(c);
    if (!(sigma > 0.0)) throw std::invalid_argument("xi_corollary2: sigma must be > 0");

    BoundInputs inputs;
    inputs.n = n;
    inputs.m = m;
    inputs.c = c;
    inputs.sigma = sigma;

    BoundReport report;
    report.inputs = inputs;
    report.combined_eps = 0.0;
    report.sigma_threshold = 0.0;
    report.sigma = sigma;
    report.formula = BoundFormula::corollary2;
    const double ratio = static_cast<double>(m) / static_cast<double>(2 * m - n);
    report.xi = sigma / c * std::sqrt(2.0 * std::log(ratio));
    report.admissible = true;
    return report;
}

namespace {

AssumptionCheck check_impl(CleanSet clean, std::size_t n) {
    AssumptionCheck check;
    check.assumption1_ok = clean.m < n && 2 * clean.m > n;
    check.assumption2_ok = clean.c.has_value() && *clean.c > 0.0;
    check.admissible = check.assumption1_ok && check.assumption2_ok;

    std::ostringstream diag;
    if (2 * clean.m <= n)
        diag << "Assumption 1 violated: clean-set cardinality m=" << clean.m
             << " is not larger than n/2 (n=" << n << "). ";
    else if (clean.m >= n)
        diag << "Assumption 1 violated: clean set covers all samples (m=n=" << n
             << "); at least one contaminated sample is required. ";
    if (!check.assumption2_ok) {
        if (clean.m == 0)
            diag << "Assumption 2 violated: clean set is empty, c undefined.";
        else
            diag << "Assumption 2 violated: minimum clean observed-input magnitude is "
                 << (clean.c ? *clean.c : 0.0) << ", need c > 0.";
    }
    if (check.admissible) diag << "ok";
    check.diagnostics = diag.str();
    check.clean_set = std::move(clean);
    return check;
}

}  // namespace

AssumptionCheck check_assumptions(const ScalarEIVDataset& dataset, double eps_u, double eps_v) {
    return check_impl(clean_index_set(dataset, eps_u, eps_v), dataset.n);
}

AssumptionCheck check_assumptions(const VectorEIVDataset& dataset, double eps_u, double eps_v) {
    return check_impl(clean_index_set(dataset, eps_u, eps_v), dataset.n);
}

std::vector<std::pair<std::string, std::string>> bound_record(const BoundReport& report) {
    auto fmt = [](double v) { return format_double(v, 12); };
    std::vector<std::pair<std::string, std::string>> record;
    record.emplace_back("n", std::to_string(report.inputs.n));
    record.emplace_back("m", std::to_string(report.inputs.m));
    record.emplace_back("eps_u", fmt(report.inputs.eps_u));
    record.emplace_back("eps_v", fmt(report.inputs.eps_v));
    record.emplace_back("w0_abs", fmt(report.inputs.w0_abs));
    record.emplace_back("c", fmt(report.inputs.c));
    record.emplace_back("sigma", report.sigma ? fmt(*report.sigma) : "");
    record.emplace_back("lambda", report.inputs.lambda ? fmt(*report.inputs.lambda) : "");
    record.emplace_back("combined_eps", fmt(report.combined_eps));
    record.emplace_back("sigma_threshold", fmt(report.sigma_threshold));
    record.emplace_back("xi", report.xi ? fmt(*report.xi) : "");
    record.emplace_back("formula", to_string(report.formula));
    record.emplace_back("admissible", report.admissible ? "true" : "false");
    record.emplace_back("failure_reason", report.failure_reason);
    return record;
}

}  // namespace mcc

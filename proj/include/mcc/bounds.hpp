#ifndef MCC_BOUNDS_HPP
#define MCC_BOUNDS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcc/model.hpp"

namespace mcc {

/// Inputs for the estimation-error bound. Requires n > m > n/2 (more clean
/// samples than contaminated ones, and at least one contaminated sample) and
/// c > 0 (clean observed inputs bounded away from zero).
struct BoundInputs {
    std::size_t n = 0;  // total sample count
    std::size_t m = 0;  // clean-set cardinality
    double eps_u = 0.0;
    double eps_v = 0.0;
    double w0_abs = 0.0;
    double c = 0.0;                // min clean observed-input magnitude
    std::optional<double> sigma;   // kernel width (direct path)
    std::optional<double> lambda;  // multiplier > 1 (threshold-multiple path)

    double combined_eps() const { return eps_v + w0_abs * eps_u; }
};

enum class BoundFormula { theorem1, corollary1, corollary2 };

const char* to_string(BoundFormula formula);

struct BoundReport {
    BoundInputs inputs;
    double combined_eps = 0.0;
    double sigma_threshold = 0.0;
    std::optional<double> sigma;  // kernel width used (given or implied by lambda)
    std::optional<double> xi;
    BoundFormula formula = BoundFormula::theorem1;
    bool admissible = false;
    std::string failure_reason;
};

/// Minimal admissible kernel width:
///   (eps_v + |w0| eps_u) / sqrt(2 ln(m/(n-m))),
/// or 0 when the combined deviation vanishes (any sigma > 0 admissible).
/// Throws on an n/m pair outside n > m > n/2.
double sigma_threshold(std::size_t n, std::size_t m, double eps_u, double eps_v, double w0_abs);

/// Error bound at an explicit kernel width:
///   xi = (1/c) ( sqrt(-2 sigma^2 ln(exp(-E^2/(2 sigma^2)) - (n-m)/m)) + E ),
/// with E the combined deviation. Inadmissible (no xi) when sigma is at or
/// below the threshold, or when the inner log argument vanishes numerically.
BoundReport xi_theorem1(const BoundInputs& inputs);

/// Error bound with sigma tied to lambda > 1 times the threshold; with
/// r = (n-m)/m,
///   xi = (E/c) ( lambda sqrt( ln(r^(1/lambda^2) - r) / ln r ) + 1 ).
/// Requires a positive combined deviation (use corollary 2 otherwise).
BoundReport xi_corollary1(std::size_t n, std::size_t m, double lambda, double c, double eps_u,
                          double eps_v, double w0_abs);

/// Zero-deviation bound: xi = (sigma/c) sqrt(2 ln(m/(2m-n))).
BoundReport xi_corollary2(std::size_t n, std::size_t m, double sigma, double c);

/// Assumption check over a dataset with retained noises. Violations are
/// reported, never thrown; sweeps legitimately cross into inadmissible
/// regions and must record that.
struct AssumptionCheck {
    CleanSet clean_set;
    bool assumption1_ok = false;  // n > m > n/2
    bool assumption2_ok = false;  // clean observed inputs bounded away from 0
    bool admissible = false;
    std::string diagnostics;
};

AssumptionCheck check_assumptions(const ScalarEIVDataset& dataset, double eps_u, double eps_v);
AssumptionCheck check_assumptions(const VectorEIVDataset& dataset, double eps_u, double eps_v);

/// Flat key-value serialization of a report, in stable order.
std::vector<std::pair<std::string, std::string>> bound_record(const BoundReport& report);

}  // namespace mcc

#endif

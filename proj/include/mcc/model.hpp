#ifndef MCC_MODEL_HPP
#define MCC_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mcc {

/// Three-component symmetric Gaussian mixture:
///   weight/2 * N(-mu, var) + (1-weight) * N(0, var) + weight/2 * N(+mu, var).
/// Implied mean is 0; implied variance is var + weight * mu^2.
///
/// variance == 0 is accepted as a degenerate Dirac mixture (draws return the
/// component mean exactly); it is what noise-free datasets are built from.
struct GaussianMixtureSpec {
    double weight = 0.0;        // outlier proportion, in [0, 1]
    double outlier_mean = 0.0;  // |location| of the outlier components, >= 0
    double variance = 1.0;      // shared component variance, >= 0

    /// Throws std::invalid_argument when the invariants fail.
    void validate() const;

    /// var + weight * mu^2.
    double total_variance() const { return variance + weight * outlier_mean * outlier_mean; }
};

/// True-input distribution for scalar dataset synthesis.
struct InputSampler {
    enum class Kind { two_interval_uniform, gaussian, constant_magnitude };

    Kind kind = Kind::two_interval_uniform;
    double variance = 1.0;   // gaussian only
    double magnitude = 1.5;  // constant_magnitude only

    /// Uniform over [-2,-1] U [1,2]: random sign, magnitude uniform in [1,2].
    static InputSampler two_interval();
    /// Zero-mean Gaussian with the given variance.
    static InputSampler gaussian(double variance);
    /// Fixed magnitude, random sign.
    static InputSampler constant(double magnitude);

    double draw(std::mt19937_64& rng) const;

    std::string kind_name() const;
    static Kind kind_from_name(const std::string& name);
};

/// Scalar errors-in-variables dataset:
///   x_obs[i] = x[i] + u[i]         (observed input)
///   d[i]     = w0 * x[i] + v[i]    (observed output)
/// x, u, v and w0 are retained for synthetic data and absent for externally
/// loaded data that only carries the observed pairs.
struct ScalarEIVDataset {
    std::size_t n = 0;
    std::optional<std::vector<double>> x, u, v;
    std::vector<double> x_obs;
    std::vector<double> d;
    std::optional<double> w0;
};

/// FIR (tapped-delay) errors-in-variables dataset. Row i of x_obs_rows is
/// [x_obs[i], x_obs[i-1], ..., x_obs[i-p+1]] of the noisy input series,
/// zero-padded before time 0; the first p-1 rows are transient.
struct VectorEIVDataset {
    std::size_t n = 0;
    std::size_t p = 0;
    Eigen::MatrixXd x_obs_rows;  // n x p
    Eigen::VectorXd d;           // n
    std::optional<Eigen::VectorXd> w0;
    // Underlying series, retained for clean-set bookkeeping and file I/O.
    std::optional<std::vector<double>> x, u, v;
    std::vector<double> x_obs_series;
};

/// Sample indices whose true noises satisfy |u[i]| <= eps_u and
/// |v[i]| <= eps_v (ties count as clean). c is the minimum observed-input
/// magnitude over the set, defined only when the set is nonempty.
struct CleanSet {
    std::vector<std::size_t> indices;
    std::size_t m = 0;
    double eps_u = 0.0;
    double eps_v = 0.0;
    std::optional<double> c;
};

/// n independent mixture draws from `rng`. Component chosen with
/// probabilities weight/2, 1-weight, weight/2; Gaussian draw within it.
std::vector<double> sample_mixture(const GaussianMixtureSpec& spec, std::size_t n,
                                   std::mt19937_64& rng);

/// Single mixture draw.
double draw_mixture(const GaussianMixtureSpec& spec, std::mt19937_64& rng);

/// Synthesizes a scalar EIV dataset. Fully reproducible for a fixed seed;
/// x, u and v use independent sub-streams of `seed`.
ScalarEIVDataset generate_scalar_dataset(double w0, const InputSampler& input,
                                         const GaussianMixtureSpec& u_spec,
                                         const GaussianMixtureSpec& v_spec, std::size_t n,
                                         std::uint64_t seed);

/// Synthesizes an n-sample FIR EIV dataset with |w0| taps. The true input is
/// zero-mean Gaussian with `input_variance`; input noise is added to the raw
/// series before tap-delay expansion, so one noise entry is shared by the
/// overlapping regressors. Clean outputs use zero initial conditions.
VectorEIVDataset generate_fir_dataset(const Eigen::VectorXd& w0, std::size_t n,
                                      double input_variance, const GaussianMixtureSpec& u_spec,
                                      const GaussianMixtureSpec& v_spec, std::uint64_t seed);

CleanSet clean_index_set(const ScalarEIVDataset& dataset, double eps_u, double eps_v);
CleanSet clean_index_set(const VectorEIVDataset& dataset, double eps_u, double eps_v);

// ---------------------------------------------------------------------------
// File formats. Datasets round-trip through a CSV with header
// `i,x,u,v,x_obs,d` (one row per sample, >= 15 significant digits); columns
// for unavailable series stay empty. Generation settings and w0 live in a
// JSON sidecar next to the CSV.
// ---------------------------------------------------------------------------

/// Series container mirroring the CSV layout, shared by both scenarios.
struct SeriesData {
    std::optional<std::vector<double>> x, u, v;
    std::vector<double> x_obs;
    std::vector<double> d;
};

SeriesData to_series(const ScalarEIVDataset& dataset);
SeriesData to_series(const VectorEIVDataset& dataset);
ScalarEIVDataset scalar_from_series(SeriesData series, std::optional<double> w0);
VectorEIVDataset fir_from_series(SeriesData series, std::size_t p,
                                 std::optional<Eigen::VectorXd> w0);

std::string series_to_csv(const SeriesData& series);
SeriesData series_from_csv(const std::string& text);
void write_series_csv(const SeriesData& series, const std::string& path);
SeriesData read_series_csv(const std::string& path);

/// foo.csv -> foo.meta.json (appends when the extension is unexpected).
std::string sidecar_path(const std::string& csv_path);

}  // namespace mcc

#endif

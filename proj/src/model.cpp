#include "mcc/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mcc/format.hpp"
#include "mcc/rng.hpp"

namespace mcc {

void GaussianMixtureSpec::validate() const {
    if (!(weight >= 0.0 && weight <= 1.0))
        throw std::invalid_argument("GaussianMixtureSpec: weight must lie in [0, 1]");
    if (!(outlier_mean >= 0.0))
        throw std::invalid_argument("GaussianMixtureSpec: outlier mean must be >= 0");
    if (!(variance >= 0.0))
        throw std::invalid_argument("GaussianMixtureSpec: variance must be nonnegative");
}

InputSampler InputSampler::two_interval() { return InputSampler{Kind::two_interval_uniform, 1.0, 1.5}; }

InputSampler InputSampler::gaussian(double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("InputSampler: gaussian variance must be > 0");
    return InputSampler{Kind::gaussian, variance, 1.5};
}

InputSampler InputSampler::constant(double magnitude) {
    if (!(magnitude > 0.0)) throw std::invalid_argument("InputSampler: magnitude must be > 0");
    return InputSampler{Kind::constant_magnitude, 1.0, magnitude};
}

double InputSampler::draw(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    switch (kind) {
        case Kind::two_interval_uniform: {
            const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
            std::uniform_real_distribution<double> mag(1.0, 2.0);
            return sign * mag(rng);
        }
        case Kind::gaussian: {
            std::normal_distribution<double> normal(0.0, std::sqrt(variance));
            return normal(rng);
        }
        case Kind::constant_magnitude: {
            const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
            return sign * magnitude;
        }
    }
    throw std::logic_error("InputSampler: unknown kind");
}

std::string InputSampler::kind_name() const {
    switch (kind) {
        case Kind::two_interval_uniform: return "two_interval_uniform";
        case Kind::gaussian: return "gaussian";
        case Kind::constant_magnitude: return "constant_magnitude";
    }
    return "unknown";
}

InputSampler::Kind InputSampler::kind_from_name(const std::string& name) {
    if (name == "two_interval_uniform" || name == "uniform2") return Kind::two_interval_uniform;
    if (name == "gaussian") return Kind::gaussian;
    if (name == "constant_magnitude" || name == "const") return Kind::constant_magnitude;
    throw std::invalid_argument("InputSampler: unknown kind name '" + name + "'");
}

double draw_mixture(const GaussianMixtureSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = unit(rng);
    double mean = 0.0;
    if (r < spec.weight / 2.0)
        mean = -spec.outlier_mean;
    else if (r < spec.weight)
        mean = spec.outlier_mean;
    if (spec.variance == 0.0) return mean;  // degenerate Dirac component
    std::normal_distribution<double> normal(mean, std::sqrt(spec.variance));
    return normal(rng);
}

std::vector<double> sample_mixture(const GaussianMixtureSpec& spec, std::size_t n,
                                   std::mt19937_64& rng) {
    spec.validate();
    if (n == 0) throw std::invalid_argument("sample_mixture: n must be >= 1");
    std::vector<double> out(n);
    for (auto& value : out) value = draw_mixture(spec, rng);
    return out;
}

ScalarEIVDataset generate_scalar_dataset(double w0, const InputSampler& input,
                                         const GaussianMixtureSpec& u_spec,
                                         const GaussianMixtureSpec& v_spec, std::size_t n,
                                         std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("generate_scalar_dataset: n must be >= 1");
    u_spec.validate();
    v_spec.validate();

    auto gx = make_stream(seed, "x");
    auto gu = make_stream(seed, "u");
    auto gv = make_stream(seed, "v");

    ScalarEIVDataset ds;
    ds.n = n;
    ds.w0 = w0;
    std::vector<double> x(n), u(n), v(n);
    ds.x_obs.resize(n);
    ds.d.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = input.draw(gx);
    for (std::size_t i = 0; i < n; ++i) u[i] = draw_mixture(u_spec, gu);
    for (std::size_t i = 0; i < n; ++i) v[i] = draw_mixture(v_spec, gv);
    for (std::size_t i = 0; i < n; ++i) {
        ds.x_obs[i] = x[i] + u[i];
        ds.d[i] = w0 * x[i] + v[i];
    }
    ds.x = std::move(x);
    ds.u = std::move(u);
    ds.v = std::move(v);
    return ds;
}

VectorEIVDataset generate_fir_dataset(const Eigen::VectorXd& w0, std::size_t n,
                                      double input_variance, const GaussianMixtureSpec& u_spec,
                                      const GaussianMixtureSpec& v_spec, std::uint64_t seed) {
    const std::size_t p = static_cast<std::size_t>(w0.size());
    if (p == 0) throw std::invalid_argument("generate_fir_dataset: w0 must have at least one tap");
    if (n < p) throw std::invalid_argument("generate_fir_dataset: need n >= p samples");
    if (!(input_variance > 0.0))
        throw std::invalid_argument("generate_fir_dataset: input variance must be > 0");
    u_spec.validate();
    v_spec.validate();

    auto gx = make_stream(seed, "x");
    auto gu = make_stream(seed, "u");
    auto gv = make_stream(seed, "v");

    std::vector<double> x(n), u(n), v(n);
    std::normal_distribution<double> normal(0.0, std::sqrt(input_variance));
    for (std::size_t i = 0; i < n; ++i) x[i] = normal(gx);
    for (std::size_t i = 0; i < n; ++i) u[i] = draw_mixture(u_spec, gu);
    for (std::size_t i = 0; i < n; ++i) v[i] = draw_mixture(v_spec, gv);

    VectorEIVDataset ds;
    ds.n = n;
    ds.p = p;
    ds.w0 = w0;
    ds.x_obs_series.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.x_obs_series[i] = x[i] + u[i];

    ds.x_obs_rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    ds.d.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double clean = 0.0;
        for (std::size_t k = 0; k < p; ++k) {
            const bool has_history = i >= k;
            ds.x_obs_rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                has_history ? ds.x_obs_series[i - k] : 0.0;
            if (has_history) clean += w0(static_cast<Eigen::Index>(k)) * x[i - k];
        }
        ds.d(static_cast<Eigen::Index>(i)) = clean + v[i];
    }
    ds.x = std::move(x);
    ds.u = std::move(u);
    ds.v = std::move(v);
    return ds;
}

namespace {

CleanSet clean_set_impl(const std::vector<double>& u, const std::vector<double>& v,
                        const std::vector<double>& x_obs, double eps_u, double eps_v) {
    if (!(eps_u >= 0.0) || !(eps_v >= 0.0))
        throw std::invalid_argument("clean_index_set: thresholds must be >= 0");
    CleanSet set;
    set.eps_u = eps_u;
    set.eps_v = eps_v;
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (std::abs(u[i]) <= eps_u && std::abs(v[i]) <= eps_v) {
            set.indices.push_back(i);
            c = std::min(c, std::abs(x_obs[i]));
        }
    }
    set.m = set.indices.size();
    if (set.m > 0) set.c = c;
    return set;
}

}  // namespace

CleanSet clean_index_set(const ScalarEIVDataset& dataset, double eps_u, double eps_v) {
    if (!dataset.u || !dataset.v)
        throw std::invalid_argument("clean_index_set: dataset does not retain true noises");
    return clean_set_impl(*dataset.u, *dataset.v, dataset.x_obs, eps_u, eps_v);
}

CleanSet clean_index_set(const VectorEIVDataset& dataset, double eps_u, double eps_v) {
    if (!dataset.u || !dataset.v)
        throw std::invalid_argument("clean_index_set: dataset does not retain true noises");
    return clean_set_impl(*dataset.u, *dataset.v, dataset.x_obs_series, eps_u, eps_v);
}

SeriesData to_series(const ScalarEIVDataset& dataset) {
    return SeriesData{dataset.x, dataset.u, dataset.v, dataset.x_obs, dataset.d};
}

SeriesData to_series(const VectorEIVDataset& dataset) {
    SeriesData series;
    series.x = dataset.x;
    series.u = dataset.u;
    series.v = dataset.v;
    series.x_obs = dataset.x_obs_series;
    series.d.resize(static_cast<std::size_t>(dataset.d.size()));
    Eigen::VectorXd::Map(series.d.data(), dataset.d.size()) = dataset.d;
    return series;
}

ScalarEIVDataset scalar_from_series(SeriesData series, std::optional<double> w0) {
    ScalarEIVDataset ds;
    ds.n = series.x_obs.size();
    ds.x = std::move(series.x);
    ds.u = std::move(series.u);
    ds.v = std::move(series.v);
    ds.x_obs = std::move(series.x_obs);
    ds.d = std::move(series.d);
    ds.w0 = w0;
    if (ds.n == 0 || ds.d.size() != ds.n)
        throw std::invalid_argument("scalar_from_series: malformed series");
    return ds;
}

VectorEIVDataset fir_from_series(SeriesData series, std::size_t p,
                                 std::optional<Eigen::VectorXd> w0) {
    const std::size_t n = series.x_obs.size();
    if (p == 0) throw std::invalid_argument("fir_from_series: p must be >= 1");
    if (n < p || series.d.size() != n)
        throw std::invalid_argument("fir_from_series: malformed series");
    VectorEIVDataset ds;
    ds.n = n;
    ds.p = p;
    ds.w0 = std::move(w0);
    ds.x = std::move(series.x);
    ds.u = std::move(series.u);
    ds.v = std::move(series.v);
    ds.x_obs_series = std::move(series.x_obs);
    ds.x_obs_rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k)
            ds.x_obs_rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                i >= k ? ds.x_obs_series[i - k] : 0.0;
    ds.d = Eigen::Map<const Eigen::VectorXd>(series.d.data(), static_cast<Eigen::Index>(n));
    return ds;
}

std::string series_to_csv(const SeriesData& series) {
    const std::size_t n = series.x_obs.size();
    if (series.d.size() != n) throw std::invalid_argument("series_to_csv: length mismatch");
    auto cell = [](const std::optional<std::vector<double>>& col, std::size_t i) {
        return col ? format_double((*col)[i]) : std::string();
    };
    std::string out = "i,x,u,v,x_obs,d\n";
    for (std::size_t i = 0; i < n; ++i) {
        out += std::to_string(i);
        out += ',';
        out += cell(series.x, i);
        out += ',';
        out += cell(series.u, i);
        out += ',';
        out += cell(series.v, i);
        out += ',';
        out += format_double(series.x_obs[i]);
        out += ',';
        out += format_double(series.d[i]);
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const char* col) {
    try {
        std::size_t pos = 0;
        const double value = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing junk");
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument("dataset CSV: bad numeric value in column " +
                                    std::string(col) + " at row " + std::to_string(row));
    }
}

}  // namespace

SeriesData series_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("dataset CSV: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "i,x,u,v,x_obs,d")
        throw std::invalid_argument("dataset CSV: expected header 'i,x,u,v,x_obs,d'");

    std::vector<double> x, u, v, x_obs, d;
    bool have_x = true, have_u = true, have_v = true;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 6)
            throw std::invalid_argument("dataset CSV: row " + std::to_string(row) +
                                        " has " + std::to_string(cells.size()) + " cells");
        have_x = have_x && !cells[1].empty();
        have_u = have_u && !cells[2].empty();
        have_v = have_v && !cells[3].empty();
        if (have_x) x.push_back(parse_cell(cells[1], row, "x"));
        if (have_u) u.push_back(parse_cell(cells[2], row, "u"));
        if (have_v) v.push_back(parse_cell(cells[3], row, "v"));
        x_obs.push_back(parse_cell(cells[4], row, "x_obs"));
        d.push_back(parse_cell(cells[5], row, "d"));
        ++row;
    }
    if (row == 0) throw std::invalid_argument("dataset CSV: no data rows");

    SeriesData series;
    if (have_x && x.size() == row) series.x = std::move(x);
    if (have_u && u.size() == row) series.u = std::move(u);
    if (have_v && v.size() == row) series.v = std::move(v);
    series.x_obs = std::move(x_obs);
    series.d = std::move(d);
    return series;
}

void write_series_csv(const SeriesData& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << series_to_csv(series);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

SeriesData read_series_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return series_from_csv(buf.str());
}

std::string sidecar_path(const std::string& csv_path) {
    const std::string ext = ".csv";
    if (csv_path.size() > ext.size() &&
        csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0)
        return csv_path.substr(0, csv_path.size() - ext.size()) + ".meta.json";
    return csv_path + ".meta.json";
}

}  // namespace mcc

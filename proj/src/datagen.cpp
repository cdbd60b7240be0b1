#include "kanlab/datagen.hpp"

#include "kanlab/csv.hpp"
#include "kanlab/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kanlab {

void ArConfig::validate() const {
    if (order < 1) throw std::invalid_argument("ArConfig: order must be >= 1");
    const double noise_var =
        1.0 - rho1 * rho1 - static_cast<double>(order - 1) * rho2 * rho2;
    if (!(noise_var > 0.0))
        throw std::invalid_argument("ArConfig: 1 - rho1^2 - (N-1)*rho2^2 = " +
                                    std::to_string(noise_var) + ", must be positive");
    if (length <= 10 * lags())
        throw std::invalid_argument("ArConfig: length " + std::to_string(length) +
                                    " too short for p = " + std::to_string(lags()));
}

void TargetSpec::validate() const {
    if (!(omega_low > 0.0) || !(omega_mid > 0.0) || !(omega_high > 0.0))
        throw std::invalid_argument("TargetSpec: frequencies must be positive");
    if (noise_sd < 0.0) throw std::invalid_argument("TargetSpec: noise_sd must be >= 0");
}

std::vector<double> generate_ar(const ArConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.order;
    const double noise_scale =
        std::sqrt(1.0 - cfg.rho1 * cfg.rho1 - static_cast<double>(n - 1) * cfg.rho2 * cfg.rho2);

    RandomStream rng(mix_seed(cfg.seed, stream::series));
    std::vector<double> state(n, 0.0); // state[0] = x_{t-1}, state[1] = x_{t-2}, ...
    const std::size_t burn_in = 10 * n;
    std::vector<double> out;
    out.reserve(cfg.length);
    for (std::size_t t = 0; t < burn_in + cfg.length; ++t) {
        double x = cfg.rho1 * state[0];
        for (std::size_t i = 1; i < n; ++i) x += cfg.rho2 * state[i];
        x += noise_scale * rng.normal();
        for (std::size_t i = n; i-- > 1;) state[i] = state[i - 1];
        state[0] = x;
        if (t >= burn_in) out.push_back(x);
    }
    return out;
}

WindowSet build_windows(const std::vector<double>& series, std::size_t p) {
    if (p == 0) throw std::invalid_argument("build_windows: p must be positive");
    if (series.size() <= p + 1)
        throw std::invalid_argument("build_windows: series length " +
                                    std::to_string(series.size()) +
                                    " too short for window length " + std::to_string(p));
    const std::size_t rows = series.size() - p;
    WindowSet ws;
    ws.x = Matrix(rows, p);
    ws.time.resize(rows);
    for (std::size_t w = 0; w < rows; ++w) {
        const std::size_t t = w + p - 1; // newest lag of this row
        ws.time[w] = t;
        for (std::size_t j = 0; j < p; ++j) ws.x(w, j) = series[t - j];
    }
    return ws;
}

Standardizer fit_standardizer(const Matrix& x, std::size_t train_rows) {
    if (train_rows < 2)
        throw std::invalid_argument("fit_standardizer: need at least 2 training rows");
    if (train_rows > x.rows())
        throw std::invalid_argument("fit_standardizer: train_rows exceeds row count");
    const std::size_t p = x.cols();
    Standardizer std_;
    std_.means.assign(p, 0.0);
    std_.sds.assign(p, 0.0);
    const double inv_n = 1.0 / static_cast<double>(train_rows);
    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < train_rows; ++i) mean += x(i, j);
        mean *= inv_n;
        double var = 0.0;
        for (std::size_t i = 0; i < train_rows; ++i) {
            const double d = x(i, j) - mean;
            var += d * d;
        }
        var *= inv_n;
        if (!(var > 0.0))
            throw std::invalid_argument("fit_standardizer: column " + std::to_string(j) +
                                        " has zero variance (degenerate series)");
        std_.means[j] = mean;
        std_.sds[j] = std::sqrt(var);
    }
    return std_;
}

Matrix Standardizer::apply(const Matrix& x) const {
    if (x.cols() != means.size())
        throw std::invalid_argument("Standardizer: column count mismatch");
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j)
            out(i, j) = (x(i, j) - means[j]) / sds[j];
    return out;
}

namespace {

// Mean/population-sd normalization of v using its first train_rows entries.
void normalize_projection(std::vector<double>& v, std::size_t train_rows, const char* name) {
    double mean = 0.0;
    for (std::size_t i = 0; i < train_rows; ++i) mean += v[i];
    mean /= static_cast<double>(train_rows);
    double var = 0.0;
    for (std::size_t i = 0; i < train_rows; ++i) {
        const double d = v[i] - mean;
        var += d * d;
    }
    var /= static_cast<double>(train_rows);
    if (!(var > 0.0))
        throw std::invalid_argument(std::string("build_targets: projection ") + name +
                                    " is degenerate on training rows");
    const double inv_sd = 1.0 / std::sqrt(var);
    for (double& x : v) x = (x - mean) * inv_sd;
}

} // namespace

TargetBundle build_targets(const Matrix& x_std, const TargetSpec& spec, std::uint64_t seed,
                           std::size_t train_rows) {
    spec.validate();
    const std::size_t p = x_std.cols();
    if (p % 3 != 0)
        throw std::invalid_argument("build_targets: window length " + std::to_string(p) +
                                    " is not divisible by 3");
    if (train_rows < 2 || train_rows > x_std.rows())
        throw std::invalid_argument("build_targets: invalid training row count");

    const std::size_t rows = x_std.rows();
    // Repeating patterns along the lag axis: averaging and second difference.
    std::vector<double> w_easy(p), w_hard(p);
    for (std::size_t j = 0; j < p; ++j) {
        w_easy[j] = 1.0;
        w_hard[j] = (j % 3 == 1) ? -2.0 : 1.0;
    }

    TargetBundle tb;
    tb.v_easy.resize(rows);
    tb.v_hard.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        double ve = 0.0;
        double vh = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            ve += w_easy[j] * x_std(i, j);
            vh += w_hard[j] * x_std(i, j);
        }
        tb.v_easy[i] = ve;
        tb.v_hard[i] = vh;
    }
    normalize_projection(tb.v_easy, train_rows, "V_easy");
    normalize_projection(tb.v_hard, train_rows, "V_hard");

    RandomStream rng(mix_seed(seed, stream::target_noise));
    tb.y.resize(rows);
    tb.c_low.resize(rows);
    tb.c_mid.resize(rows);
    tb.c_high.resize(rows);
    tb.noise.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        tb.c_low[i] = std::sin(spec.omega_low * tb.v_easy[i]);
        tb.c_mid[i] = std::sin(spec.omega_mid * tb.v_hard[i]);
        tb.c_high[i] = std::sin(spec.omega_high * tb.v_hard[i]);
        tb.noise[i] = spec.noise_sd * rng.normal();
        tb.y[i] = tb.c_low[i] + tb.c_mid[i] + tb.c_high[i] + tb.noise[i];
    }
    return tb;
}

std::vector<double> sample_acf(const std::vector<double>& series, std::size_t max_lag) {
    if (series.size() <= 10 * max_lag)
        throw std::invalid_argument("sample_acf: series length " + std::to_string(series.size()) +
                                    " too short for max lag " + std::to_string(max_lag));
    const std::size_t n = series.size();
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(n);

    std::vector<double> r(max_lag + 1, 0.0);
    std::vector<double> centered(n);
    for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - mean;

    double c0 = 0.0;
    for (double x : centered) c0 += x * x;
    c0 /= static_cast<double>(n);
    if (!(c0 > 0.0)) throw std::invalid_argument("sample_acf: zero-variance series");

    r[0] = 1.0;
    for (std::size_t h = 1; h <= max_lag; ++h) {
        double c = 0.0;
        for (std::size_t t = 0; t + h < n; ++t) c += centered[t] * centered[t + h];
        c /= static_cast<double>(n);
        r[h] = c / c0;
    }
    return r;
}

std::size_t chronological_split(std::size_t rows, double ratio) {
    if (!(ratio > 0.0) || !(ratio < 1.0))
        throw std::invalid_argument("chronological_split: ratio must be in (0, 1)");
    const auto split = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(rows)));
    if (split == 0 || split >= rows)
        throw std::invalid_argument("chronological_split: split leaves an empty side (rows = " +
                                    std::to_string(rows) + ", ratio = " + std::to_string(ratio) +
                                    ")");
    return split;
}

Dataset make_dataset(const ArConfig& cfg, const TargetSpec& spec, double split_ratio) {
    const std::vector<double> series = generate_ar(cfg);
    WindowSet ws = build_windows(series, cfg.lags());

    Dataset ds;
    ds.split_index = chronological_split(ws.x.rows(), split_ratio);
    ds.standardizer = fit_standardizer(ws.x, ds.split_index);
    ds.inputs = ds.standardizer.apply(ws.x);
    ds.targets = build_targets(ds.inputs, spec, cfg.seed, ds.split_index);
    ds.windows = std::move(ws.x);
    ds.window_time = std::move(ws.time);
    return ds;
}

void Dataset::export_csv(const std::string& path) const {
    CsvTable table;
    table.header = {"t"};
    for (std::size_t j = 0; j < lag_count(); ++j)
        table.header.push_back("x_lag" + std::to_string(j));
    for (const char* name : {"y", "c_low", "c_mid", "c_high", "is_test"})
        table.header.emplace_back(name);

    table.rows.reserve(rows());
    for (std::size_t i = 0; i < rows(); ++i) {
        std::vector<std::string> row;
        row.reserve(table.header.size());
        row.push_back(std::to_string(window_time[i]));
        for (std::size_t j = 0; j < lag_count(); ++j)
            row.push_back(format_double(windows(i, j)));
        row.push_back(format_double(targets.y[i]));
        row.push_back(format_double(targets.c_low[i]));
        row.push_back(format_double(targets.c_mid[i]));
        row.push_back(format_double(targets.c_high[i]));
        row.push_back(i >= split_index ? "1" : "0");
        table.rows.push_back(std::move(row));
    }
    table.write(path);
}

Dataset Dataset::import_csv(const std::string& path) {
    const CsvTable table = CsvTable::read(path);
    std::size_t p = 0;
    while (true) {
        bool found = false;
        for (const auto& h : table.header)
            if (h == "x_lag" + std::to_string(p)) found = true;
        if (!found) break;
        ++p;
    }
    if (p == 0) throw std::runtime_error("Dataset::import_csv: no lag columns in " + path);

    const std::size_t rows = table.rows.size();
    Dataset ds;
    ds.windows = Matrix(rows, p);
    ds.window_time.resize(rows);
    ds.targets.y.resize(rows);
    ds.targets.c_low.resize(rows);
    ds.targets.c_mid.resize(rows);
    ds.targets.c_high.resize(rows);
    ds.targets.noise.resize(rows);
    ds.split_index = rows;

    const std::size_t col_t = table.column("t");
    const std::size_t col_y = table.column("y");
    const std::size_t col_low = table.column("c_low");
    const std::size_t col_mid = table.column("c_mid");
    const std::size_t col_high = table.column("c_high");
    const std::size_t col_test = table.column("is_test");
    std::vector<std::size_t> lag_cols(p);
    for (std::size_t j = 0; j < p; ++j) lag_cols[j] = table.column("x_lag" + std::to_string(j));

    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = table.rows[i];
        ds.window_time[i] = std::stoull(row[col_t]);
        for (std::size_t j = 0; j < p; ++j) ds.windows(i, j) = std::stod(row[lag_cols[j]]);
        ds.targets.y[i] = std::stod(row[col_y]);
        ds.targets.c_low[i] = std::stod(row[col_low]);
        ds.targets.c_mid[i] = std::stod(row[col_mid]);
        ds.targets.c_high[i] = std::stod(row[col_high]);
        // Recorded noise is recoverable exactly from the component bookkeeping.
        ds.targets.noise[i] =
            ds.targets.y[i] - (ds.targets.c_low[i] + ds.targets.c_mid[i] + ds.targets.c_high[i]);
        if (row[col_test] == "1" && i < ds.split_index) ds.split_index = i;
    }
    if (ds.split_index == 0 || ds.split_index > rows)
        throw std::runtime_error("Dataset::import_csv: malformed is_test column");
    if (ds.split_index < rows) {
        ds.standardizer = fit_standardizer(ds.windows, ds.split_index);
        ds.inputs = ds.standardizer.apply(ds.windows);
    }
    return ds;
}

} // namespace kanlab

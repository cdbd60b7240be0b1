#include "kanlab/trainer.hpp"

#include "kanlab/csv.hpp"
#include "kanlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kanlab {

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate <= 0");
    if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (epochs == 0) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("TrainConfig: betas must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("TrainConfig: epsilon must be positive");
}

void adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads, const TrainConfig& cfg) {
    if (state.m.size() != params.size() || grads.size() != params.size())
        throw std::invalid_argument("adam_step: length mismatch");
    for (double g : grads)
        if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

double recovered_amplitude(const std::vector<double>& pred,
                           const std::vector<double>& component) {
    if (pred.size() != component.size())
        throw std::invalid_argument("recovered_amplitude: length mismatch");
    if (pred.size() < 2) throw std::invalid_argument("recovered_amplitude: need >= 2 samples");
    const double n = static_cast<double>(pred.size());
    double mp = 0.0, mc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        mp += pred[i];
        mc += component[i];
    }
    mp /= n;
    mc /= n;
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        cov += (pred[i] - mp) * (component[i] - mc);
        var += (component[i] - mc) * (component[i] - mc);
    }
    cov /= n;
    var /= n;
    return std::clamp(cov / (var + 1e-8), 0.0, 1.0);
}

double component_error(const std::vector<double>& pred, const std::vector<double>& component) {
    const double a = recovered_amplitude(pred, component);
    return (1.0 - a) * (1.0 - a);
}

namespace {

struct TestSlices {
    Matrix inputs;
    std::vector<double> y;
    std::vector<double> c_low;
    std::vector<double> c_mid;
    std::vector<double> c_high;
};

TestSlices test_slices(const Matrix& inputs, const Dataset& ds) {
    const std::size_t t0 = ds.split_index;
    const std::size_t n = ds.rows() - t0;
    TestSlices ts;
    ts.inputs = Matrix(n, inputs.cols());
    ts.y.resize(n);
    ts.c_low.resize(n);
    ts.c_mid.resize(n);
    ts.c_high.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < inputs.cols(); ++j) ts.inputs(i, j) = inputs(t0 + i, j);
        ts.y[i] = ds.targets.y[t0 + i];
        ts.c_low[i] = ds.targets.c_low[t0 + i];
        ts.c_mid[i] = ds.targets.c_mid[t0 + i];
        ts.c_high[i] = ds.targets.c_high[t0 + i];
    }
    return ts;
}

double mse(const std::vector<double>& pred, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - y[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

} // namespace

RunHistory train(KanNetwork& net, const Matrix& inputs, const Dataset& ds,
                 const TrainConfig& cfg, const RunMeta& meta) {
    cfg.validate();
    if (inputs.rows() != ds.rows())
        throw std::invalid_argument("train: inputs/dataset row mismatch");
    if (ds.split_index == 0 || ds.split_index >= ds.rows())
        throw std::invalid_argument("train: dataset has no train/test split");

    const std::size_t train_rows = ds.split_index;
    const std::size_t p = inputs.cols();
    const TestSlices ts = test_slices(inputs, ds);

    RunHistory history;
    history.meta = meta;
    history.epochs.reserve(cfg.epochs);

    const auto evaluate = [&](EpochRecord& rec) {
        const ForwardCache out = net.forward(ts.inputs);
        rec.test_mse = mse(out.predictions, ts.y);
        rec.e_low = component_error(out.predictions, ts.c_low);
        rec.e_mid = component_error(out.predictions, ts.c_mid);
        rec.e_high = component_error(out.predictions, ts.c_high);
    };

    EpochRecord initial;
    evaluate(initial);
    history.initial_test_mse = initial.test_mse;

    AdamState adam(net.parameter_count());
    RandomStream shuffle_rng(mix_seed(cfg.seed, stream::shuffle));
    std::vector<std::size_t> order(train_rows);
    std::iota(order.begin(), order.end(), std::size_t{0});

    Matrix batch;
    std::vector<double> batch_y;
    std::vector<double> residuals;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < train_rows; start += cfg.batch_size) {
            const std::size_t bsz = std::min(cfg.batch_size, train_rows - start);
            batch = Matrix(bsz, p);
            batch_y.resize(bsz);
            for (std::size_t i = 0; i < bsz; ++i) {
                const std::size_t row = order[start + i];
                for (std::size_t j = 0; j < p; ++j) batch(i, j) = inputs(row, j);
                batch_y[i] = ds.targets.y[row];
            }
            const ForwardCache cache = net.forward(batch);
            residuals.resize(bsz);
            const double scale = 2.0 / static_cast<double>(bsz);
            for (std::size_t i = 0; i < bsz; ++i)
                residuals[i] = scale * (cache.predictions[i] - batch_y[i]);
            const std::vector<double> grads = net.backward(cache, residuals);
            adam_step(adam, net.parameters(), grads, cfg);
        }

        EpochRecord rec;
        rec.epoch = epoch;
        evaluate(rec);
        if (!std::isfinite(rec.test_mse))
            throw std::runtime_error("train: diverged at epoch " + std::to_string(epoch));
        history.epochs.push_back(rec);
    }

    history.final_params = net.parameters();
    return history;
}

SweepTable aggregate_runs(const std::vector<RunHistory>& histories) {
    if (histories.empty()) throw std::invalid_argument("aggregate_runs: no runs");
    const std::size_t order_n = histories.front().meta.order;
    const std::size_t epochs = histories.front().epochs.size();
    for (const RunHistory& h : histories) {
        if (h.meta.order != order_n)
            throw std::invalid_argument("aggregate_runs: mixed AR orders");
        if (h.epochs.size() != epochs)
            throw std::invalid_argument("aggregate_runs: mixed epoch counts");
    }

    // Group keys in deterministic order.
    std::vector<std::pair<std::string, double>> keys;
    for (const RunHistory& h : histories) {
        const std::pair<std::string, double> key{h.meta.variant, h.meta.rho1};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());

    SweepTable table;
    for (const auto& [variant, rho1] : keys) {
        std::vector<const RunHistory*> group;
        for (const RunHistory& h : histories)
            if (h.meta.variant == variant && h.meta.rho1 == rho1) group.push_back(&h);

        for (std::size_t e = 0; e < epochs; ++e) {
            SweepRow row;
            row.variant = variant;
            row.order = order_n;
            row.rho1 = rho1;
            row.epoch = group.front()->epochs[e].epoch;
            row.runs = group.size();
            const double n = static_cast<double>(group.size());
            const auto stats = [&](auto select, double& mean_out, double& sd_out) {
                double mean = 0.0;
                for (const RunHistory* h : group) mean += select(h->epochs[e]);
                mean /= n;
                double var = 0.0;
                for (const RunHistory* h : group) {
                    const double d = select(h->epochs[e]) - mean;
                    var += d * d;
                }
                mean_out = mean;
                sd_out = std::sqrt(var / n);
            };
            stats([](const EpochRecord& r) { return r.test_mse; }, row.test_mse_mean,
                  row.test_mse_sd);
            stats([](const EpochRecord& r) { return r.e_low; }, row.e_low_mean, row.e_low_sd);
            stats([](const EpochRecord& r) { return r.e_mid; }, row.e_mid_mean, row.e_mid_sd);
            stats([](const EpochRecord& r) { return r.e_high; }, row.e_high_mean, row.e_high_sd);
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

void write_history_csv(const std::vector<RunHistory>& histories, const std::string& path) {
    CsvTable table;
    table.header = {"variant", "N", "rho1", "seed", "epoch", "test_mse", "e_low", "e_mid",
                    "e_high"};
    for (const RunHistory& h : histories)
        for (const EpochRecord& rec : h.epochs)
            table.rows.push_back({h.meta.variant, std::to_string(h.meta.order),
                                  format_double(h.meta.rho1), std::to_string(h.meta.seed),
                                  std::to_string(rec.epoch), format_double(rec.test_mse),
                                  format_double(rec.e_low), format_double(rec.e_mid),
                                  format_double(rec.e_high)});
    table.write(path);
}

std::vector<RunHistory> read_history_csv(const std::string& path) {
    const CsvTable table = CsvTable::read(path);
    const std::size_t c_variant = table.column("variant");
    const std::size_t c_order = table.column("N");
    const std::size_t c_rho = table.column("rho1");
    const std::size_t c_seed = table.column("seed");
    const std::size_t c_epoch = table.column("epoch");
    const std::size_t c_mse = table.column("test_mse");
    const std::size_t c_low = table.column("e_low");
    const std::size_t c_mid = table.column("e_mid");
    const std::size_t c_high = table.column("e_high");

    std::vector<RunHistory> histories;
    for (const auto& row : table.rows) {
        RunMeta meta;
        meta.variant = row[c_variant];
        meta.order = std::stoull(row[c_order]);
        meta.rho1 = std::stod(row[c_rho]);
        meta.seed = std::stoull(row[c_seed]);
        if (histories.empty() || histories.back().meta.variant != meta.variant ||
            histories.back().meta.order != meta.order ||
            histories.back().meta.rho1 != meta.rho1 || histories.back().meta.seed != meta.seed) {
            histories.emplace_back();
            histories.back().meta = meta;
        }
        EpochRecord rec;
        rec.epoch = std::stoull(row[c_epoch]);
        rec.test_mse = std::stod(row[c_mse]);
        rec.e_low = std::stod(row[c_low]);
        rec.e_mid = std::stod(row[c_mid]);
        rec.e_high = std::stod(row[c_high]);
        histories.back().epochs.push_back(rec);
    }
    return histories;
}

void write_sweep_csv(const SweepTable& table, const std::string& path) {
    CsvTable out;
    out.header = {"variant",      "N",          "rho1",       "epoch",      "runs",
                  "test_mse_mean", "test_mse_sd", "e_low_mean", "e_low_sd",  "e_mid_mean",
                  "e_mid_sd",     "e_high_mean", "e_high_sd"};
    for (const SweepRow& r : table.rows)
        out.rows.push_back({r.variant, std::to_string(r.order), format_double(r.rho1),
                            std::to_string(r.epoch), std::to_string(r.runs),
                            format_double(r.test_mse_mean), format_double(r.test_mse_sd),
                            format_double(r.e_low_mean), format_double(r.e_low_sd),
                            format_double(r.e_mid_mean), format_double(r.e_mid_sd),
                            format_double(r.e_high_mean), format_double(r.e_high_sd)});
    out.write(path);
}

} // namespace kanlab

#include "kanlab/experiment.hpp"

#include "kanlab/csv.hpp"
#include "kanlab/dct.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace kanlab {

void ExperimentConfig::validate() const {
    if (ar_configs.empty()) throw std::invalid_argument("ExperimentConfig: no AR configurations");
    if (rho_grid.empty()) throw std::invalid_argument("ExperimentConfig: empty rho grid");
    if (variants.empty()) throw std::invalid_argument("ExperimentConfig: no variants");
    for (const std::string& v : variants)
        if (v != "kan" && v != "dct-kan")
            throw std::invalid_argument("ExperimentConfig: unknown variant '" + v + "'");
    for (const ArVariant& ar : ar_configs) {
        if (ar.order < 1) throw std::invalid_argument("ExperimentConfig: AR order must be >= 1");
        for (double rho : rho_grid) {
            ArConfig probe{ar.order, rho, ar.rho2, length, 0};
            probe.validate();
        }
    }
    if (seeds == 0) throw std::invalid_argument("ExperimentConfig: need at least one seed");
    if (hidden == 0) throw std::invalid_argument("ExperimentConfig: hidden width must be >= 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0))
        throw std::invalid_argument("ExperimentConfig: split_ratio must lie in (0, 1)");
    grid.validate();
    train.validate();
    target.validate();
}

std::string ExperimentConfig::canonical() const {
    // jobs is deliberately excluded: worker count never changes results.
    std::ostringstream out;
    out << "ar_configs=";
    for (std::size_t i = 0; i < ar_configs.size(); ++i)
        out << (i ? ";" : "") << ar_configs[i].order << ":" << format_double(ar_configs[i].rho2);
    out << "\nrho_grid=";
    for (std::size_t i = 0; i < rho_grid.size(); ++i)
        out << (i ? ";" : "") << format_double(rho_grid[i]);
    out << "\nvariants=";
    for (std::size_t i = 0; i < variants.size(); ++i) out << (i ? ";" : "") << variants[i];
    out << "\nomega_low=" << format_double(target.omega_low)
        << "\nomega_mid=" << format_double(target.omega_mid)
        << "\nomega_high=" << format_double(target.omega_high)
        << "\nnoise_sd=" << format_double(target.noise_sd)
        << "\nlearning_rate=" << format_double(train.learning_rate)
        << "\nbatch_size=" << train.batch_size << "\nepochs=" << train.epochs
        << "\nbeta1=" << format_double(train.beta1) << "\nbeta2=" << format_double(train.beta2)
        << "\nepsilon=" << format_double(train.epsilon) << "\nlength=" << length
        << "\nsplit_ratio=" << format_double(split_ratio) << "\nseeds=" << seeds
        << "\nbase_seed=" << base_seed << "\nhidden=" << hidden
        << "\ngrid_lo=" << format_double(grid.lo) << "\ngrid_hi=" << format_double(grid.hi)
        << "\ngrid_count=" << grid.count << "\nlayernorm=" << (options.layernorm ? 1 : 0)
        << "\nbase_path=" << (options.base_path ? 1 : 0) << "\n";
    return out.str();
}

std::vector<std::uint64_t> ExperimentConfig::seed_list() const {
    std::vector<std::uint64_t> list(seeds);
    for (std::size_t i = 0; i < seeds; ++i) list[i] = base_seed + i;
    return list;
}

RunHistory run_single(const ExperimentConfig& cfg, const ArVariant& ar, double rho1,
                      const std::string& variant, std::uint64_t seed) {
    const ArConfig acfg{ar.order, rho1, ar.rho2, cfg.length, seed};
    const Dataset ds = make_dataset(acfg, cfg.target, cfg.split_ratio);
    const std::size_t p = ds.lag_count();

    Matrix inputs;
    if (variant == "kan") {
        inputs = ds.inputs;
    } else if (variant == "dct-kan") {
        const Matrix transformed = apply_dct(dct_matrix(p), ds.inputs);
        const Standardizer restd = fit_standardizer(transformed, ds.split_index);
        inputs = restd.apply(transformed);
    } else {
        throw std::invalid_argument("run_single: unknown variant '" + variant + "'");
    }

    KanNetwork net =
        KanNetwork::initialized({p, cfg.hidden, 1}, cfg.grid, cfg.options, seed);
    TrainConfig tc = cfg.train;
    tc.seed = seed;
    const RunMeta meta{variant, ar.order, rho1, seed};
    return train(net, inputs, ds, tc, meta);
}

std::vector<RunHistory> run_grid(const ExperimentConfig& cfg, const ArVariant& ar) {
    cfg.validate();
    struct Task {
        std::string variant;
        double rho1;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (const std::string& variant : cfg.variants)
        for (double rho : cfg.rho_grid)
            for (std::uint64_t seed : cfg.seed_list()) tasks.push_back({variant, rho, seed});

    std::vector<RunHistory> results(tasks.size());
    std::size_t jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, tasks.size());

    if (jobs <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            results[i] = run_single(cfg, ar, tasks[i].rho1, tasks[i].variant, tasks[i].seed);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                results[i] = run_single(cfg, ar, tasks[i].rho1, tasks[i].variant, tasks[i].seed);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(tasks.size());
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

ResidualStudyRow residual_study(double rho1, std::size_t samples, std::size_t p,
                                const SplineBasisSpec& spec, std::uint64_t seed) {
    if (samples < 100) throw std::invalid_argument("residual_study: need at least 100 samples");
    const ArConfig acfg{1, rho1, 0.0, samples + p, seed};
    const std::vector<double> series = generate_ar(acfg);
    const WindowSet ws = build_windows(series, p);

    // Stationary study: standardize with statistics over all rows.
    const Standardizer std_ = fit_standardizer(ws.x, ws.x.rows());
    const Matrix x_std = std_.apply(ws.x);

    const EmpiricalHessian emp = empirical_hessian(x_std, spec);
    const Matrix r = toeplitz_from_acf(sample_acf(series, p - 1));
    const MomentBundle mb = basis_moments(spec, Density::gaussian);
    const HessianBundle lead = leading_order_hessian(mb, r);

    ResidualStudyRow row;
    row.rho1 = rho1;
    row.samples = ws.x.rows();
    row.p = p;
    row.report = residual_report(emp.m, lead.m);
    row.clamp_fraction = emp.clamp_fraction;
    row.clamp_warning = emp.clamp_warning;
    return row;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_checksum: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a_hex(buf.str());
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::string& canonical_config,
                    const std::vector<std::uint64_t>& seeds,
                    const std::map<std::string, std::string>& artifact_checksums) {
    nlohmann::json j;
    j["command"] = command;
    j["config_hash"] = fnv1a_hex(canonical_config);
    j["seeds"] = seeds;
    j["artifacts"] = artifact_checksums;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_manifest: cannot open " + path);
    out << j.dump(2) << "\n";
}

namespace {

std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series, bool log_y) {
    constexpr double width = 720, height = 480;
    constexpr double ml = 80, mr = 24, mt = 48, mb = 56;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
    constexpr std::size_t palette_n = sizeof(palette) / sizeof(palette[0]);

    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool any = false;
    for (const SvgSeries& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
            if (log_y) {
                if (!(y > 0.0)) continue;
                y = std::log10(y);
            }
            if (!any) {
                xmin = xmax = s.x[i];
                ymin = ymax = y;
                any = true;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    if (!any) throw std::invalid_argument("write_svg_lines: no plottable points");
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    const auto py = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_svg_lines: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    // Axes and ticks.
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double fx = xmin + (xmax - xmin) * t / 4.0;
        const double fy = ymin + (ymax - ymin) * t / 4.0;
        out << "<line x1=\"" << svg_num(px(fx)) << "\" y1=\"" << height - mb << "\" x2=\""
            << svg_num(px(fx)) << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << svg_num(px(fx)) << "\" y=\"" << height - mb + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(fx) << "</text>\n";
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << svg_num(py(fy)) << "\" x2=\"" << ml
            << "\" y2=\"" << svg_num(py(fy)) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << svg_num(py(fy) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << (mt + height - mb) / 2 << ")\">" << y_label
        << (log_y ? " (log scale)" : "") << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % palette_n];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            double y = series[s].y[i];
            if (!std::isfinite(series[s].x[i]) || !std::isfinite(y)) continue;
            if (log_y) {
                if (!(y > 0.0)) continue;
                y = std::log10(y);
            }
            out << (first ? "" : " ") << svg_num(px(series[s].x[i])) << "," << svg_num(py(y));
            first = false;
        }
        out << "\"/>\n";
        const double ly = mt + 16.0 * static_cast<double>(s);
        out << "<line x1=\"" << width - mr - 150 << "\" y1=\"" << ly << "\" x2=\""
            << width - mr - 130 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - mr - 124 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << series[s].name
            << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace kanlab

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kanlab/bspline.hpp"
#include "kanlab/datagen.hpp"
#include "kanlab/dct.hpp"
#include "kanlab/experiment.hpp"
#include "kanlab/fastkan.hpp"
#include "kanlab/theory.hpp"
#include "kanlab/trainer.hpp"

#include <vector>

namespace py = pybind11;
using namespace kanlab;

namespace {

std::vector<std::vector<double>> to_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        rows[i].assign(m.row(i).begin(), m.row(i).end());
    return rows;
}

py::dict condition_summary(double rho, std::size_t p, std::size_t grid, std::size_t degree,
                           const std::string& density) {
    const SplineBasisSpec spec{grid, degree, -1.0, 1.0};
    const MomentBundle mb = basis_moments(spec, density_from_name(density));
    const Matrix r = ar1_correlation(rho, p);
    const HessianBundle hb = leading_order_hessian(mb, r);
    const BoundsReport rep = theorem_bounds(r, mb, hb);

    py::dict out;
    out["lambda_max"] = hb.lambda_max;
    out["lambda_p"] = hb.lambda_p;
    out["kappa"] = hb.kappa_tsf;
    out["null_dim"] = hb.degenerate_count;
    out["pass"] = rep.pass;
    out["kappa_lo"] = rep.kappa_bound.lo;
    out["kappa_hi"] = rep.kappa_bound.hi;
    return out;
}

py::dict mode_decay(double rho, std::size_t p, std::size_t grid, std::size_t degree,
                    double eta_scale, std::size_t steps, std::uint64_t seed) {
    const SplineBasisSpec spec{grid, degree, -1.0, 1.0};
    const MomentBundle mb = basis_moments(spec, Density::uniform);
    const HessianBundle hb = leading_order_hessian(mb, ar1_correlation(rho, p));
    const ModeDecayResult res = mode_decay_sim(hb, eta_scale / hb.lambda_max, steps, seed);

    py::dict out;
    out["eigenvalues"] = res.eigenvalues;
    out["fitted_rates"] = res.fitted_rates;
    out["predicted_rates"] = res.predicted_rates;
    out["relative_errors"] = res.relative_errors;
    out["included"] = std::vector<bool>(res.included.begin(), res.included.end());
    return out;
}

py::dict residual(double rho, std::size_t samples, std::size_t p, std::uint64_t seed) {
    const SplineBasisSpec spec{8, 3, -4.0, 4.0};
    const ResidualStudyRow row = residual_study(rho, samples, p, spec, seed);
    py::dict out;
    out["res_norm"] = row.report.res_norm;
    out["rel_res"] = row.report.rel_res;
    out["max_eig_dev"] = row.report.max_eig_dev;
    out["weyl_ok"] = row.report.weyl_ok;
    out["clamp_fraction"] = row.clamp_fraction;
    return out;
}

py::dict train_run(std::size_t order, double rho1, double rho2, const std::string& variant,
                   std::uint64_t seed, std::size_t epochs, std::size_t length,
                   std::size_t hidden) {
    ExperimentConfig cfg;
    cfg.train.epochs = epochs;
    cfg.length = length;
    cfg.hidden = hidden;
    const RunHistory run = run_single(cfg, ArVariant{order, rho2}, rho1, variant, seed);

    std::vector<double> mse, e_low, e_mid, e_high;
    for (const EpochRecord& e : run.epochs) {
        mse.push_back(e.test_mse);
        e_low.push_back(e.e_low);
        e_mid.push_back(e.e_mid);
        e_high.push_back(e.e_high);
    }
    py::dict out;
    out["variant"] = run.meta.variant;
    out["initial_mse"] = run.initial_test_mse;
    out["final_mse"] = mse.back();
    out["mse"] = mse;
    out["e_low"] = e_low;
    out["e_mid"] = e_mid;
    out["e_high"] = e_high;
    return out;
}

void write_dataset(const std::string& path, std::size_t order, double rho1, double rho2,
                   std::size_t length, std::uint64_t seed) {
    const ArConfig cfg{order, rho1, rho2, length, seed};
    make_dataset(cfg, TargetSpec{}).export_csv(path);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "KAN time-series laboratory: data generation, spectral theory checks, and "
              "training runs";

    m.def("generate_series",
          [](std::size_t order, double rho1, double rho2, std::size_t length,
             std::uint64_t seed) {
              return generate_ar(ArConfig{order, rho1, rho2, length, seed});
          },
          py::arg("order") = 1, py::arg("rho1") = 0.5, py::arg("rho2") = 0.0,
          py::arg("length") = 5000, py::arg("seed") = 1,
          "AR(N) series with unit-variance stationary scaling");

    m.def("write_dataset", &write_dataset, py::arg("path"), py::arg("order") = 1,
          py::arg("rho1") = 0.5, py::arg("rho2") = 0.0, py::arg("length") = 5000,
          py::arg("seed") = 1, "Generate a dataset and export it as CSV");

    m.def("dct",
          [](std::size_t p) { return to_rows(dct_matrix(p).w); }, py::arg("p"),
          "Orthonormal DCT-II matrix as nested lists");

    m.def("dct_apply",
          [](const std::vector<double>& x) { return dct_matrix(x.size()).apply(x); },
          py::arg("x"), "Transform one window");

    m.def("bspline",
          [](double z, std::size_t grid, std::size_t degree, double lo, double hi) {
              return bspline_basis(z, SplineBasisSpec{grid, degree, lo, hi});
          },
          py::arg("z"), py::arg("grid") = 8, py::arg("degree") = 3, py::arg("lo") = -1.0,
          py::arg("hi") = 1.0, "Clamped B-spline basis values at z");

    m.def("rbf",
          [](double z, double lo, double hi, std::size_t count) {
              return rbf_basis(z, RbfGrid{lo, hi, count});
          },
          py::arg("z"), py::arg("lo") = -2.0, py::arg("hi") = 2.0, py::arg("count") = 8,
          "Gaussian RBF basis values at z");

    m.def("silu", &silu, py::arg("z"));

    m.def("condition_summary", &condition_summary, py::arg("rho"), py::arg("p") = 6,
          py::arg("grid") = 8, py::arg("degree") = 3, py::arg("density") = "uniform",
          "Leading-order Hessian conditioning and bound verdict at one rho");

    m.def("mode_decay", &mode_decay, py::arg("rho"), py::arg("p") = 3, py::arg("grid") = 4,
          py::arg("degree") = 2, py::arg("eta_scale") = 0.5, py::arg("steps") = 400,
          py::arg("seed") = 1, "Fitted vs predicted per-mode decay rates");

    m.def("residual", &residual, py::arg("rho"), py::arg("samples") = 20000, py::arg("p") = 6,
          py::arg("seed") = 1, "Empirical vs leading-order Hessian residual");

    m.def("train_run", &train_run, py::arg("order") = 1, py::arg("rho1") = 0.5,
          py::arg("rho2") = 0.0, py::arg("variant") = "kan", py::arg("seed") = 1,
          py::arg("epochs") = 20, py::arg("length") = 1000, py::arg("hidden") = 16,
          "Train one network and return its epoch history");
}

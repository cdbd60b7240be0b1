#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kanlab/csv.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using kanlab::CsvTable;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(KANLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "kanlab_test_cli") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string sub(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(run("") == 1);
    CHECK(run("no-such-command") == 1);
    CHECK(run("gen --length nonsense") == 1);
    CHECK(run("gen --length 5") == 1);            // series too short to window
    CHECK(run("theory --density cauchy") == 1);   // unknown density
    CHECK(run("theory --domain-lo 2 --domain-hi -2") == 1);
    CHECK(run("gen --out /proc/kanlab_forbidden") == 1);
    CHECK(run("--help") == 0);
    CHECK(run("gen --help") == 0);
}

TEST_CASE("gen writes a schema-stable, reproducible dataset") {
    TempDir tmp;
    CHECK(run("gen --length 300 --rho1 0.5 --seed 3 --out " + tmp.sub("a")) == 0);
    CHECK(run("gen --length 300 --rho1 0.5 --seed 3 --out " + tmp.sub("b")) == 0);

    const CsvTable t = CsvTable::read(tmp.sub("a") + "/dataset.csv");
    CHECK(t.header == std::vector<std::string>{"t", "x_lag0", "x_lag1", "x_lag2", "y",
                                               "c_low", "c_mid", "c_high", "is_test"});
    CHECK(t.rows.size() == 297);
    CHECK(slurp(tmp.sub("a") + "/dataset.csv") == slurp(tmp.sub("b") + "/dataset.csv"));

    const std::string manifest = slurp(tmp.sub("a") + "/manifest.json");
    CHECK(manifest.find("\"config_hash\"") != std::string::npos);
    CHECK(manifest.find("\"dataset.csv\"") != std::string::npos);

    // The DCT representation reuses the schema.
    CHECK(run("gen --length 300 --seed 3 --dct --out " + tmp.sub("c")) == 0);
    const CsvTable d = CsvTable::read(tmp.sub("c") + "/dataset_dct.csv");
    CHECK(d.header == t.header);
}

TEST_CASE("theory sweep passes on a small grid") {
    TempDir tmp;
    CHECK(run("theory --rho 0 0.3 0.6 --p 3 --grid 4 --degree 2 --out " + tmp.sub("t")) == 0);
    const CsvTable t = CsvTable::read(tmp.sub("t") + "/theory_sweep.csv");
    CHECK(t.rows.size() == 3);
    const std::size_t pass = t.column("pass");
    for (const auto& row : t.rows) CHECK(row[pass] == "1");
    CHECK(slurp(tmp.sub("t") + "/theory_summary.txt").find("PASS") != std::string::npos);
}

TEST_CASE("mode-decay and residual verify and exit zero") {
    TempDir tmp;
    CHECK(run("mode-decay --rho 0 0.5 --steps 200 --out " + tmp.sub("m")) == 0);
    const CsvTable m = CsvTable::read(tmp.sub("m") + "/mode_decay.csv");
    CHECK(m.rows.size() == 2 * 15); // two rho values, p*m = 3*5 modes each

    CHECK(run("residual --rho 0.4 --samples 2000 --out " + tmp.sub("r")) == 0);
    const CsvTable r = CsvTable::read(tmp.sub("r") + "/residual.csv");
    CHECK(r.rows.size() == 1);
    CHECK(r.header[0] == "rho");
    CHECK(r.rows[0][r.column("weyl_ok")] == "1");
}

TEST_CASE("epoch-dynamics produces runs, aggregates, plots and a manifest") {
    TempDir tmp;
    const std::string out = tmp.sub("ed");
    CHECK(run("epoch-dynamics --rho 0.1 0.8 --seeds 2 --epochs 2 --length 300 --hidden 4 "
              "--batch-size 64 --out " + out) == 0);

    const CsvTable runs = CsvTable::read(out + "/runs.csv");
    CHECK(runs.rows.size() == 2 * 2 * 2 * 2); // variants x rhos x seeds x epochs
    const CsvTable agg = CsvTable::read(out + "/aggregate.csv");
    CHECK(agg.rows.size() == 2 * 2 * 2);
    for (const char* name : {"/epoch_mse_kan.svg", "/epoch_mse_dct-kan.svg",
                             "/epoch_components_kan.svg", "/manifest.json"})
        CHECK(fs::exists(out + name));

    const std::string svg = slurp(out + "/epoch_mse_kan.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("rho1=0.8") != std::string::npos);
}

TEST_CASE("config files map sections onto subcommands") {
    TempDir tmp;
    const std::string cfg = tmp.sub("kanlab.ini");
    {
        std::ofstream f(cfg);
        f << "[gen]\nlength=400\nseed=9\n";
    }
    CHECK(run("--config " + cfg + " gen --out " + tmp.sub("g")) == 0);
    const CsvTable t = CsvTable::read(tmp.sub("g") + "/dataset.csv");
    CHECK(t.rows.size() == 397);

    // Command-line values still win over the file.
    CHECK(run("--config " + cfg + " gen --length 350 --out " + tmp.sub("h")) == 0);
    const CsvTable u = CsvTable::read(tmp.sub("h") + "/dataset.csv");
    CHECK(u.rows.size() == 347);
}

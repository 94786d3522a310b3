#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "ttsv/config.hpp"
#include "ttsv/error.hpp"
#include "ttsv/experiment.hpp"
#include "ttsv/io.hpp"
#include "ttsv/plotdata.hpp"

using namespace ttsv;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("ttsv_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ExperimentConfig tiny() {
    ExperimentConfig c;
    c.days = 6;
    c.window_days = 3;
    c.noises = {NoiseKind::none, NoiseKind::iid_gaussian};
    c.rv_M = {13, 78};
    c.pavg_M = {390};
    return c;
}

}  // namespace

TEST_SUITE("iocli") {

TEST_CASE("config parsing") {
    std::stringstream s("# comment\nseed = 5\nschemes = cts, rbts_true # trailing\n\nmirror = off\n");
    const auto f = ConfigFile::parse(s);
    CHECK(f.get_int("seed", 0) == 5);
    CHECK(f.get_list("schemes", {}) == std::vector<std::string>{"cts", "rbts_true"});
    CHECK_FALSE(f.get_bool("mirror", true));
    CHECK(f.get_double("absent", 2.5) == 2.5);
    std::stringstream bad("seed 5\n");
    CHECK_THROWS_AS(ConfigFile::parse(bad), ConfigError);
    std::stringstream nan("days = many\n");
    CHECK_THROWS_AS(experiment_config_from(ConfigFile::parse(nan)), ConfigError);
    std::stringstream unknown("dayz = 5\n");
    try {
        experiment_config_from(ConfigFile::parse(unknown));
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("dayz") != std::string::npos);
    }
    std::stringstream ok("days = 3\nrv_M = 26\nnoise = arma\nproxy = next_rv\n");
    const auto c = experiment_config_from(ConfigFile::parse(ok));
    CHECK(c.days == 3);
    CHECK(c.rv_M == std::vector<std::size_t>{26});
    CHECK(c.noises == std::vector<NoiseKind>{NoiseKind::diurnal_arma});
    CHECK(c.proxy == ProxyMode::next_rv);
}

TEST_CASE("shipped config and curves load") {
    const auto f = ConfigFile::load(TTSV_SOURCE_DIR "/config/default.conf");
    const auto c = experiment_config_from(f);
    CHECK(c.days == 500);
    const auto lam = read_curve_file(TTSV_SOURCE_DIR "/data/lambda_det.csv");
    const auto vs = read_curve_file(TTSV_SOURCE_DIR "/data/varsigma_det.csv");
    const auto lam_ref = default_lambda_det(23400.0, lam.size());
    const auto vs_ref = default_varsigma_det(23400.0, vs.size());
    for (std::size_t k = 0; k < lam.size(); ++k) {
        CHECK(lam.value(k) == doctest::Approx(lam_ref.value(k)).epsilon(1e-12));
        CHECK(vs.value(k) == doctest::Approx(vs_ref.value(k)).epsilon(1e-12));
    }
}

TEST_CASE("tick csv round trip, duplicates, errors") {
    const SimConfig sc;
    std::vector<TickDay> days(2);
    for (int d = 0; d < 2; ++d) {
        days[d].day = d;
        days[d].ticks = simulate_day(sc, d).ticks_clean;
    }
    std::stringstream s;
    write_ticks(s, days);
    const auto back = read_ticks(s);
    REQUIRE(back.days.size() == 2);
    CHECK(back.duplicates_collapsed == 0);
    for (int d = 0; d < 2; ++d) {
        CHECK(back.days[d].ticks.times == days[d].ticks.times);
        CHECK(back.days[d].ticks.log_prices == days[d].ticks.log_prices);
    }
    std::stringstream dup("day,time_seconds,log_price\n0,1,0.1\n0,1,0.2\n0,2,0.3\n");
    const auto dd = read_ticks(dup);
    CHECK(dd.duplicates_collapsed == 1);
    CHECK(dd.days[0].ticks.log_prices == std::vector<double>{0.2, 0.3});
    std::stringstream empty("");
    CHECK(read_ticks(empty).days.empty());
    std::stringstream bad("0,1,0.1\n0,x,0.2\n");
    try {
        read_ticks(bad);
        CHECK(false);
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::stringstream back_in_time("0,5,0.1\n0,4,0.2\n");
    CHECK_THROWS_AS(read_ticks(back_in_time), DataError);
}

TEST_CASE("experiment rows, determinism and cell independence") {
    ExperimentConfig c = tiny();
    c.days = 1;
    c.noises = {NoiseKind::none};
    c.schemes = {StudyScheme::cts};
    c.estimators = {Estimator::rv};
    c.rv_M = {78};
    CHECK(run_experiment(c).losses.size() == 1);

    const ExperimentConfig full = tiny();
    const auto a = run_experiment(full);
    const auto b = run_experiment_serial(full);
    REQUIRE(a.losses.size() == b.losses.size());
    for (std::size_t i = 0; i < a.losses.size(); ++i) CHECK(a.losses[i].estimate == b.losses[i].estimate);

    // A single cell computed alone matches the same cell in the full grid.
    ExperimentConfig one = full;
    one.schemes = {StudyScheme::rbts_roll};
    one.noises = {NoiseKind::iid_gaussian};
    one.estimators = {Estimator::rv};
    one.rv_M = {78};
    const auto alone = run_experiment(one);
    for (const auto& r : alone.losses) {
        bool found = false;
        for (const auto& q : a.losses) {
            if (q.day == r.day && q.asset == r.asset && q.scheme == r.scheme && q.M == r.M && q.estimator == r.estimator) {
                CHECK(q.estimate == r.estimate);
                found = true;
            }
        }
        CHECK(found);
    }
    CHECK_FALSE(a.aggregate.empty());
}

TEST_CASE("next-day proxy mode") {
    ExperimentConfig c = tiny();
    c.proxy = ProxyMode::next_rv;
    c.schemes = {StudyScheme::cts};
    c.estimators = {Estimator::rv};
    const auto r = run_experiment(c);
    for (std::size_t i = 0; i < r.losses.size(); ++i) {
        CHECK(r.losses[i].proxy > 0.0);
        CHECK(r.losses[i].proxy != r.iv[i]);
    }
}

TEST_CASE("aggregate and plot data") {
    const auto dir = scratch("plot");
    ExperimentConfig c = tiny();
    c.out_dir = (dir / "exp").string();
    const auto r = run_experiment(c);
    write_experiment(c, r);
    std::ifstream in(dir / "exp" / "aggregate.csv");
    const auto rows = read_aggregate(in);
    CHECK(rows.size() == r.aggregate.size());

    const std::vector<AggregateRow> single{{"none", "rv", "cts", 78, 10, 0.01, 0.2, 0.005}};
    const auto panels = make_panels(single);
    REQUIRE(panels.size() == 2);
    CHECK(panels[0].rows.size() == 1);
    std::stringstream csv;
    write_panel_csv(csv, panels[0]);
    CHECK(csv.str() == "M,scheme,rel_bias\n78,cts,0.01\n");

    const auto names = emit_plotdata(rows, (dir / "plots").string(), true);
    CHECK_FALSE(names.empty());
    std::ifstream p(dir / "plots" / (names[0] + ".csv"));
    std::string header;
    std::getline(p, header);
    CHECK(header.rfind("M,scheme,", 0) == 0);
    std::size_t distinct = 0;
    std::set<std::string> schemes;
    for (const auto& pn : make_panels(rows)) {
        for (const auto& row : pn.rows) schemes.insert(row.scheme);
    }
    distinct = schemes.size();
    CHECK(distinct == c.schemes.size());

    const std::string svg = (dir / "plots" / (names[0] + ".svg")).string();
    const std::string cmd = "python3 -c \"import sys, xml.etree.ElementTree as E; E.parse(sys.argv[1])\" '" + svg + "'";
    CHECK(std::system(cmd.c_str()) == 0);

    std::stringstream missing("noise,estimator,scheme\nnone,rv,cts\n");
    CHECK_THROWS_AS(read_aggregate(missing), DataError);
}

TEST_CASE("cli exit codes") {
    const auto dir = scratch("cli");
    const std::string cli = std::string("\"") + TTSV_CLI_PATH + "\"";
    const auto run = [&](const std::string& args) {
        const int rc = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(rc);
    };
    CHECK(run("--out " + (dir / "sim").string() + " simulate --days 2") == 0);
    CHECK(fs::exists(dir / "sim" / "ticks.csv"));
    CHECK(run("--out " + (dir / "est").string() + " estimate --ticks " + (dir / "sim" / "ticks.csv").string() +
              " --scheme rbts --M 78") == 0);
    CHECK(run("--out " + (dir / "est2").string() + " estimate --ticks " + (dir / "sim" / "ticks.csv").string() +
              " --scheme ibts --M 26 --estimator pavg --bandwidth 300 --no-mirror --window-days 5") == 0);
    {
        std::ofstream bad(dir / "bad.conf");
        bad << "days = -3\n";
    }
    CHECK(run("--config " + (dir / "bad.conf").string() + " experiment") == 2);
    CHECK(run("estimate --ticks " + (dir / "sim" / "ticks.csv").string() + " --scheme nope") == 2);
    {
        std::ofstream bad(dir / "bad.csv");
        bad << "0,1,0.1\n0,zz,0.2\n";
    }
    CHECK(run("--out " + dir.string() + " estimate --ticks " + (dir / "bad.csv").string()) == 3);
    {
        std::ofstream cfg(dir / "small.conf");
        cfg << "days = 30\nwindow_days = 3\nnoise = none\nschemes = cts, rbts_true\nrv_M = 78\nestimators = rv\n";
    }
    CHECK(run("--config " + (dir / "small.conf").string() + " --out " + (dir / "exp").string() + " experiment") == 0);
    CHECK(run("--out " + (dir / "ev").string() + " evaluate --losses " + (dir / "exp" / "losses.csv").string() +
              " --n-boot 99") == 0);
    CHECK(fs::exists(dir / "ev" / "ranking.csv"));
    CHECK(run("--out " + (dir / "pd").string() + " plotdata --svg --aggregate " + (dir / "exp" / "aggregate.csv").string()) == 0);
    {
        std::ofstream rv(dir / "rv.csv");
        rv << "rv\n";
        for (int i = 0; i < 60; ++i) rv << 1.0 + 0.1 * std::sin(i) << "\n";
    }
    CHECK(run("--out " + (dir / "fc").string() + " forecast --window 40 --rv " + (dir / "rv.csv").string()) == 0);
    CHECK(run("--out " + (dir / "fc").string() + " forecast --window 80 --rv " + (dir / "rv.csv").string()) == 3);
    CHECK(run("frobnicate") == 2);
}

}

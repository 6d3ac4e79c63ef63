#include "doctest.h"

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/envelope.hpp"

#include "qnd/analytic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qnd;
using namespace qnd::cli;
using nlohmann::json;

namespace {

const std::string kConfigs = QND_CONFIG_DIR;

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

Run qnd_run(std::vector<std::string> args) {
    args.insert(args.begin(), "qnd");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    Run r;
    r.code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

RawConfig ini(const std::string& text) {
    std::istringstream in(text);
    return parse_ini(in);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("qnd_test_" + name);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

}  // namespace

TEST_CASE("INI parsing and overrides") {
    auto raw = ini("; comment\n[interaction]\nspm = 1e-3\nxpm = 2e-3\n\n[prior]\nn_bar_s = 4\n");
    CHECK(raw["interaction"]["spm"] == "1e-3");
    apply_override(raw, "prior.n_bar_s=9");
    apply_override(raw, "rng.seed=5");
    CHECK(raw["prior"]["n_bar_s"] == "9");
    CHECK(raw["rng"]["seed"] == "5");
    CHECK_THROWS_AS(apply_override(raw, "nodot=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(raw, "a.b"), ConfigError);
    CHECK_THROWS_AS(ini("top = 1\n"), ConfigError);
    CHECK_THROWS_AS(ini("[a]\nx = 1\nx = 2\n"), ConfigError);
    CHECK(ini(to_ini(raw)) == raw);
}

TEST_CASE("schema validation") {
    CHECK_THROWS_WITH_AS(resolve(ini("[interaction]\nspm = 1\nxpm = 2\nxmp = 3\n")), "interaction.xmp: unknown key",
                         ConfigError);
    CHECK_THROWS_WITH_AS(resolve(ini("[nonsense]\na = 1\n")), "nonsense: unknown section", ConfigError);
    CHECK_THROWS_AS(resolve(ini("[interaction]\nspm = 1\n")), ConfigError);
    CHECK_THROWS_AS(resolve(ini("[interaction]\nspm = 1\nxpm = x\n")), ConfigError);
    CHECK_THROWS_AS(resolve(ini("[interaction]\nspm = 1\nxpm = 2\nspm_rate = 3\n")), ConfigError);
    CHECK_THROWS_AS(resolve(ini("[detection]\neta = 1.5\n")), ConfigError);
    CHECK_THROWS_AS(resolve(ini("[probe]\nalpha = 2\nn_bar_p = 4\n")), ConfigError);
    CHECK_THROWS_AS(resolve(ini("[sweep]\nvariable = n_bar_p\nmin = 5\nmax = 5\npoints = 10\n")), ConfigError);
    CHECK_THROWS_AS(resolve(ini("[sweep]\nvariable = n_bar_p\nmin = 1\nmax = 5\npoints = 1\n")), ConfigError);
    CHECK_THROWS_AS(resolve(ini("[oracle]\nalphas = 1, 11\n")), ConfigError);
    CHECK_THROWS_AS(resolve(ini("[oracle]\ninject_fault = maybe\n")), ConfigError);

    const auto both = ini("[interaction]\nspm = 1\nxpm = 2\n[resonator]\nq_load = 1\n");
    CHECK_THROWS_WITH_AS(resolve(both), "interaction/resonator: exactly one section may supply the nonlinearity",
                         ConfigError);

    const auto rates = resolve(ini("[interaction]\nspm_rate = 10\nxpm_rate = 20\ntau = 1e-3\n[detection]\nzeta = auto\n"));
    CHECK(rates.interaction->spm == doctest::Approx(1e-2));
    CHECK_FALSE(rates.zeta.has_value());
    CHECK(resolve(ini("[probe]\nalpha = 3\n")).n_bar_p == 9.0);
}

TEST_CASE("resonator section") {
    const auto raw = load_ini(kConfigs + "/caf2.ini");
    const auto cfg = resolve(raw);
    REQUIRE(cfg.resonator.has_value());
    CHECK(cfg.efficiency() == doctest::Approx(0.9).epsilon(1e-15));

    auto bad = raw;
    bad["resonator"]["q_load"] = "1e12";
    CHECK_THROWS_AS(resolve(bad), ConfigError);
    auto inf = raw;
    inf["resonator"]["q_intr"] = "inf";
    inf["resonator"].erase("eta_total");
    inf["resonator"]["eta_extra"] = "1";
    CHECK(resolve(inf).efficiency() == 1.0);
    auto eta = raw;
    eta["detection"]["eta"] = "0.5";
    CHECK_THROWS_AS(resolve(eta), ConfigError);
}

TEST_CASE("estimate reproduces the CaF2 design") {
    const Run r = qnd_run({"estimate", "--config", kConfigs + "/caf2.ini", "--quiet"});
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    const json j = json::parse(r.out);
    CHECK(j["tool"] == "qnd");
    CHECK(j["version"] == kToolVersion);
    CHECK(j["command"] == "estimate");
    CHECK(j["timestamp"] == "1970-01-01T00:00:00Z");
    const json& p = j["payload"];
    CHECK(p["gamma_x"].get<double>() == doctest::Approx(8.537942449228771e-7).epsilon(1e-12));
    CHECK(p["gamma_x"].get<double>() == 2.0 * p["gamma_s"].get<double>());
    CHECK(p["n_p_opt"].get<double>() == doctest::Approx(3904141.253182647).epsilon(1e-12));
    CHECK(p["dn2_min"].get<double>() == doctest::Approx(195207.06265913236).epsilon(1e-12));
    CHECK(p["pump_power_w"].get<double>() == doctest::Approx(3.040250955e-7).epsilon(1e-9));
    CHECK(p["sql"].get<double>() == 1000.0);
    CHECK(p["eta_total"].get<double>() == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(p["unbounded_optimum"] == false);
    for (const char* key : {"eta_load", "eta_extra", "dn_min", "sub_sql_margin", "zeta", "optimal_phase"}) {
        CHECK(p.contains(key));
    }
}

TEST_CASE("estimate errors map to exit codes") {
    const Run bad = qnd_run({"estimate", "--config", kConfigs + "/caf2.ini", "--set", "resonator.q_load=1e12"});
    CHECK(bad.code == kExitConfig);
    CHECK(bad.err.find("q_load exceeds q_intr") != std::string::npos);

    const Run missing = qnd_run({"estimate", "--config", kConfigs + "/fig1a.ini"});
    CHECK(missing.code == kExitConfig);
    CHECK(missing.err.find("resonator: required by estimate") != std::string::npos);

    CHECK(qnd_run({"estimate", "--config", "/nonexistent.ini"}).code == kExitConfig);
    CHECK(qnd_run({"frobnicate"}).code == kExitConfig);
    CHECK(qnd_run({"estimate", "--format", "xml"}).code == kExitConfig);
    CHECK(qnd_run({"--help"}).code == 0);

    const Run lossless = qnd_run({"estimate", "--config", kConfigs + "/caf2.ini", "--set", "resonator.q_intr=inf",
                                  "--set", "resonator.eta_total=1"});
    REQUIRE(lossless.code == 0);
    const json p = json::parse(lossless.out)["payload"];
    CHECK(p["unbounded_optimum"] == true);
    CHECK(p["n_p_opt"].is_null());
}

TEST_CASE("error curve") {
    SUBCASE("argmin within one grid step of the optimum") {
        const Run r = qnd_run({"error-curve", "--config", kConfigs + "/error_curve.ini", "--quiet"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 602);
        CHECK(rows[0] == std::vector<std::string>{"sweep_var", "dn2_at_optimal_angle", "dn2_min_formula", "sql_ratio"});
        std::size_t best = 1;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (std::stod(rows[i][1]) < std::stod(rows[best][1])) best = i;
        }
        const double n_opt = analytic::optimal_probe_number(4.25e-7, 0.9);
        const double step = std::pow(10.0, 3.0 / 600.0);
        const double at = std::stod(rows[best][0]);
        CHECK(at / n_opt < step);
        CHECK(n_opt / at < step);
        CHECK(std::stod(rows[best][1]) == doctest::Approx(std::stod(rows[best][2])).epsilon(1e-3));
        CHECK(std::stod(rows[best][2]) == doctest::Approx(196078.43137254902).epsilon(1e-12));
    }
    SUBCASE("eta = 1: monotone decreasing, no finite minimum") {
        const Run r = qnd_run({"error-curve", "--config", kConfigs + "/error_curve.ini", "--set", "detection.eta=1",
                               "--quiet"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) < std::stod(rows[i - 1][1]));
        CHECK(rows[1][2].empty());
    }
    SUBCASE("Gamma_S = 0: pure shot noise") {
        const Run r = qnd_run({"error-curve", "--config", kConfigs + "/error_curve.ini", "--set", "interaction.spm=0",
                               "--quiet"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        for (std::size_t i = 1; i < rows.size(); i += 37) {
            const double n = std::stod(rows[i][0]);
            CHECK(std::stod(rows[i][1]) == doctest::Approx(1.0 / (4.0 * 0.9 * 8.5e-7 * 8.5e-7 * n)).epsilon(1e-12));
        }
    }
    SUBCASE("q_load sweep from the resonator") {
        const Run r = qnd_run({"error-curve", "--config", kConfigs + "/caf2.ini", "--set", "sweep.variable=q_load",
                               "--set", "sweep.min=1e8", "--set", "sweep.max=1e10", "--set", "sweep.points=3",
                               "--format", "json", "--quiet"});
        REQUIRE(r.code == 0);
        const json rows = json::parse(r.out)["payload"]["rows"];
        REQUIRE(rows.size() == 3);
        // dn2_min is proportional to 1/Q_load only at fixed efficiency; the loading term moves slightly.
        CHECK(rows[0]["dn2_min_formula"].get<double>() > rows[1]["dn2_min_formula"].get<double>());
        CHECK(rows[1]["dn2_min_formula"].get<double>() > rows[2]["dn2_min_formula"].get<double>());
    }
    SUBCASE("degenerate range") {
        CHECK(qnd_run({"error-curve", "--config", kConfigs + "/error_curve.ini", "--set", "sweep.max=1e5"}).code ==
              kExitConfig);
        CHECK(qnd_run({"error-curve", "--config", kConfigs + "/fig1a.ini"}).code == kExitConfig);
    }
}

TEST_CASE("posterior") {
    SUBCASE("desk-scale narrowing") {
        const Run r = qnd_run({"posterior", "--config", kConfigs + "/fig1a.ini", "--format", "json", "--quiet"});
        REQUIRE(r.code == 0);
        const json p = json::parse(r.out)["payload"];
        CHECK(p["variance_ratio"].get<double>() < 0.5);
        CHECK(p["zeta_source"] == "auto");
        CHECK(p["x_source"] == "mode");
        CHECK(p["distribution"].size() == p["support"][1].get<std::size_t>() + 1);
    }
    SUBCASE("raised coupling skews the posterior") {
        const Run r = qnd_run({"posterior", "--config", kConfigs + "/fig1b.ini", "--format", "json", "--quiet"});
        REQUIRE(r.code == 0);
        CHECK(std::abs(json::parse(r.out)["payload"]["posterior_stats"]["skewness"].get<double>()) > 0.1);
    }
    SUBCASE("no cross-phase: posterior column equals prior column") {
        const Run r = qnd_run({"posterior", "--config", kConfigs + "/fig1a.ini", "--set", "interaction.xpm=0",
                               "--quiet"});
        REQUIRE(r.code == 0);
        const auto rows = csv_rows(r.out);
        CHECK(rows[0] == std::vector<std::string>{"n", "prior", "posterior"});
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::stod(rows[i][2]) == doctest::Approx(std::stod(rows[i][1])).epsilon(1e-13));
        }
    }
    SUBCASE("CSV with JSON sidecar") {
        const auto path = temp_path("posterior.csv");
        const Run r = qnd_run({"posterior", "--config", kConfigs + "/fig1a.ini", "--x", "sample", "--seed", "7",
                               "--out", path.string(), "--quiet"});
        REQUIRE(r.code == 0);
        CHECK(r.out.empty());
        CHECK(slurp(path).rfind("n,prior,posterior\n", 0) == 0);
        const json side = json::parse(slurp(path.string() + ".json"));
        CHECK(side["payload"]["x_source"] == "sample");
        CHECK(side["payload"]["record"]["seed"] == 7);
        CHECK(side["config"]["rng"]["seed"] == "7");
        std::filesystem::remove(path);
        std::filesystem::remove(path.string() + ".json");
    }
    SUBCASE("sampled outcome needs a seed") {
        const Run r = qnd_run({"posterior", "--config", kConfigs + "/fig1a.ini", "--x", "sample"});
        CHECK(r.code == kExitConfig);
        CHECK(r.err.find("rng.seed") != std::string::npos);
    }
    SUBCASE("singular kernel angle carries a hint") {
        const Run r = qnd_run({"posterior", "--config", kConfigs + "/fig1a.ini", "--set", "detection.likelihood=kernel",
                               "--set", "detection.zeta=-1.6666666666666667", "--set", "interaction.xpm=0"});
        CHECK(r.code == kExitRuntime);
        CHECK(r.err.find("detection.likelihood = gaussian") != std::string::npos);
    }
}

TEST_CASE("validate") {
    const Run ok = qnd_run({"validate", "--config", kConfigs + "/validate.ini", "--quiet"});
    CHECK(ok.code == 0);
    const auto rows = csv_rows(ok.out);
    CHECK(rows.size() == 10);
    CHECK(rows[0][0] == "check");

    const Run fault = qnd_run({"validate", "--config", kConfigs + "/validate.ini", "--set",
                               "oracle.inject_fault=xpm_sign", "--format", "json"});
    CHECK(fault.code == kExitValidation);
    const json checks = json::parse(fault.out)["payload"]["checks"];
    CHECK(checks[0]["name"] == "moments_equivalence");
    CHECK(checks[0]["passed"] == false);
    CHECK(fault.err.find("8/9 checks passed") != std::string::npos);

    CHECK(qnd_run({"validate", "--config", kConfigs + "/fig1a.ini"}).code == kExitConfig);
}

TEST_CASE("sample") {
    SUBCASE("count = 0: header only") {
        const Run r = qnd_run({"sample", "--config", kConfigs + "/calibration.ini", "--count", "0", "--quiet"});
        REQUIRE(r.code == 0);
        CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
        const json h = json::parse(r.out);
        CHECK(h["type"] == "header");
        CHECK(h["payload"]["count"] == 0);
    }
    SUBCASE("records and summary") {
        const Run r = qnd_run({"sample", "--config", kConfigs + "/calibration.ini", "--count", "50", "--quiet"});
        REQUIRE(r.code == 0);
        std::istringstream in(r.out);
        std::string line;
        std::vector<json> lines;
        while (std::getline(in, line)) lines.push_back(json::parse(line));
        REQUIRE(lines.size() == 52);
        CHECK(lines[1]["type"] == "record");
        CHECK(lines[1]["index"] == 0);
        CHECK(lines[50]["index"] == 49);
        CHECK(lines[51]["type"] == "summary");
        CHECK(lines[51]["count"] == 50);
    }
    SUBCASE("seed decides the stream") {
        const auto a = qnd_run({"sample", "--config", kConfigs + "/calibration.ini", "--count", "20"});
        const auto b = qnd_run({"sample", "--config", kConfigs + "/calibration.ini", "--count", "20"});
        const auto c = qnd_run({"sample", "--config", kConfigs + "/calibration.ini", "--count", "20", "--seed", "1"});
        CHECK(a.out == b.out);
        CHECK(a.out != c.out);
    }
    SUBCASE("seed is required") {
        CHECK(qnd_run({"sample", "--config", kConfigs + "/fig1a.ini", "--count", "5"}).code == kExitConfig);
    }
}

TEST_CASE("config echo re-parses to an equivalent config") {
    for (const char* name : {"caf2.ini", "fig1a.ini", "calibration.ini", "validate.ini"}) {
        const std::string cmd = std::string(name) == "caf2.ini" ? "estimate"
                                : std::string(name) == "validate.ini" ? "validate"
                                : std::string(name) == "fig1a.ini" ? "posterior"
                                                                   : "sample";
        std::vector<std::string> args{cmd, "--config", kConfigs + "/" + name, "--format", "json", "--quiet",
                                      "--set", "prior.window_max=400"};
        if (cmd == "validate") args.pop_back(), args.pop_back();
        if (cmd == "sample") args.insert(args.end(), {"--count", "3"});
        const Run first = qnd_run(args);
        REQUIRE(first.code == 0);
        std::istringstream in(first.out);
        std::string head;
        std::getline(in, head, cmd == "sample" ? '\n' : '\0');
        const json echo = json::parse(head)["config"];

        RawConfig raw;
        for (const auto& [section, body] : echo.items()) {
            for (const auto& [key, value] : body.items()) raw[section][key] = value.get<std::string>();
        }
        const auto path = temp_path(std::string("echo_") + name);
        std::ofstream(path) << to_ini(raw);
        CHECK(load_ini(path.string()) == raw);
        CHECK_NOTHROW(resolve(raw));

        std::vector<std::string> again{cmd, "--config", path.string(), "--format", "json", "--quiet"};
        const Run second = qnd_run(again);
        CHECK(second.out == first.out);
        std::filesystem::remove(path);
    }
}

TEST_CASE("timestamps") {
    CHECK(resolve_timestamp(std::nullopt).size() == 20);
    CHECK(resolve_timestamp(std::string("2026-01-02T03:04:05Z")) == "2026-01-02T03:04:05Z");
    CHECK(resolve_timestamp(std::string("now")).back() == 'Z');
    CHECK(csv_number(0.1) == "0.10000000000000001");
    CHECK(csv_number(std::optional<double>{}).empty());
    CHECK(csv_text("a,b") == "\"a,b\"");
    CHECK(csv_text("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* cli_path() {
    const char* path = std::getenv("MAGNOISE_CLI");
    REQUIRE_MESSAGE(path != nullptr, "MAGNOISE_CLI env var must point at the binary");
    return path;
}

fs::path golden_dir() {
    const char* dir = std::getenv("MAGNOISE_GOLDEN");
    REQUIRE_MESSAGE(dir != nullptr, "MAGNOISE_GOLDEN env var must point at tests/golden");
    return dir;
}

fs::path work_dir() {
    const auto dir = fs::temp_directory_path() / "magnoise_cli_tests";
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args, const std::string& extra_env = "") {
    const auto out_file = work_dir() / "stdout.txt";
    const auto err_file = work_dir() / "stderr.txt";
    const std::string cmd = extra_env + std::string(cli_path()) + " " + args + " >" +
                            out_file.string() + " 2>" + err_file.string();
    const int status = std::system(cmd.c_str());
    CliResult result;
    result.exit_code = WEXITSTATUS(status);
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    return result;
}

fs::path write_file(const std::string& name, const std::string& content) {
    const auto path = work_dir() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string spectrum_csv(const std::string& name, double level) {
    std::ostringstream ss;
    ss << "# synthetic pickup spectrum\n";
    ss.precision(15);
    for (int i = 0; i <= 24; ++i) {
        const double f = 10.0 * std::pow(200.0, i / 24.0);
        ss << f << "," << level * std::sqrt(100.0 / f) << "\n";
    }
    return write_file(name, ss.str()).string();
}

std::string sv_csv() {
    static std::string path = spectrum_csv("sv.csv", 5e-8);
    return path;
}

} // namespace

TEST_CASE("every subcommand help matches its golden file") {
    const char* subs[] = {"predict", "t2",         "rms",  "fit-eta", "calibrate-eta",
                          "mc",      "modulation", "trap", "acoustics", "gradients",
                          "tube"};
    for (const char* sub : subs) {
        const auto result = run_cli(std::string(sub) + " --help");
        CHECK(result.exit_code == 0);
        const auto golden = slurp(golden_dir() / ("help_" + std::string(sub) + ".txt"));
        CHECK_MESSAGE(result.out == golden, "help drift for subcommand ", sub);
    }
    const auto top = run_cli("--help");
    CHECK(top.exit_code == 0);
    CHECK(top.out == slurp(golden_dir() / "help_top.txt"));
}

TEST_CASE("exit codes: usage 2, validation 3") {
    CHECK(run_cli("definitely-not-a-subcommand").exit_code == 2);
    CHECK(run_cli("rms").exit_code == 2); // missing required --psd
    CHECK(run_cli("").exit_code == 2);    // no subcommand

    const auto bad = write_file("bad.csv", "100,1e-6\n90,1e-6\n");
    const auto result = run_cli("rms --psd " + bad.string() + " --eta 15");
    CHECK(result.exit_code == 3);
    CHECK(result.err.find("validation error") != std::string::npos);

    // voltage input without eta is a validation error
    CHECK(run_cli("rms --psd " + sv_csv()).exit_code == 3);
}

TEST_CASE("rms pipeline emits the schema-1 summary") {
    const auto result =
        run_cli("rms --psd " + sv_csv() + " --eta 15 --species electron --carrier 124.05e9");
    REQUIRE(result.exit_code == 0);
    const auto summary = json::parse(result.out);
    CHECK(summary["schema"] == 1);
    CHECK(summary["subcommand"] == "rms");
    CHECK(summary["result"].contains("delta_rms_hz"));
    CHECK(summary["result"].contains("fractional_ppb"));
    CHECK(summary["manifest"]["parameters"]["eta_m2"] == "15");
    CHECK(summary["manifest"]["inputs"].size() == 1);
    const double hz = summary["result"]["delta_rms_hz"].get<double>();
    CHECK(hz > 0.0);
    // doubling the spectrum doubles delta_rms (homogeneity through the CLI)
    const auto doubled = spectrum_csv("sv2.csv", 1e-7);
    const auto result2 = run_cli("rms --psd " + doubled +
                                 " --eta 15 --species electron --carrier 124.05e9");
    const double hz2 = json::parse(result2.out)["result"]["delta_rms_hz"].get<double>();
    CHECK(hz2 == doctest::Approx(2.0 * hz).epsilon(1e-9));
}

TEST_CASE("identical manifests give byte-identical artifacts") {
    const auto out_a = work_dir() / "run_a";
    const auto out_b = work_dir() / "run_b";
    const std::string base = "predict --psd " + sv_csv() +
                             " --eta 15 --m 2 --t-start 1e-3 --t-stop 20e-3 --t-points 9";
    const auto a = run_cli(base + " --out " + out_a.string());
    const auto b = run_cli(base + " --out " + out_b.string());
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(slurp(out_a / "curve.csv") == slurp(out_b / "curve.csv"));
    CHECK(slurp(out_a / "manifest.json") == slurp(out_b / "manifest.json"));

    // mc with a fixed seed: byte-identical stdout and phase dump for any workers
    const auto phases_1 = work_dir() / "phases1.csv";
    const auto phases_8 = work_dir() / "phases8.csv";
    const std::string mc_base = "mc --psd " + sv_csv() +
                                " --eta 15 --m 2 --tau 2.5e-3 --traj 300 --seed 7";
    const auto mc1 = run_cli(mc_base + " --workers 1 --dump-phases " + phases_1.string());
    const auto mc8 = run_cli(mc_base + " --workers 8 --dump-phases " + phases_8.string());
    REQUIRE(mc1.exit_code == 0);
    REQUIRE(mc8.exit_code == 0);
    auto strip_dump = [](std::string s) {
        // the dump path is the only run-specific field
        const auto pos = s.find("\"phases_csv\"");
        const auto end = s.find('\n', pos);
        return s.erase(pos, end - pos);
    };
    CHECK(strip_dump(mc1.out) == strip_dump(mc8.out));
    CHECK(slurp(phases_1) == slurp(phases_8));
}

TEST_CASE("seed falls back to the MAGNOISE_SEED env var") {
    const std::string base = "mc --psd " + sv_csv() + " --eta 15 --m 2 --tau 2e-3 --traj 200";
    const auto env_run = run_cli(base, "MAGNOISE_SEED=1234 ");
    const auto flag_run = run_cli(base + " --seed 1234");
    REQUIRE(env_run.exit_code == 0);
    CHECK(json::parse(env_run.out)["manifest"]["seed"] == 1234);
    CHECK(json::parse(env_run.out)["result"]["coherence"] ==
          json::parse(flag_run.out)["result"]["coherence"]);
}

TEST_CASE("calibrate-eta round trip through the CLI") {
    // dphi/dm = 2 gamma V0 / (omega^2 eta) back-computed for eta = 37 at 200 Hz
    const double gamma = 1.76085963023e11;
    const double omega = 2.0 * 3.14159265358979 * 200.0;
    const double v0 = 1e-6;
    const double slope = 2.0 * gamma * v0 / (omega * omega * 37.0);
    std::ostringstream args;
    args << "calibrate-eta --v0 " << v0 << " --freq 200 --dphi-dm " << slope;
    const auto result = run_cli(args.str());
    REQUIRE(result.exit_code == 0);
    CHECK(json::parse(result.out)["result"]["eta_m2"].get<double>() ==
          doctest::Approx(37.0).epsilon(1e-6));
}

TEST_CASE("modulation writes the table csv") {
    const auto out = work_dir() / "mod_out";
    const auto result = run_cli(
        "modulation --fractional-amplitude 1e-9 --mod-freq 50 --carrier 124e9 --out " +
        out.string());
    REQUIRE(result.exit_code == 0);
    const auto summary = json::parse(result.out);
    CHECK(summary["result"]["rows"].size() == 2);
    CHECK(summary["result"]["rows"][0]["beta_m"].get<double>() ==
          doctest::Approx(2.48).epsilon(1e-9));
    const auto csv = slurp(out / "modulation.csv");
    CHECK(csv.find("ESR,") != std::string::npos);
    CHECK(csv.find("NMR,") != std::string::npos);

    // single-species mode lists the sidebands
    const auto single = run_cli(
        "modulation --fractional-amplitude 1e-9 --mod-freq 50 --carrier 124e9 "
        "--species electron --n-max 4");
    CHECK(json::parse(single.out)["result"]["sidebands"].size() == 5);
}

TEST_CASE("numerical non-convergence exits 4") {
    // support spanning six decades times a long sequence overruns the
    // quadrature panel budget
    const auto wide = write_file("wide.csv", "1,1e-3\n1e6,1e-3\n");
    const auto result = run_cli("predict --psd " + wide.string() +
                                " --kind frequency --t-start 0.05 --t-stop 0.2 "
                                "--t-points 3");
    CHECK(result.exit_code == 4);
    CHECK(result.err.find("numerical error") != std::string::npos);
}

TEST_CASE("options can come from a config file") {
    const auto cfg = write_file("acoustics.ini",
                                "[acoustics]\nlength=2.0\ndiameter=0.0\nspeed=343\n");
    const auto result = run_cli("--config " + cfg.string() + " acoustics");
    REQUIRE(result.exit_code == 0);
    CHECK(json::parse(result.out)["result"]["fundamental_hz"].get<double>() ==
          doctest::Approx(343.0 / 4.0));
}

TEST_CASE("pretty mode prints a table, not json") {
    const auto result = run_cli("acoustics --pretty");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("fundamental_hz") != std::string::npos);
    CHECK(result.out.find("{") == std::string::npos);
}

TEST_CASE("tube and gradients defaults reproduce the bore estimates") {
    const auto tube = run_cli("tube");
    REQUIRE(tube.exit_code == 0);
    const auto tube_result = json::parse(tube.out)["result"];
    CHECK(std::abs(tube_result["gradient_t_m"].get<double>()) ==
          doctest::Approx(630e-6).epsilon(0.05));
    CHECK(tube_result["shift_hz"].get<double>() == doctest::Approx(52.0).epsilon(0.05));

    const auto grad = run_cli("gradients --displacement-mm 0.003");
    REQUIRE(grad.exit_code == 0);
    const auto grad_result = json::parse(grad.out)["result"];
    CHECK(grad_result["radial_spread_hz"].get<double>() == doctest::Approx(175.0));
    CHECK(grad_result["displacement_shift_hz"]["y"].get<double>() ==
          doctest::Approx(65.52).epsilon(1e-3));
}

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "vbsar/config.hpp"
#include "vbsar/grid_io.hpp"
#include "vbsar/pipeline.hpp"

using namespace vbsar;
namespace fs = std::filesystem;

namespace {

const std::string kShipped = std::string(VBSAR_SOURCE_DIR) + "/configs/xband_airborne.cfg";

std::string scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("vbsar_cli_" + name);
    fs::remove_all(p);
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

RunConfig small_config(const std::string& out) {
    RunConfig c = parse_config("[scene]\nsize = 32\nlength = 320\n[run]\noutput_dir = " + out + "\n");
    return c;
}

int run_cli(const std::string& args) {
    const int status = std::system((std::string(VBSAR_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("shipped configuration") {
    const RunConfig c = load_config(kShipped);
    CHECK(c.radar.V == 100.0);
    CHECK(c.radar.R == 8000.0);
    CHECK(c.mesh.n == 128);
    CHECK(c.snr_db == 174.0);
    CHECK(c.solvers.size() == 4);
    CHECK_FALSE(c.rows.has_value());
    CHECK(c.hash == config_hash(c));

    const std::string path = scratch("roundtrip.cfg");
    save_config(c, path);
    const RunConfig back = load_config(path);
    CHECK(to_config_text(back) == to_config_text(c));
    CHECK(back.hash == c.hash);
    fs::remove(path);

    // The built-in defaults describe the same run as the shipped file.
    RunConfig defaults = parse_config("");
    defaults.output_dir = c.output_dir;
    CHECK(to_config_text(defaults) == to_config_text(c));
}

TEST_CASE("configuration errors name the key and line") {
    const auto error_of = [](const std::string& text) -> ConfigError {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return e;
        }
        FAIL("expected a configuration error");
        return ConfigError("", 0, "");
    };
    SUBCASE("non-positive B") {
        const ConfigError e = error_of("[radar]\nV = 100\nB = -0.25\n");
        CHECK(e.key() == "radar.B");
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("B") != std::string::npos);
        CHECK(error_of("[radar]\nB = 0\n").key() == "radar.B");
    }
    SUBCASE("unknown key") {
        const ConfigError e = error_of("# comment\n[radar]\nV = 100\nwavelength = 0.03\n");
        CHECK(e.key() == "radar.wavelength");
        CHECK(e.line() == 4);
    }
    SUBCASE("unknown section") {
        CHECK(error_of("[antenna]\nB = 1\n").line() == 1);
    }
    SUBCASE("malformed values") {
        CHECK(error_of("[run]\nseed = -4\n").key() == "run.seed");
        CHECK(error_of("[radar]\nR = 8 km\n").key() == "radar.R");
        CHECK(error_of("[run]\nsolvers = NL,XX\n").key() == "run.solvers");
        CHECK(error_of("[run]\nrows = 5..2\n").key() == "run.rows");
        CHECK(error_of("[run]\nrows = 0..128\n").key() == "run.rows");
        CHECK(error_of("[run]\nparallel = 0\n").key() == "run.parallel");
        CHECK(error_of("[solver.fm]\nmax_iterations = 0\n").key() == "solver.fm.max_iterations");
        CHECK(error_of("[spectrum]\ngamma_s = 0.5\n").key() == "spectrum.gamma_s");
        CHECK(error_of("[geometry]\nincidence = 2\n").key() == "geometry.incidence");
        CHECK(error_of("[radar]\nV = 1\nV = 2\n").line() == 3);
        CHECK(error_of("V = 100\n").line() == 1);
    }
}

TEST_CASE("configuration hash") {
    const RunConfig a = parse_config("[run]\nseed = 1\n");
    const RunConfig b = parse_config("[run]\nseed = 2\n");
    CHECK(a.hash != b.hash);
    const RunConfig c = parse_config("[run]\nseed = 1\nparallel = 8\noutput_dir = elsewhere\n");
    CHECK(a.hash == c.hash);
    CHECK(hash_hex(a.hash).size() == 64);
    const RunConfig inf = parse_config("[radar]\ntau_s = inf\n");
    CHECK(std::isinf(inf.radar.tau_s));
    CHECK(inf.hash != a.hash);
}

TEST_CASE("row ranges") {
    CHECK_FALSE(parse_row_range("all").has_value());
    const auto r = parse_row_range("3..7");
    REQUIRE(r.has_value());
    CHECK(r->first == 3);
    CHECK(r->last == 7);
    CHECK_THROWS_AS(parse_row_range("3-7"), std::invalid_argument);
    CHECK_THROWS_AS(parse_row_range("..7"), std::invalid_argument);
    RunConfig c = parse_config("[run]\nrows = 126..127\n");
    CHECK(c.selected_rows() == std::vector<std::size_t>{126, 127});
    CHECK(parse_config("").selected_rows().size() == 128);
}

TEST_CASE("VBG1 grids") {
    ConfigHash hash{};
    for (std::size_t i = 0; i < hash.size(); ++i) hash[i] = static_cast<std::uint8_t>(3 * i + 1);

    SUBCASE("real round trip is bit exact") {
        RealGrid g(3, 5);
        for (std::size_t i = 0; i < g.size(); ++i) g.values()[i] = std::sin(1.0 + i) * 1e-3;
        g(0, 0) = -0.0;
        g(1, 1) = std::numeric_limits<double>::infinity();
        g(2, 4) = std::numeric_limits<double>::denorm_min();
        const std::string bytes = encode_grid(g, hash);
        CHECK(bytes.size() == kGridHeaderSize + 8 * 15);
        CHECK(bytes.substr(0, 4) == "VBG1");
        CHECK(static_cast<unsigned char>(bytes[4]) == 3);
        CHECK(static_cast<unsigned char>(bytes[8]) == 5);
        CHECK(bytes[12] == 0);
        CHECK(bytes[13] == 0);
        const GridFile f = decode_grid(bytes);
        CHECK(f.config_hash == hash);
        CHECK(std::memcmp(f.real().values().data(), g.values().data(), 8 * 15) == 0);
        CHECK(std::signbit(f.real()(0, 0)));
        CHECK_THROWS_AS(f.complex(), FormatError);
    }
    SUBCASE("complex round trip keeps both parts") {
        ComplexGrid g(2, 2);
        g(0, 0) = {1.5, -2.5};
        g(0, 1) = {0.0, 1e-300};
        g(1, 0) = {-7.0, 0.125};
        g(1, 1) = {std::nan(""), 3.0};
        const std::string path = scratch("complex.vbg");
        write_grid(path, g, hash);
        const GridFile f = read_grid(path);
        CHECK(slurp(path)[12] == 1);
        const ComplexGrid& back = f.complex();
        CHECK(back(0, 0) == g(0, 0));
        CHECK(back(0, 1) == g(0, 1));
        CHECK(back(1, 0) == g(1, 0));
        CHECK(std::isnan(back(1, 1).real()));
        CHECK(back(1, 1).imag() == 3.0);
        fs::remove(path);
    }
    SUBCASE("malformed input is rejected") {
        const std::string good = encode_grid(RealGrid(2, 2, 1.0), hash);
        std::string bad = good;
        bad[0] = 'X';
        CHECK_THROWS_AS(decode_grid(bad), FormatError);
        CHECK_THROWS_AS(decode_grid(good.substr(0, good.size() - 1)), FormatError);
        CHECK_THROWS_AS(decode_grid(good.substr(0, 20)), FormatError);
        bad = good;
        bad[12] = 7;
        CHECK_THROWS_AS(decode_grid(bad), FormatError);
        bad = good;
        bad[13] = 1;
        CHECK_THROWS_AS(decode_grid(bad), FormatError);
    }
}

TEST_CASE("pipeline") {
    SUBCASE("ATI only") {
        RunConfig c = small_config(scratch("ati"));
        c.solvers = {SolverTag::ATI};
        c.hash = config_hash(c);
        const PipelineReport r = run_pipeline(c);
        CHECK(r.exit_code == 0);
        REQUIRE(r.summary.size() == 1);
        CHECK(r.summary[0].tag == SolverTag::ATI);
        CHECK(r.summary[0].rows == 32);
        const auto u = read_grid(c.output_dir + "/" + files::estimate(SolverTag::ATI));
        CHECK(u.config_hash == c.hash);
        CHECK(u.real().rows() == 32);
        for (const auto& rec : RunLedger::read_csv(c.output_dir + "/" + files::kLedger)) {
            CHECK(rec.tag == SolverTag::ATI);
            CHECK(rec.iterations == 0);
        }
        CHECK_FALSE(fs::exists(c.output_dir + "/" + files::estimate(SolverTag::NL)));
        const std::string meta = slurp(c.output_dir + "/" + files::kImageMetadata);
        CHECK(meta.find(hash_hex(c.hash)) != std::string::npos);
        CHECK(meta.find("\"snr_db\"") != std::string::npos);
        fs::remove_all(c.output_dir);
    }
    SUBCASE("a poisoned row is isolated") {
        RunConfig c = small_config(scratch("poison"));
        c.solvers = {SolverTag::FM, SolverTag::ATI};
        c.parallel = 3;
        c.hash = config_hash(c);
        PipelineHooks hooks;
        hooks.before_solve = [](std::size_t row, SolverTag tag) {
            if (row == 5 && tag == SolverTag::FM) throw std::runtime_error("injected failure");
        };
        const PipelineReport r = run_pipeline(c, hooks);
        CHECK(r.exit_code == 1);
        CHECK(r.failures == 1);
        const auto ledger = RunLedger::read_csv(c.output_dir + "/" + files::kLedger);
        CHECK(ledger.size() == 64);
        std::size_t failed = 0, done = 0;
        for (const auto& rec : ledger) {
            if (!rec.error.empty()) {
                ++failed;
                CHECK(rec.row == 5);
                CHECK(rec.error.find("injected failure") != std::string::npos);
            } else if (rec.tag == SolverTag::FM) {
                ++done;
                CHECK(std::isfinite(rec.rmse));
            }
        }
        CHECK(failed == 1);
        CHECK(done == 31);
        const RealGrid fm = read_grid(c.output_dir + "/" + files::estimate(SolverTag::FM)).real();
        CHECK(std::isnan(fm(5, 0)));
        CHECK(std::isfinite(fm(6, 0)));

        const auto rebuilt = report(c);
        REQUIRE(rebuilt.size() == r.summary.size());
        for (std::size_t i = 0; i < rebuilt.size(); ++i) {
            CHECK(rebuilt[i].tag == r.summary[i].tag);
            CHECK(rebuilt[i].failures == r.summary[i].failures);
            CHECK(rebuilt[i].median_rmse == r.summary[i].median_rmse);
            CHECK(rebuilt[i].ke_estimate == r.summary[i].ke_estimate);
        }
        fs::remove_all(c.output_dir);
    }
    SUBCASE("simulation products read back") {
        RunConfig c = small_config(scratch("readback"));
        const SimulationProducts sim = simulate(c);
        write_simulation(sim, c);
        const SimulationProducts back = read_simulation(c);
        CHECK(back.scene.u_r == sim.scene.u_r);
        CHECK(back.scene.a_r == sim.scene.a_r);
        CHECK(back.noisy.values == sim.noisy.values);
        CHECK(back.clean.values == sim.clean.values);
        CHECK(back.u_ati == sim.u_ati);
        CHECK(to_config_text(load_config(c.output_dir + "/" + files::kConfig)) == to_config_text(c));
        fs::remove_all(c.output_dir);
    }
}

TEST_CASE("command line exit codes") {
    const std::string bad = scratch("bad.cfg");
    std::ofstream(bad) << "[radar]\nB = -1\n";
    CHECK(run_cli("run --config " + bad) == 2);
    CHECK(run_cli("simulate --config " + kShipped + " --rows 9..3") == 2);
    CHECK(run_cli("frobnicate") == 2);
    const std::string out = scratch("cli_out");
    CHECK(run_cli("run --config " + kShipped + " --solvers ATI --out " + out) == 0);
    CHECK(fs::exists(out + "/" + files::kSummary));
    CHECK(run_cli("report --config " + kShipped + " --solvers ATI --out " + out) == 0);
    fs::remove_all(out);
    fs::remove(bad);
}

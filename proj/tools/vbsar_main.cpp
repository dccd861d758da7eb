// vbsar: simulate velocity-bunching AT-INSAR data and invert it row by row.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "vbsar/config.hpp"
#include "vbsar/pipeline.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::string out;
    std::string solvers;
    std::string rows;
    int parallel = 0;
    std::string seed;
};

vbsar::RunConfig load_with_overrides(const Overrides& o) {
    vbsar::RunConfig config =
        o.config_path.empty() ? vbsar::parse_config("") : vbsar::load_config(o.config_path);
    // Re-parse so overrides go through the same validation as the file.
    std::ostringstream extra;
    extra << vbsar::to_config_text(config);
    std::string text = extra.str();
    const auto set = [&](const std::string& key, const std::string& value) {
        const std::string needle = "\n" + key + " = ";
        const auto pos = text.find(needle);
        const auto end = text.find('\n', pos + 1);
        text.replace(pos, end - pos, needle + value);
    };
    if (!o.out.empty()) set("output_dir", o.out);
    if (!o.solvers.empty()) set("solvers", o.solvers);
    if (!o.rows.empty()) set("rows", o.rows);
    if (o.parallel != 0) set("parallel", std::to_string(o.parallel));
    if (!o.seed.empty()) set("seed", o.seed);
    return vbsar::parse_config(text);
}

void print_summary(const std::vector<vbsar::SummaryRecord>& summary) {
    std::printf("%-6s %6s %9s %14s %14s %14s %12s\n", "solver", "rows", "failures",
                "median_rmse", "ke_estimate", "ke_rel_error", "seconds");
    for (const auto& s : summary) {
        const std::string rel =
            s.ke_relative_error ? vbsar::format_double(*s.ke_relative_error).substr(0, 12) : "missing";
        std::printf("%-6s %6zu %9zu %14.6g %14.6g %14s %12.4g\n",
                    std::string(vbsar::to_string(s.tag)).c_str(), s.rows, s.failures,
                    s.median_rmse, s.ke_estimate, rel.c_str(), s.total_seconds);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Velocity-bunching AT-INSAR simulation and radial-velocity inversion"};
    app.require_subcommand(1);
    Overrides o;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_path, "configuration file")->check(CLI::ExistingFile);
        cmd->add_option("--out", o.out, "output directory");
        cmd->add_option("--solvers", o.solvers, "comma-separated subset of NL,FM,DFM,ATI");
        cmd->add_option("--rows", o.rows, "row range a..b (inclusive) or all");
        cmd->add_option("--parallel", o.parallel, "worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", o.seed, "master seed");
    };
    auto* simulate = app.add_subcommand("simulate", "synthesize the scene and the noisy image");
    auto* invert = app.add_subcommand("invert", "run the estimators on a simulated image");
    auto* report = app.add_subcommand("report", "rebuild the summary from an output directory");
    auto* run = app.add_subcommand("run", "simulate, invert and report in one go");
    for (auto* cmd : {simulate, invert, report, run}) add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    vbsar::RunConfig config;
    try {
        config = load_with_overrides(o);
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (simulate->parsed()) {
            vbsar::write_simulation(vbsar::simulate(config), config);
            std::cout << "wrote simulation to " << config.output_dir << '\n';
            return 0;
        }
        if (invert->parsed()) {
            const auto sim = vbsar::read_simulation(config);
            const auto inv = vbsar::invert(config, sim);
            vbsar::write_inversion(inv, config);
            print_summary(vbsar::report(config));
            return inv.failures > 0 ? 1 : 0;
        }
        if (report->parsed()) {
            print_summary(vbsar::report(config));
            return 0;
        }
        const auto result = vbsar::run_pipeline(config);
        print_summary(result.summary);
        if (result.failures > 0) std::cerr << result.failures << " row solve(s) failed\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

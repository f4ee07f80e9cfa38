#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "eztree/cli.hpp"
#include "eztree/scenario.hpp"

namespace {

int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 1;
    }
    f << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    namespace cli = eztree::cli;

    CLI::App app{"Epstein-Zin Lucas-tree equilibrium pricing and verification"};
    app.require_subcommand(1, 1);

    std::string scenario_path;
    std::string out_path;
    std::string format = "table";
    std::uint64_t seed = 0;
    std::size_t draws = 0;

    const char* names[] = {"equilibrium", "statics", "dynamics", "simulate", "verify", "sweep"};
    const char* help[] = {
        "closed-form price-dividend ratio, rates and premium",
        "derivatives of expected returns in risk aversion",
        "price-dividend path under a risk-aversion shock",
        "Monte Carlo return moments and Euler residuals",
        "run all identity, derivative and Euler checks",
        "grid over one parameter",
    };
    for (int i = 0; i < 6; ++i) {
        auto* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "write output here instead of stdout");
        sub->add_option("--format", format, "table or csv")->check(CLI::IsMember({"table", "csv"}));
        sub->add_option("--seed", seed, "override [simulation] seed");
        sub->add_option("--draws", draws, "override [simulation] draws");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cli::exit_code::kValidation;
    }

    const auto* sub = app.get_subcommands().front();
    const auto command = cli::parse_command(sub->get_name());

    std::ifstream in(scenario_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();

    eztree::Scenario scenario = [&] {
        try {
            return eztree::parse_scenario(buf.str());
        } catch (const eztree::ValidationError& e) {
            std::cerr << "error: " << scenario_path << ": " << e.what() << "\n";
            std::exit(cli::exit_code::kValidation);
        }
    }();

    cli::Overrides ov;
    if (sub->count("--seed")) ov.seed = seed;
    if (sub->count("--draws")) ov.draws = draws;

    const auto fmt = format == "csv" ? cli::OutputFormat::Csv : cli::OutputFormat::Table;
    const auto result = cli::run_command(*command, scenario, fmt, ov);
    std::cerr << result.err;
    if (!result.out.empty() && emit(result.out, out_path) != 0) return cli::exit_code::kInternal;
    return result.exit_code;
}

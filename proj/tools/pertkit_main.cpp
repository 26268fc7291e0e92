// pertkit command-line front end: every operation of the toolkit behind
// versioned JSON configs, emitting CSV/JSON tables.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pertkit/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pertkit: divergent-series resummation and distribution renormalization"};
    app.require_subcommand(1);

    struct Opts {
        std::string config_path;
        std::string out_path;
    };
    std::map<std::string, Opts> opts;
    for (const std::string name :
         {"series", "sweep", "borel", "saddle", "sd", "extend", "rgflow", "report"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opts[name].config_path, "JSON config file");
        sub->add_option("--out", opts[name].out_path, "output path (default: stdout)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    const Opts& o = opts[command];

    nlohmann::json config = nlohmann::json::object();
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) {
            std::cerr << nlohmann::json{{"error",
                                         {{"code", "config"},
                                          {"message", "cannot open config file: " + o.config_path}}}}
                             .dump()
                      << "\n";
            return 2;
        }
        try {
            config = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            std::cerr << nlohmann::json{{"error", {{"code", "config"}, {"message", e.what()}}}}
                             .dump()
                      << "\n";
            return 2;
        }
    }

    pertkit::cli::CommandResult res = pertkit::cli::run_command(command, config);
    if (!res.error_json.empty()) std::cerr << res.error_json << "\n";
    if (!res.output.empty()) {
        if (o.out_path.empty()) {
            std::cout << res.output;
        } else {
            std::ofstream out(o.out_path);
            if (!out) {
                std::cerr << nlohmann::json{{"error",
                                             {{"code", "config"},
                                              {"message", "cannot open output file: " + o.out_path}}}}
                                 .dump()
                          << "\n";
                return 2;
            }
            out << res.output;
        }
    }
    return res.exit_code;
}

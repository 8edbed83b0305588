#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <string>

#include "nsrl/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"nsrl: incompressible Navier-Stokes regularity laboratory on the 3-torus"};
    app.require_subcommand(1);

    struct Common {
        std::string config;
        std::string out;
        int refine = 0;
        std::optional<std::uint64_t> seed;
    };

    auto add_common = [](CLI::App* sub, Common& c, bool needs_config) {
        auto* opt = sub->add_option("--config", c.config, "run configuration file");
        if (needs_config) opt->required();
        sub->add_option("--out", c.out, "output directory (overrides output.dir)");
        sub->add_option("--refine", c.refine, "quadrature refinement doublings")
            ->check(CLI::Range(0, 6));
        sub->add_option_function<std::uint64_t>(
            "--seed", [&c](const std::uint64_t& s) { c.seed = s; },
            "override the initial-condition seed");
    };

    Common c_sim, c_vp, c_st, c_cr, c_rep;
    add_common(app.add_subcommand("simulate", "integrate the flow and record statistics"), c_sim,
               true);
    add_common(app.add_subcommand("verify-pressure",
                                  "evaluate the local pressure representation at probe points"),
               c_vp, true);
    add_common(app.add_subcommand("structure", "structure-function tables and scaling fits"),
               c_st, true);
    add_common(app.add_subcommand("criteria", "regularity criteria and enstrophy certificates"),
               c_cr, true);
    add_common(app.add_subcommand("report", "merge run outputs into plot-ready tables"), c_rep,
               false);

    CLI11_PARSE(app, argc, argv);

    nsrl::RunOptions opt;
    Common* c = nullptr;
    if (app.got_subcommand("simulate")) {
        opt.subcommand = "simulate";
        c = &c_sim;
    } else if (app.got_subcommand("verify-pressure")) {
        opt.subcommand = "verify-pressure";
        c = &c_vp;
    } else if (app.got_subcommand("structure")) {
        opt.subcommand = "structure";
        c = &c_st;
    } else if (app.got_subcommand("criteria")) {
        opt.subcommand = "criteria";
        c = &c_cr;
    } else {
        opt.subcommand = "report";
        c = &c_rep;
    }
    opt.config_path = c->config;
    opt.out_dir = c->out;
    opt.refine = c->refine;
    opt.seed = c->seed;
    return nsrl::run(opt);
}

// ramansim: Raman-scattering entanglement simulations from a scenario file.
//
//   ramansim simulate|compare|validate-adiabatic|sweep <config>
//            [--out DIR] [--jobs N] [--force] [--seed-meta]

#include "raman/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Two-atom Raman entanglement simulator"};
    app.set_version_flag("--version", std::string(raman::version));
    app.require_subcommand(1);

    raman::CommandOptions opts;
    std::string config;
    std::string out_dir;

    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("config", config, "scenario file (key = value)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides RAMAN_OUT_DIR and output.dir)");
        sub->add_option("--jobs", opts.jobs, "worker threads for sweeps (default: all cores)")
            ->check(CLI::NonNegativeNumber);
        sub->add_flag("--force", opts.force, "run even if grid validation fails");
        sub->add_flag("--seed-meta", opts.seed_meta,
                      "leave timestamps and runtimes out of meta.json");
        return sub;
    };
    CLI::App* simulate = add("simulate", "evolve one scenario and write trajectory, spectrum, summary");
    CLI::App* compare = add("compare", "expm vs RK4 vs closed form on the same grid");
    CLI::App* adiabatic =
        add("validate-adiabatic", "full three-level model vs the eliminated model over a detuning ladder");
    CLI::App* sweep = add("sweep", "one summary row per sweep.values entry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : raman::exit_invalid_config;
    }

    opts.config = config;
    if (!out_dir.empty())
        opts.out_dir = out_dir;

    if (simulate->parsed())
        return raman::cmd_simulate(opts, std::cout, std::cerr);
    if (compare->parsed())
        return raman::cmd_compare(opts, std::cout, std::cerr);
    if (adiabatic->parsed())
        return raman::cmd_validate_adiabatic(opts, std::cout, std::cerr);
    if (sweep->parsed())
        return raman::cmd_sweep(opts, std::cout, std::cerr);
    return raman::exit_invalid_config;
}

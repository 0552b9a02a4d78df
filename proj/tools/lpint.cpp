#include <cctype>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coadjoint/cli.hpp"

namespace {

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : csv) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<coadjoint::Method> parse_methods(const std::string& csv) {
    std::vector<coadjoint::Method> methods;
    for (const auto& name : split_list(csv)) {
        try {
            methods.push_back(coadjoint::parse_method(name));
        } catch (const std::invalid_argument& e) {
            throw coadjoint::ConfigError(e.what());
        }
    }
    return methods;
}

coadjoint::Vec parse_dts(const std::string& csv) {
    coadjoint::Vec dts;
    for (const auto& tok : split_list(csv)) {
        try {
            dts.push_back(coadjoint::parse_double(tok));
        } catch (const std::exception&) {
            throw coadjoint::ConfigError("--dts: expected reals, got '" + tok + "'");
        }
    }
    return dts;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structure-preserving integrators for stochastic Lie-Poisson systems"};
    app.require_subcommand(1);

    std::string config_path, out_dir, replay, methods_csv = "tmk,direct_im", dts_csv;
    std::uint64_t seed = 0;
    int levels = 5, n_seeds = 8;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        return sub->add_option("--seed", seed, "seed override");
    };

    CLI::App* run = app.add_subcommand("run", "integrate one trajectory and write CSV outputs");
    CLI::Option* run_seed = add_common(run);
    run->add_option("--replay", replay, "replay increments from a wiener.csv export");

    CLI::App* compare = app.add_subcommand("compare", "run several methods on one Wiener path");
    CLI::Option* compare_seed = add_common(compare);
    compare->add_option("--replay", replay, "replay increments from a wiener.csv export");
    compare->add_option("--methods", methods_csv, "comma-separated methods (default tmk,direct_im)");

    CLI::App* converge = app.add_subcommand("converge", "coupled-path strong-order estimate");
    CLI::Option* converge_seed = add_common(converge);
    converge->add_option("--levels", levels, "number of dyadic dt levels (default 5)");
    converge->add_option("--seeds", n_seeds, "number of seeds (default 8)");

    CLI::App* probe = app.add_subcommand("probe", "stability sweep over step sizes");
    CLI::Option* probe_seed = add_common(probe);
    probe->add_option("--dts", dts_csv, "comma-separated step sizes")->required();

    app.add_subcommand("selftest", "run the structural oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        coadjoint::CliOverrides ov;
        ov.out = out_dir;
        ov.replay = replay;
        if (app.get_subcommand("selftest")->parsed()) return coadjoint::cmd_selftest(std::cout);
        if (run->parsed()) {
            if (run_seed->count()) ov.seed = seed;
            return coadjoint::cmd_run(coadjoint::load_run_config(config_path, ov), std::cout);
        }
        if (compare->parsed()) {
            if (compare_seed->count()) ov.seed = seed;
            return coadjoint::cmd_compare(coadjoint::load_run_config(config_path, ov),
                                          parse_methods(methods_csv), std::cout);
        }
        if (converge->parsed()) {
            if (converge_seed->count()) ov.seed = seed;
            return coadjoint::cmd_converge(coadjoint::load_run_config(config_path, ov), levels,
                                           n_seeds, std::cout, std::cerr);
        }
        if (probe->parsed()) {
            if (probe_seed->count()) ov.seed = seed;
            return coadjoint::cmd_probe(coadjoint::load_run_config(config_path, ov),
                                        parse_dts(dts_csv), std::cout);
        }
    } catch (const coadjoint::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const coadjoint::StepError& e) {
        std::cerr << "step " << e.step_index << " failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

#include <cstdint>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rpmi/errors.hpp"
#include "rpmi/experiments.hpp"
#include "rpmi/io.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string format;
    int trials = 0;
    std::string theta_grid;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Scenario config file (JSON)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", flags.seed, "Base seed for all random streams");
    cmd->add_option("--out", flags.out_dir, "Directory for report files");
    cmd->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--trials", flags.trials, "Monte Carlo trials per sweep point")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--theta-grid", flags.theta_grid,
                    "Theta sweep grid as start:stop:step (radians)");
}

rpmi::Scenario apply_flags(const CLI::App* cmd, const CommonFlags& flags,
                           rpmi::Scenario scenario) {
    if (cmd->count("--config") > 0) {
        const nlohmann::json j = nlohmann::json::parse(rpmi::read_text_file(flags.config_path));
        rpmi::from_json(j, scenario);
    }
    if (cmd->count("--seed") > 0) {
        scenario.noise.rng_seed = flags.seed;
        scenario.phase_set.random_seed = flags.seed;
    }
    if (cmd->count("--out") > 0) scenario.out_dir = flags.out_dir;
    if (cmd->count("--format") > 0) scenario.format = flags.format;
    if (cmd->count("--trials") > 0) scenario.trials = flags.trials;
    if (cmd->count("--theta-grid") > 0) {
        scenario.sweep.theta_grid = rpmi::parse_grid(flags.theta_grid);
    }
    return scenario;
}

void emit(const rpmi::Report& report) {
    const auto& scenario = report.scenario;
    if (!scenario.out_dir.empty()) {
        rpmi::write_report(report, scenario.out_dir, scenario.format);
        std::cout << rpmi::report_summary(report);
        std::cout << "wrote " << scenario.out_dir << "/"
                  << (report.kind == "sequences" ? "phase_set" : "report")
                  << "." << scenario.format << '\n';
    } else {
        // Data on stdout for piping; the human digest goes to stderr.
        std::clog << rpmi::report_summary(report);
        if (scenario.format == "json") {
            if (report.kind == "sequences") {
                std::cout << rpmi::phase_set_to_json(*report.phase_set).dump(2) << '\n';
            } else {
                std::cout << rpmi::report_to_json(report).dump(2) << '\n';
            }
        } else {
            std::cout << rpmi::report_points_csv(report);
        }
    }
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const rpmi::InfeasibleSelectionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const rpmi::OutOfRangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const rpmi::SingularOperatingPointError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: invalid config: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: invalid config: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-phase-modulated interferometer simulator and analysis toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    using Runner = std::function<rpmi::Report(const rpmi::Scenario&)>;
    struct Sub {
        const char* name;
        const char* help;
        rpmi::Scenario (*defaults)();
        Runner run;
    };
    const Sub subs[] = {
        {"sequences", "Construct and dump a designed phase-sequence set",
         rpmi::default_sequences_scenario, rpmi::run_sequences},
        {"fringe", "Noiseless theta sweep with fringe-period analysis",
         rpmi::default_fringe_scenario, rpmi::run_fringe_sweep},
        {"montecarlo", "Shot-noise Monte Carlo scaling study",
         rpmi::default_montecarlo_scenario, rpmi::run_shot_noise_scaling},
        {"jitter", "Modulation-jitter Monte Carlo study",
         rpmi::default_jitter_scenario, rpmi::run_jitter_study},
    };

    std::function<void()> selected;
    for (const auto& sub : subs) {
        CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
        add_common_flags(cmd, flags);
        cmd->callback([cmd, &flags, &sub, &selected] {
            selected = [cmd, &flags, &sub] {
                const rpmi::Scenario scenario = apply_flags(cmd, flags, sub.defaults());
                emit(sub.run(scenario));
            };
        });
    }

    // The canonical worked example is fully pinned; it takes only output flags.
    CLI::App* example = app.add_subcommand(
        "paper-example", "Reproduce the canonical worked example and its error budget");
    example->add_option("--out", flags.out_dir, "Directory for report files");
    example->add_option("--format", flags.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    example->callback([example, &flags, &selected] {
        selected = [example, &flags] {
            rpmi::Report report = rpmi::run_worked_example();
            if (example->count("--out") > 0) report.scenario.out_dir = flags.out_dir;
            if (example->count("--format") > 0) report.scenario.format = flags.format;
            emit(report);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // bad flags or values count as invalid config
    }
    return run_guarded(selected);
}

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pseudomarket/experiment.hpp"
#include "pseudomarket/ideal.hpp"
#include "pseudomarket/simulator.hpp"

namespace {

using nlohmann::json;
using namespace pseudomarket;

void cmd_ideal(const std::string& config_path, bool oracle, std::int64_t simulate_rounds) {
    const ExperimentSpec spec = load_experiment_file(config_path);
    const MarketConfig& cfg = spec.config;

    json out;
    out["units"] = cfg.units;
    json agents = json::array();
    for (int i = 0; i < cfg.n_agents(); ++i) {
        const AgentSpec& a = cfg.agents[static_cast<std::size_t>(i)];
        const double cap = ideal_cap(a.fair_share, cfg.units);
        const RequestPolicy pol = ideal_policy(a.type_space, cap);

        json row;
        row["agent"] = i;
        row["fair_share"] = a.fair_share;
        row["cap"] = cap;
        row["v_star"] = pol.stats.v_star;
        row["beta"] = pol.stats.beta;
        row["q"] = pol.stats.q;
        if (pol.stats.kappa_defined) {
            row["kappa"] = pol.stats.kappa;
        } else {
            row["kappa"] = nullptr;
        }
        row["request_prob"] = pol.request_prob;

        if (oracle) {
            const LPInstance lp = build_ideal_lp(a.type_space, cap);
            const LPSolution reference = vertex_enumeration_oracle(lp);
            row["oracle_objective"] = reference.objective;
            row["oracle_gap"] = std::abs(reference.objective - pol.stats.v_star);
        }
        if (simulate_rounds > 0) {
            const RenewalEstimate est = simulate_no_competition(
                pol, a.type_space, simulate_rounds, cfg.seed + static_cast<std::uint64_t>(i));
            row["simulated_rate"] = est.utility_rate;
            row["simulated_utilization"] = est.utilization;
        }
        agents.push_back(std::move(row));
    }
    out["agents"] = std::move(agents);
    std::cout << out.dump(2) << "\n";
}

void run_and_emit(ExperimentSpec spec, const std::optional<int>& trials,
                  const std::optional<std::uint64_t>& seed,
                  const std::optional<std::string>& out_path, int jobs) {
    if (trials) spec.trials = *trials;
    if (seed) spec.config.seed = *seed;
    const ExperimentSummary summary = monte_carlo(spec, jobs < 1 ? 1 : jobs);
    if (out_path) write_text_file(*out_path, to_csv(summary));
    std::cout << summary_json(summary);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-market allocation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    bool oracle = false;
    std::int64_t simulate_rounds = 0;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path;
    int jobs = 1;
    std::string preset_name;
    PresetOverrides overrides;

    CLI::App* ideal = app.add_subcommand("ideal", "solve each agent's uncontested request policy");
    ideal->add_option("config", config_path, "experiment file (JSON)")->required();
    ideal->add_flag("--oracle", oracle, "cross-check the solver by brute-force vertex enumeration");
    ideal->add_option("--simulate", simulate_rounds,
                      "also run an uncontested simulation of this many rounds");

    CLI::App* run = app.add_subcommand("run", "run a Monte-Carlo experiment from a file");
    run->add_option("config", config_path, "experiment file (JSON)")->required();
    run->add_option("--trials", trials, "override trial count");
    run->add_option("--seed", seed, "override base seed");
    run->add_option("--out", out_path, "write per-trial CSV here");
    run->add_option("--jobs", jobs, "worker threads")->envname("PSEUDOMARKET_JOBS");

    CLI::App* preset = app.add_subcommand("preset", "run a built-in experiment");
    preset->add_option("name", preset_name,
                       "ideal | guarantee | impossibility | hardness | multi | roundrobin")
        ->required();
    preset->add_option("--n", overrides.n, "agent count (hardness, roundrobin)");
    preset->add_option("--kmax", overrides.k_max, "max reservation length");
    preset->add_option("--reserve", overrides.reserve, "reserve price");
    preset->add_option("--horizon", overrides.horizon, "rounds per trial");
    preset->add_option("--units", overrides.units, "identical units");
    preset->add_option("--trials", trials, "trial count");
    preset->add_option("--seed", seed, "base seed");
    preset->add_option("--strategy", overrides.strategy,
                       "protagonist strategy (robust | sniper | silent)");
    preset->add_option("--out", out_path, "write per-trial CSV here");
    preset->add_option("--jobs", jobs, "worker threads")->envname("PSEUDOMARKET_JOBS");

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
        if (ideal->parsed()) {
            cmd_ideal(config_path, oracle, simulate_rounds);
        } else if (run->parsed()) {
            run_and_emit(load_experiment_file(config_path), trials, seed, out_path, jobs);
        } else if (preset->parsed()) {
            run_and_emit(make_preset(preset_name, overrides), trials, seed, out_path, jobs);
        }
        return 0;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pseudomarket/simulator.hpp"

namespace pseudomarket {

// Knobs the CLI may turn on a named preset before running it.
struct PresetOverrides {
    std::optional<int> n;
    std::optional<int> k_max;
    std::optional<double> reserve;
    std::optional<std::int64_t> horizon;
    std::optional<int> units;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> strategy;  // protagonist strategy swap
};

// Built-in experiments with documented defaults:
//   ideal         robust (share 0.5) vs silent, r=2, T=10^4
//   guarantee     robust (share 0.2) vs blocker kmax=5, r=2, T=10^4
//   impossibility sniper (share 0.1) vs blocker kmax=20, r=2, T=10^4
//   hardness      n=50 symmetric congestion, kmax=20, greedy allocator, T=10^5
//   multi         4 units: robust (share 0.2) vs 4 blockers, r=1.8, T=10^4
//   roundrobin    n=10 hit-or-miss agents under the round-robin allocator
ExperimentSpec make_preset(const std::string& name, const PresetOverrides& overrides = {});

// JSON document: keys horizon, units, reserve, trials, seed, tie_break,
// agents[], preset. Unknown keys are rejected. When preset is given the other
// keys override its defaults. Agents: fair_share, types (triples
// [value, duration, probability]), strategy, kmax (blocker), price (sniper).
ExperimentSpec parse_experiment_text(const std::string& text);
ExperimentSpec load_experiment_file(const std::string& path);

// One row per (trial, agent); floats carry 9 significant digits.
std::string to_csv(const ExperimentSummary& summary);

// Human- and machine-readable digest: per-agent stats, analytic bounds,
// PASS/FAIL bound checks.
std::string summary_json(const ExperimentSummary& summary);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace pseudomarket

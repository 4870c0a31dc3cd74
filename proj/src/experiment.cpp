#include "pseudomarket/experiment.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pseudomarket {

namespace {

using nlohmann::json;

TypeSpace mixed_two_round_types() {
    // Half the time worth 1 per round for 2 rounds, otherwise worthless.
    return TypeSpace{{{1.0, 2, 0.5}, {0.0, 1, 0.5}}};
}

TypeSpace hit_or_miss_types(double hit_prob) {
    return TypeSpace{{{1.0, 1, hit_prob}, {0.0, 1, 1.0 - hit_prob}}};
}

TypeSpace worthless_types() { return TypeSpace{{{0.0, 1, 1.0}}}; }

AgentSpec make_agent(double share, TypeSpace ts, StrategyKind kind, int blocker_kmax = 0) {
    AgentSpec a;
    a.fair_share = share;
    a.type_space = std::move(ts);
    a.strategy.kind = kind;
    a.strategy.blocker_k_max = blocker_kmax;
    return a;
}

void apply_protagonist_strategy(ExperimentSpec& spec, const std::string& name) {
    const StrategyKind kind = strategy_from_name(name);
    if (kind == StrategyKind::Blocker)
        throw SchemaError("protagonist strategy override cannot be 'blocker'");
    if (spec.allocator != Allocator::Mechanism)
        throw SchemaError("strategy override only applies to auction presets");
    auto& a = spec.config.agents[static_cast<std::size_t>(protagonist_agent(spec.config))];
    a.strategy = StrategySpec{};
    a.strategy.kind = kind;
}

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

std::int64_t require_integer(const json& v, const std::string& where) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw SchemaError(where + " must be an integer");
    return v.get<std::int64_t>();
}

double require_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError(where + " must be a number");
    return v.get<double>();
}

std::string require_string(const json& v, const std::string& where) {
    if (!v.is_string()) throw SchemaError(where + " must be a string");
    return v.get<std::string>();
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : obj.items())
        if (allowed.find(item.key()) == allowed.end())
            throw SchemaError("unknown key '" + item.key() + "' in " + where);
}

std::vector<AgentSpec> parse_agents(const json& arr) {
    if (!arr.is_array() || arr.empty())
        throw SchemaError("agents must be a non-empty array");
    static const std::set<std::string> allowed = {"fair_share", "types", "strategy", "kmax",
                                                  "price"};
    std::vector<AgentSpec> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        std::ostringstream tag;
        tag << "agents[" << i << "]";
        const json& a = arr[i];
        if (!a.is_object()) throw SchemaError(tag.str() + " must be an object");
        reject_unknown_keys(a, allowed, tag.str());
        if (!a.contains("fair_share") || !a.contains("types") || !a.contains("strategy"))
            throw SchemaError(tag.str() + " needs fair_share, types, strategy");

        AgentSpec spec;
        spec.fair_share = require_number(a.at("fair_share"), tag.str() + ".fair_share");

        const json& types = a.at("types");
        if (!types.is_array() || types.empty())
            throw SchemaError(tag.str() + ".types must be a non-empty array");
        for (std::size_t k = 0; k < types.size(); ++k) {
            const json& t = types[k];
            std::ostringstream ttag;
            ttag << tag.str() << ".types[" << k << "]";
            if (!t.is_array() || t.size() != 3)
                throw SchemaError(ttag.str() + " must be a [value, duration, probability] triple");
            DemandType d;
            d.value = require_number(t[0], ttag.str() + " value");
            d.duration = static_cast<int>(require_integer(t[1], ttag.str() + " duration"));
            d.probability = require_number(t[2], ttag.str() + " probability");
            spec.type_space.types.push_back(d);
        }

        spec.strategy.kind =
            strategy_from_name(require_string(a.at("strategy"), tag.str() + ".strategy"));
        if (a.contains("kmax")) {
            if (spec.strategy.kind != StrategyKind::Blocker)
                throw SchemaError(tag.str() + ".kmax only applies to blockers");
            spec.strategy.blocker_k_max =
                static_cast<int>(require_integer(a.at("kmax"), tag.str() + ".kmax"));
        } else if (spec.strategy.kind == StrategyKind::Blocker) {
            throw SchemaError(tag.str() + ": blocker requires kmax");
        }
        if (a.contains("price")) {
            if (spec.strategy.kind != StrategyKind::Sniper)
                throw SchemaError(tag.str() + ".price only applies to snipers");
            spec.strategy.sniper_price = require_number(a.at("price"), tag.str() + ".price");
        }
        out.push_back(std::move(spec));
    }
    return out;
}

ExperimentSpec parse_experiment_json(const json& j) {
    if (!j.is_object()) throw SchemaError("experiment document must be a JSON object");
    static const std::set<std::string> allowed = {"horizon", "units",  "reserve", "trials",
                                                  "seed",    "tie_break", "agents", "preset"};
    reject_unknown_keys(j, allowed, "experiment document");

    ExperimentSpec spec;
    if (j.contains("preset")) {
        spec = make_preset(require_string(j.at("preset"), "preset"));
    } else {
        spec.trials = 200;
    }
    if (j.contains("horizon")) spec.config.horizon = require_integer(j.at("horizon"), "horizon");
    if (j.contains("units"))
        spec.config.units = static_cast<int>(require_integer(j.at("units"), "units"));
    if (j.contains("reserve")) spec.config.reserve = require_number(j.at("reserve"), "reserve");
    if (j.contains("trials"))
        spec.trials = static_cast<int>(require_integer(j.at("trials"), "trials"));
    if (j.contains("seed")) {
        const std::int64_t s = require_integer(j.at("seed"), "seed");
        if (s < 0) throw SchemaError("seed must be nonnegative");
        spec.config.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("tie_break")) {
        const std::string tb = require_string(j.at("tie_break"), "tie_break");
        if (tb == "lowest_index") {
            spec.config.tie_break = TieBreak::LowestIndex;
        } else if (tb == "seeded_random") {
            spec.config.tie_break = TieBreak::SeededRandom;
        } else {
            throw SchemaError("tie_break must be 'lowest_index' or 'seeded_random'");
        }
    }
    if (j.contains("agents")) spec.config.agents = parse_agents(j.at("agents"));

    if (spec.trials < 1) throw SchemaError("trials must be >= 1");
    validate_config(spec.config);
    return spec;
}

}  // namespace

ExperimentSpec make_preset(const std::string& name, const PresetOverrides& ov) {
    ExperimentSpec spec;
    spec.preset = name;
    MarketConfig& cfg = spec.config;
    cfg.horizon = 10000;
    cfg.units = 1;
    cfg.reserve = 2.0;
    cfg.seed = 1;
    spec.trials = 200;

    if (name == "ideal") {
        cfg.agents = {make_agent(0.5, mixed_two_round_types(), StrategyKind::Robust),
                      make_agent(0.5, worthless_types(), StrategyKind::Silent)};
    } else if (name == "guarantee") {
        const int kmax = ov.k_max.value_or(5);
        cfg.agents = {make_agent(0.2, mixed_two_round_types(), StrategyKind::Robust),
                      make_agent(0.8, worthless_types(), StrategyKind::Blocker, kmax)};
    } else if (name == "impossibility") {
        const int kmax = ov.k_max.value_or(20);
        cfg.agents = {make_agent(0.1, hit_or_miss_types(0.1), StrategyKind::Sniper),
                      make_agent(0.9, worthless_types(), StrategyKind::Blocker, kmax)};
    } else if (name == "hardness") {
        const int n = ov.n.value_or(50);
        const int kmax = ov.k_max.value_or(20);
        const HardnessProfile hp =
            hardness_instance(n, kmax, ov.horizon.value_or(100000), ov.seed.value_or(1));
        cfg = hp.config;
        spec.trials = 50;
        spec.allocator = Allocator::GreedyOmniscient;
    } else if (name == "multi") {
        const int kmax = ov.k_max.value_or(5);
        cfg.units = 4;
        cfg.reserve = 2.0 - 0.2;
        cfg.agents = {make_agent(0.2, mixed_two_round_types(), StrategyKind::Robust)};
        for (int b = 0; b < 4; ++b)
            cfg.agents.push_back(make_agent(0.2, worthless_types(), StrategyKind::Blocker, kmax));
    } else if (name == "roundrobin") {
        const int n = ov.n.value_or(10);
        if (n < 1) throw ConfigError("roundrobin preset needs n >= 1");
        for (int i = 0; i < n; ++i)
            cfg.agents.push_back(
                make_agent(1.0 / n, hit_or_miss_types(1.0 / n), StrategyKind::Silent));
        spec.trials = 100;
        spec.allocator = Allocator::RoundRobin;
    } else {
        throw UnknownPreset("unknown preset '" + name + "'");
    }

    if (ov.n && name != "hardness" && name != "roundrobin")
        throw SchemaError("--n only applies to the hardness and roundrobin presets");
    if (ov.k_max && !(name == "guarantee" || name == "impossibility" || name == "hardness" ||
                      name == "multi"))
        throw SchemaError("--kmax does not apply to preset '" + name + "'");
    if (ov.reserve) cfg.reserve = *ov.reserve;
    if (ov.horizon) cfg.horizon = *ov.horizon;
    if (ov.units) cfg.units = *ov.units;
    if (ov.trials) spec.trials = *ov.trials;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.strategy) apply_protagonist_strategy(spec, *ov.strategy);

    validate_config(cfg);
    return spec;
}

ExperimentSpec parse_experiment_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
    try {
        return parse_experiment_json(j);
    } catch (const json::exception& e) {
        throw SchemaError(e.what());
    }
}

ExperimentSpec load_experiment_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return parse_experiment_text(buf.str());
}

std::string to_csv(const ExperimentSummary& summary) {
    std::string out = "trial,agent,total_utility,total_payment,utilization,blocked_rounds\n";
    for (const TrialRow& r : summary.rows) {
        out += std::to_string(r.trial);
        out += ',';
        out += std::to_string(r.agent);
        out += ',';
        out += fmt_double(r.total_utility);
        out += ',';
        out += fmt_double(r.total_payment);
        out += ',';
        out += fmt_double(r.utilization);
        out += ',';
        out += std::to_string(r.blocked_rounds);
        out += '\n';
    }
    return out;
}

std::string summary_json(const ExperimentSummary& s) {
    json j;
    j["trials"] = s.trials;
    j["horizon"] = s.horizon;
    j["units"] = s.units;
    if (!s.preset.empty()) j["preset"] = s.preset;
    j["protagonist"] = s.protagonist;

    json agents = json::array();
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        const AgentStats& a = s.agents[i];
        json row;
        row["agent"] = i;
        row["mean_utility"] = a.mean_utility;
        row["se_utility"] = a.se_utility;
        row["mean_payment"] = a.mean_payment;
        row["se_payment"] = a.se_payment;
        row["mean_utilization"] = a.mean_utilization;
        row["se_utilization"] = a.se_utilization;
        row["mean_blocked_rounds"] = a.mean_blocked;
        row["se_blocked_rounds"] = a.se_blocked;
        row["v_star"] = s.v_star[i];
        row["beta"] = s.beta[i];
        agents.push_back(std::move(row));
    }
    j["agents"] = std::move(agents);

    json bounds;
    bounds["welfare_ub"] = s.welfare_ub;
    if (s.guarantee_lb) bounds["guarantee_lb"] = *s.guarantee_lb;
    if (s.impossibility_ub) bounds["impossibility_ub"] = *s.impossibility_ub;
    if (s.analytic_fraction) bounds["fraction"] = *s.analytic_fraction;
    if (s.empirical_fraction) bounds["empirical_fraction"] = *s.empirical_fraction;
    if (s.bpb_reference) bounds["bpb_reference"] = *s.bpb_reference;
    if (s.bpb_empirical) bounds["bpb_empirical"] = *s.bpb_empirical;
    j["bounds"] = std::move(bounds);

    json checks = json::array();
    for (const Check& c : s.checks) {
        json row;
        row["name"] = c.name;
        row["status"] = c.pass ? "PASS" : "FAIL";
        row["lhs"] = c.lhs;
        row["rhs"] = c.rhs;
        checks.push_back(std::move(row));
    }
    j["checks"] = std::move(checks);
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    out.flush();
    if (!out.good()) throw IoError("error while writing '" + path + "'");
}

}  // namespace pseudomarket

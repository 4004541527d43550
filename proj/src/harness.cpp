#include "nsrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "nsrl/multiagent.hpp"
#include "nsrl/runner.hpp"

namespace nsrl {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return get_or<T>(j, key, T{});
}

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
            throw ConfigError(std::string("unknown key '") + it.key() + "' in " + where);
    }
}

DemandPmf parse_pmf(const json& j, const char* where) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string(where) + ": pmf must be a non-empty array");
    DemandPmf pmf = j.get<DemandPmf>();
    double total = 0.0;
    for (double x : pmf) {
        if (x < 0.0) throw ConfigError(std::string(where) + ": negative probability");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError(std::string(where) + ": pmf must sum to 1");
    return pmf;
}

DemandSchedule parse_demand(const json& j, int M) {
    if (!j.is_object()) throw ConfigError("env.demand must be an object");
    const auto type = get_or<std::string>(j, "type", "constant");
    if (type == "constant") {
        check_keys(j, "env.demand", {"type", "pmf"});
        return DemandSchedule::constant(parse_pmf(j.value("pmf", json()), "env.demand.pmf"));
    }
    if (type == "blocks") {
        check_keys(j, "env.demand", {"type", "blocks"});
        std::vector<std::pair<int, DemandPmf>> blocks;
        for (const auto& b : j.value("blocks", json::array()))
            blocks.emplace_back(get_or<int>(b, "from", 1), parse_pmf(b.value("pmf", json()), "env.demand.blocks"));
        if (blocks.empty() || blocks.front().first != 1)
            throw ConfigError("env.demand.blocks must start at episode 1");
        return DemandSchedule::blocks(std::move(blocks));
    }
    if (type == "interpolate") {
        check_keys(j, "env.demand", {"type", "start", "end"});
        return DemandSchedule::interpolate(parse_pmf(j.value("start", json()), "env.demand.start"),
                                           parse_pmf(j.value("end", json()), "env.demand.end"), M);
    }
    throw ConfigError("env.demand.type must be constant, blocks or interpolate");
}

EnvConfig parse_env(const json& j, int M, int H) {
    EnvConfig env;
    env.kind = get_or<std::string>(j, "kind", "lock");
    if (env.kind == "lock") {
        check_keys(j, "env", {"kind", "A", "success_prob", "sink_reward", "good_reward", "bad_reward",
                              "variation", "period", "seed"});
        auto& c = env.lock;
        c.M = M;
        c.H = H;
        c.A = get_or(j, "A", 2);
        c.success_prob = get_or(j, "success_prob", 0.98);
        c.sink_reward = get_or(j, "sink_reward", -1.0);
        c.good_reward = get_or(j, "good_reward", 1.0);
        c.bad_reward = get_or(j, "bad_reward", 0.25);
        const auto var = get_or<std::string>(j, "variation", "abrupt");
        if (var == "abrupt")
            c.variation = LockVariation::Abrupt;
        else if (var == "gradual")
            c.variation = LockVariation::Gradual;
        else if (var == "none")
            c.variation = LockVariation::None;
        else
            throw ConfigError("env.variation must be abrupt, gradual or none");
        c.period = get_or(j, "period", 1000);
        c.seed = get_or<std::uint64_t>(j, "seed", 0);
    } else if (env.kind == "jao") {
        check_keys(j, "env", {"kind", "S", "A", "delta", "epsilon", "segment_length", "segments", "seed"});
        auto& c = env.jao;
        c.M = M;
        c.H = H;
        c.S = get_or(j, "S", 2);
        c.A = get_or(j, "A", 2);
        c.delta = get_or(j, "delta", 0.2);
        c.epsilon = get_or(j, "epsilon", 0.1);
        if (j.contains("segments")) {
            const int n = get_or(j, "segments", 1);
            if (n < 1) throw ConfigError("env.segments must be positive");
            c.segment_length = (M + n - 1) / n;
        } else {
            c.segment_length = get_or(j, "segment_length", M);
        }
        c.seed = get_or<std::uint64_t>(j, "seed", 0);
    } else if (env.kind == "inventory") {
        check_keys(j, "env", {"kind", "capacity", "fixed_cost", "unit_cost", "lost_sales_cost",
                              "holding_cost", "demand"});
        auto& c = env.inventory;
        c.M = M;
        c.H = H;
        c.capacity = get_or(j, "capacity", 4);
        c.fixed_cost = get_or(j, "fixed_cost", 1.0);
        c.unit_cost = get_or(j, "unit_cost", 1.0);
        c.lost_sales_cost = get_or(j, "lost_sales_cost", 3.0);
        c.holding_cost = get_or(j, "holding_cost", 0.5);
        if (!j.contains("demand")) throw ConfigError("env.demand is required for inventory");
        c.demand = parse_demand(j.at("demand"), M);
    } else if (env.kind == "team") {
        check_keys(j, "env", {"kind", "S", "A1", "A2", "seed", "opponent_period"});
        auto& c = env.team;
        c.S = get_or(j, "S", 2);
        c.A1 = get_or(j, "A1", 2);
        c.A2 = get_or(j, "A2", 2);
        c.seed = get_or<std::uint64_t>(j, "seed", 0);
        c.opponent_period = get_or(j, "opponent_period", 100);
    } else {
        throw ConfigError("env.kind must be lock, jao, inventory or team");
    }
    return env;
}

AgentConfig parse_agent(const json& j) {
    check_keys(j, "agent", {"kind", "bonus", "budgets", "delta", "agent_delta", "epochs", "epoch_length",
                            "variation_budget", "epsilon", "optimistic_init", "ref_threshold"});
    AgentConfig a;
    a.kind = get_or<std::string>(j, "kind", "restart_q_ucb");
    if (a.kind != "restart_q_ucb" && a.kind != "q_ucb" && a.kind != "epsilon_greedy" &&
        a.kind != "double_restart")
        throw ConfigError("agent.kind must be restart_q_ucb, q_ucb, epsilon_greedy or double_restart");
    const auto bonus = get_or<std::string>(j, "bonus", "hoeffding");
    if (bonus == "hoeffding")
        a.bonus = BonusKind::Hoeffding;
    else if (bonus == "freedman")
        a.bonus = BonusKind::Freedman;
    else
        throw ConfigError("agent.bonus must be hoeffding or freedman");
    const auto budgets = get_or<std::string>(j, "budgets", "none");
    if (budgets == "none")
        a.budgets = BudgetMode::None;
    else if (budgets == "known")
        a.budgets = BudgetMode::Known;
    else
        throw ConfigError("agent.budgets must be none or known");
    a.delta = get_or(j, "delta", 0.1);
    if (!(a.delta > 0.0 && a.delta < 2.0)) throw ConfigError("agent.delta must lie in (0,2) so that log(2/delta) > 0");
    a.agent_delta = get_opt<double>(j, "agent_delta");
    a.epochs = get_opt<int>(j, "epochs");
    a.epoch_length = get_opt<int>(j, "epoch_length");
    a.variation_budget = get_opt<double>(j, "variation_budget");
    const int schedules = (a.epochs ? 1 : 0) + (a.epoch_length ? 1 : 0) + (a.variation_budget ? 1 : 0);
    if (schedules > 1) throw ConfigError("agent: give at most one of epochs, epoch_length, variation_budget");
    if (a.epochs && *a.epochs < 1) throw ConfigError("agent.epochs must be positive");
    if (a.epoch_length && *a.epoch_length < 1) throw ConfigError("agent.epoch_length must be positive");
    if (a.variation_budget && !(*a.variation_budget > 0.0))
        throw ConfigError("agent.variation_budget must be positive");
    a.epsilon = get_or(j, "epsilon", 0.05);
    if (!(a.epsilon >= 0.0 && a.epsilon <= 1.0)) throw ConfigError("agent.epsilon must lie in [0,1]");
    a.optimistic_init = get_or(j, "optimistic_init", false);
    a.ref_threshold = get_opt<double>(j, "ref_threshold");
    return a;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    check_keys(j, "config", {"name", "M", "H", "env", "agent", "seeds", "base_seed", "output", "record_policy"});
    ExperimentConfig cfg;
    cfg.name = get_or<std::string>(j, "name", "experiment");
    cfg.M = get_or(j, "M", 5000);
    cfg.H = get_or(j, "H", 5);
    if (cfg.M < 1 || cfg.H < 1) throw ConfigError("M and H must be positive");
    cfg.env = parse_env(j.value("env", json::object()), cfg.M, cfg.H);
    cfg.agent = parse_agent(j.value("agent", json::object()));
    cfg.seeds = get_or(j, "seeds", 30);
    if (cfg.seeds < 1) throw ConfigError("seeds must be positive");
    cfg.base_seed = get_or<std::uint64_t>(j, "base_seed", 1);
    cfg.output = get_or<std::string>(j, "output", "out");
    cfg.record_policy = get_or(j, "record_policy", false);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_config(j);
}

TeamSetup build_team(const ExperimentConfig& cfg) {
    if (cfg.env.kind != "team") throw ConfigError("env.kind is not team");
    const auto& c = cfg.env.team;
    Rng rng(c.seed, 0x7ea);
    TeamSetup t;
    t.team = TeamModel::random(cfg.H, c.S, c.A1, c.A2, rng);
    t.schedule = periodic_opponent(t.team, cfg.M, c.opponent_period, TabularPolicy(cfg.H, c.S, 0), rng);
    return t;
}

NonstationaryEnv build_env(const ExperimentConfig& cfg) {
    try {
        const auto& e = cfg.env;
        if (e.kind == "lock") return build_lock(e.lock);
        if (e.kind == "jao") return build_jao_chain(e.jao);
        if (e.kind == "inventory") return inventory_env(e.inventory);
        if (e.kind == "team") {
            const TeamSetup t = build_team(cfg);
            return wrap_team(t.team, t.schedule);
        }
    } catch (const ContractViolation& err) {
        throw ConfigError(std::string("env: ") + err.what());
    }
    throw ConfigError("unknown env kind " + cfg.env.kind);
}

std::unique_ptr<Agent> make_agent(const AgentConfig& agent, const NonstationaryEnv& env) {
    const AgentShape shape = AgentShape::of(*env.snapshot(1));
    if (agent.kind == "epsilon_greedy") return std::make_unique<EpsilonGreedyAgent>(shape, agent.epsilon, std::string{}, agent.optimistic_init);
    if (agent.kind == "restart_q_ucb" || agent.kind == "q_ucb") {
        QUcbOptions o;
        o.bonus = agent.bonus;
        o.budgets = agent.budgets;
        o.delta = agent.delta;
        o.ref_threshold = agent.ref_threshold;
        std::string label;
        if (agent.kind == "q_ucb") label = "q-ucb";
        return std::make_unique<QUcbAgent>(shape, o, label);
    }
    throw ConfigError("agent kind " + agent.kind + " has no single-learner form");
}

EpochPlan epoch_plan(const AgentConfig& agent, const NonstationaryEnv& env) {
    const int M = env.M();
    if (agent.kind == "q_ucb") return EpochPlan::single(M);
    if (agent.epoch_length) return EpochPlan::from_length(M, std::min(*agent.epoch_length, M));
    if (agent.epochs) return EpochPlan::from_count(M, std::min(*agent.epochs, M));
    if (agent.variation_budget) {
        const int D = agent.bonus == BonusKind::Freedman
                          ? epochs_freedman(env.S(), env.A(), *agent.variation_budget, env.T(), M)
                          : epochs_hoeffding(env.S(), env.A(), *agent.variation_budget, env.H(), env.T());
        return EpochPlan::from_count(M, D);
    }
    return EpochPlan::single(M);
}

SeedResult run_seed(const ExperimentConfig& cfg, const NonstationaryEnv& env, int run_id,
                    std::uint64_t seed, const RunOptions& extra) {
    SeedResult out;
    out.run_id = run_id;
    Rng rng(seed);
    RunOptions opts = extra;
    opts.record_policy = opts.record_policy || cfg.record_policy;
    opts.record_steps = opts.record_steps || cfg.env.kind == "inventory";
    if (cfg.agent.kind == "double_restart") {
        DoubleRestartOptions d;
        d.delta = cfg.agent.delta;
        d.agent_delta = cfg.agent.agent_delta;
        d.ref_threshold = cfg.agent.ref_threshold;
        d.run = opts;
        out.trace = run_double_restart(env, rng, d).trace;
    } else {
        auto agent = make_agent(cfg.agent, env);
        out.trace = run_restart(env, *agent, epoch_plan(cfg.agent, env), rng, opts);
    }
    out.trace.seed = seed;
    if (cfg.record_policy) {
        std::vector<int> starts;
        starts.reserve(out.trace.episodes.size());
        for (const auto& e : out.trace.episodes) starts.push_back(e.initial_state);
        out.regret = dynamic_regret(env, out.trace.policies, starts);
        if (!extra.record_policy) out.trace.policies.clear();
    }
    return out;
}

AggregateStats aggregate(const std::vector<SeedResult>& runs) {
    require(!runs.empty(), "aggregate: no runs");
    const std::size_t M = runs.front().trace.episodes.size();
    const bool with_regret = std::all_of(runs.begin(), runs.end(), [](const auto& r) { return r.regret.has_value(); });
    for (const auto& r : runs) {
        require(r.trace.episodes.size() == M, "aggregate: traces differ in length");
        require(r.trace.env == runs.front().trace.env && r.trace.agent == runs.front().trace.agent,
                "aggregate: traces come from different env/agent pairs");
    }
    AggregateStats st;
    const double n = static_cast<double>(runs.size());
    auto moments = [&](auto value, std::vector<double>& mean, std::vector<double>& sd) {
        mean.resize(M);
        sd.resize(M);
        for (std::size_t m = 0; m < M; ++m) {
            double sum = 0.0;
            for (const auto& r : runs) sum += value(r, m);
            const double mu = sum / n;
            double sq = 0.0;
            for (const auto& r : runs) {
                const double d = value(r, m) - mu;
                sq += d * d;
            }
            mean[m] = mu;
            sd[m] = std::sqrt(sq / n);
        }
    };
    moments([](const SeedResult& r, std::size_t m) { return r.trace.episodes[m].cumulative_reward; },
            st.mean_cum_reward, st.std_cum_reward);
    if (with_regret)
        moments([](const SeedResult& r, std::size_t m) { return r.regret->cumulative[m]; }, st.mean_cum_regret,
                st.std_cum_regret);
    return st;
}

int worker_count() {
    if (const char* env = std::getenv("NSRL_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ';';
        s += std::to_string(v[i]);
    }
    return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

void write_trace_csv(const std::filesystem::path& path, const SeedResult& run, bool audit_columns) {
    auto out = open_out(path);
    out << kTraceSchema << '\n'
        << "run_id,seed,episode,episode_reward,cumulative_reward,cumulative_regret,epoch_index,arm";
    if (audit_columns) out << ",sales,next_states";
    out << '\n';
    for (std::size_t i = 0; i < run.trace.episodes.size(); ++i) {
        const auto& e = run.trace.episodes[i];
        out << run.run_id << ',' << run.trace.seed << ',' << e.episode << ',' << format_number(e.reward) << ','
            << format_number(e.cumulative_reward) << ',';
        if (run.regret) out << format_number(run.regret->cumulative[i]);
        out << ',' << e.epoch << ',';
        if (e.arm >= 0) out << e.arm;
        if (audit_columns) out << ',' << join_ints(e.sales) << ',' << join_ints(e.next_states);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_aggregate_csv(const std::filesystem::path& path, const AggregateStats& st) {
    auto out = open_out(path);
    out << kAggregateSchema << '\n' << "episode,mean_cum_reward,std_cum_reward,mean_cum_regret,std_cum_regret\n";
    const bool regret = !st.mean_cum_regret.empty();
    for (std::size_t m = 0; m < st.mean_cum_reward.size(); ++m) {
        out << m + 1 << ',' << format_number(st.mean_cum_reward[m]) << ',' << format_number(st.std_cum_reward[m])
            << ',';
        if (regret) out << format_number(st.mean_cum_regret[m]) << ',' << format_number(st.std_cum_regret[m]);
        else out << ',';
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool write, const RunOptions& extra) {
    const NonstationaryEnv env = build_env(cfg);
    ExperimentResult res;
    res.runs.resize(static_cast<std::size_t>(cfg.seeds));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&] {
        for (int i = next++; i < cfg.seeds; i = next++) {
            try {
                res.runs[static_cast<std::size_t>(i)] =
                    run_seed(cfg, env, i, cfg.base_seed + static_cast<std::uint64_t>(i), extra);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int workers = std::min(worker_count(), cfg.seeds);
    if (workers <= 1 || extra.on_episode_start) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);
    res.stats = aggregate(res.runs);

    if (write) {
        const std::filesystem::path dir(cfg.output);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
        const bool audit = cfg.env.kind == "inventory";
        for (const auto& r : res.runs) {
            auto p = dir / ("trace_" + std::to_string(r.run_id) + ".csv");
            write_trace_csv(p, r, audit);
            res.files.push_back(p);
        }
        auto agg = dir / "aggregate.csv";
        write_aggregate_csv(agg, res.stats);
        res.files.push_back(agg);

        json meta;
        meta["version"] = kVersion;
        meta["name"] = cfg.name;
        meta["env"] = env.name();
        meta["agent"] = res.runs.front().trace.agent;
        meta["M"] = cfg.M;
        meta["H"] = cfg.H;
        meta["seeds"] = cfg.seeds;
        meta["base_seed"] = cfg.base_seed;
        meta["record_policy"] = cfg.record_policy;
        if (cfg.agent.kind == "double_restart") {
            const auto grid = candidate_grid(env.T(), env.S(), env.A(), env.H());
            meta["phase_length"] = grid.W;
            meta["phase_length_rule"] = "floor(sqrt(H*T))";
            meta["candidate_epochs"] = grid.values;
        } else {
            const auto plan = epoch_plan(cfg.agent, env);
            meta["epochs"] = plan.epochs();
            meta["epoch_length"] = plan.K();
        }
        if (cfg.env.kind == "inventory") {
            const auto map = pseudo_reward_map(cfg.env.inventory);
            meta["pseudo_reward_scale"] = map.scale;
            meta["pseudo_reward_offset"] = map.offset;
        }
        auto mp = dir / "meta.json";
        auto out = open_out(mp);
        out << meta.dump(2) << '\n';
        res.files.push_back(mp);
    }
    return res;
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace " + path.string());
    std::string line;
    std::vector<TraceRow> rows;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line.rfind("run_id,", 0) != 0) throw std::runtime_error(path.string() + ": missing trace header");
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (line.back() == ',') f.emplace_back();
        if (f.size() < 8) throw std::runtime_error(path.string() + ": short trace row");
        TraceRow r;
        r.run_id = std::stoi(f[0]);
        r.seed = std::stoull(f[1]);
        r.episode = std::stoi(f[2]);
        r.episode_reward = std::stod(f[3]);
        r.cumulative_reward = std::stod(f[4]);
        if (!f[5].empty()) r.cumulative_regret = std::stod(f[5]);
        r.epoch = std::stoi(f[6]);
        if (!f[7].empty()) r.arm = std::stoi(f[7]);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace nsrl

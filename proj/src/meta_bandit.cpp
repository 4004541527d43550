#include "nsrl/meta_bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nsrl/agents.hpp"

namespace nsrl {

namespace {

std::int64_t isqrt(std::int64_t x) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(x)));
    while (r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

CandidateGrid candidate_grid(std::int64_t T, int S, int A, int H) {
    require(T >= 1 && S >= 1 && A >= 1 && H >= 1, "candidate_grid: bad dimensions");
    CandidateGrid grid;
    grid.W = std::max<std::int64_t>(1, isqrt(static_cast<std::int64_t>(H) * T));
    grid.J = static_cast<int>(std::ceil(std::log(static_cast<double>(grid.W))));
    const double denom = static_cast<double>(S) * A * H * H * static_cast<double>(grid.W);
    for (int j = 0; j <= grid.J; ++j) {
        const double growth =
            grid.J == 0 ? 1.0 : std::pow(static_cast<double>(grid.W), static_cast<double>(j) / grid.J);
        const double raw = std::floor(static_cast<double>(T) * growth / denom);
        grid.values.push_back(static_cast<int>(std::max(1.0, raw)));
    }
    return grid;
}

Exp3PParams exp3p_params(std::int64_t M, std::int64_t W, int J, double delta) {
    require(delta > 0.0 && delta < 1.0, "exp3p_params: delta must lie in (0,1)");
    require(M >= 1 && W >= 1 && J >= 0, "exp3p_params: bad dimensions");
    const double n = static_cast<double>(ceil_div(M, W));
    const double k = J + 1.0;
    Exp3PParams p;
    p.alpha = 2.0 * std::sqrt(std::log(n * k / delta));
    p.gamma = std::min(0.6, 2.0 * std::sqrt(0.6 * k * std::log(k) / n));
    return p;
}

Exp3P::Exp3P(int arms, std::int64_t rounds, Exp3PParams params)
    : rounds_(rounds), params_(params) {
    require(arms >= 1 && rounds >= 1, "Exp3P: arms and rounds must be positive");
    require(params.gamma >= 0.0 && params.gamma <= 1.0, "Exp3P: gamma must lie in [0,1]");
    const double init = params.alpha * params.gamma / 3.0 *
                        std::sqrt(static_cast<double>(rounds) / static_cast<double>(arms));
    log_weights_.assign(static_cast<std::size_t>(arms), init);
}

std::vector<double> Exp3P::probabilities() const {
    const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
    std::vector<double> p(log_weights_.size());
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::exp(log_weights_[j] - top);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    const double k = static_cast<double>(p.size());
    for (auto& x : p) x = (1.0 - params_.gamma) * x / total + params_.gamma / k;
    return p;
}

int Exp3P::draw(Rng& rng) const {
    const auto p = probabilities();
    return rng.categorical(p);
}

void Exp3P::update(int chosen, double reward, double scale) {
    require(chosen >= 0 && chosen < arms(), "Exp3P::update: arm out of range");
    require(scale > 0.0 && reward >= 0.0 && reward <= scale * (1.0 + 1e-12),
            "Exp3P::update: reward outside [0, scale]");
    const auto p = probabilities();
    const double k = static_cast<double>(arms());
    const double rate = params_.gamma / (3.0 * k);
    const double spread = std::sqrt(k * static_cast<double>(rounds_));
    for (int j = 0; j < arms(); ++j) {
        const auto js = static_cast<std::size_t>(j);
        const double estimate = j == chosen ? reward / (scale * p[js]) : 0.0;
        log_weights_[js] += rate * (estimate + params_.alpha / (p[js] * spread));
    }
    ++round_;
}

DoubleRestartResult run_double_restart(const NonstationaryEnv& env, Rng& rng,
                                       const DoubleRestartOptions& opts) {
    const int M = env.M();
    const int H = env.H();
    DoubleRestartResult res;
    res.grid = opts.grid ? *opts.grid : candidate_grid(env.T(), env.S(), env.A(), H);
    require(!res.grid.values.empty() && static_cast<int>(res.grid.values.size()) == res.grid.J + 1,
            "run_double_restart: malformed candidate grid");
    const std::int64_t W = res.grid.W;
    res.params = exp3p_params(M, W, res.grid.J, opts.delta);
    const std::int64_t phases = ceil_div(M, W);
    Exp3P bandit(res.grid.arms(), phases, res.params);

    res.trace.agent = "double-restart-q-ucb";
    res.trace.env = env.name();
    res.trace.episodes.reserve(static_cast<std::size_t>(M));

    QUcbOptions qopts;
    qopts.bonus = BonusKind::Freedman;
    qopts.budgets = BudgetMode::None;
    qopts.delta = opts.agent_delta.value_or(opts.delta);
    qopts.ref_threshold = opts.ref_threshold;
    const AgentShape shape = AgentShape::of(*env.snapshot(1));

    int done = 0;
    int epoch_offset = 0;
    for (std::int64_t i = 0; i < phases; ++i) {
        PhaseRecord ph;
        ph.phase = static_cast<int>(i) + 1;
        ph.probabilities = bandit.probabilities();
        ph.arm = bandit.draw(rng);
        ph.epochs = std::clamp(res.grid.values[static_cast<std::size_t>(ph.arm)], 1, M);
        ph.epoch_length = std::max(1, M / ph.epochs);
        ph.first_episode = done + 1;
        ph.episodes = static_cast<int>(std::min<std::int64_t>(W, M - done));

        QUcbAgent agent(shape, qopts);
        const auto plan = EpochPlan::from_length(ph.episodes, ph.epoch_length);
        const std::size_t before = res.trace.episodes.size();
        run_episodes(env, agent, plan, ph.first_episode, rng, opts.run, res.trace, epoch_offset);
        epoch_offset += plan.epochs();
        for (std::size_t k = before; k < res.trace.episodes.size(); ++k) {
            res.trace.episodes[k].arm = ph.arm;
            ph.reward += res.trace.episodes[k].reward;
        }
        bandit.update(ph.arm, ph.reward, static_cast<double>(W) * H);
        done += ph.episodes;
        res.phases.push_back(std::move(ph));
    }
    res.final_probabilities = bandit.probabilities();
    return res;
}

}  // namespace nsrl

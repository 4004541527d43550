#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nsrl/envs.hpp"
#include "nsrl/model.hpp"
#include "nsrl/rng.hpp"
#include "nsrl/runner.hpp"

namespace nsrl {

/// Geometric grid of candidate epoch counts explored by the meta bandit.
struct CandidateGrid {
    std::int64_t W = 1;  // phase length in episodes
    int J = 0;           // arms are 0..J
    std::vector<int> values;

    int arms() const { return J + 1; }
};

/// W = floor(sqrt(H T)), J = ceil(ln W),
/// values[j] = max(1, floor(T W^(j/J) / (S A H^2 W))).
CandidateGrid candidate_grid(std::int64_t T, int S, int A, int H);

struct Exp3PParams {
    double alpha = 0.0;
    double gamma = 0.0;
};

/// alpha = 2 sqrt(ln(n (J+1) / delta)),
/// gamma = min{3/5, 2 sqrt(3/5 (J+1) ln(J+1) / n)} with n = ceil(M/W).
Exp3PParams exp3p_params(std::int64_t M, std::int64_t W, int J, double delta);

/// Exp3.P over `arms` arms for a known number of rounds. Weights are kept in
/// log space; probabilities only depend on their differences.
class Exp3P {
public:
    Exp3P(int arms, std::int64_t rounds, Exp3PParams params);

    int arms() const { return static_cast<int>(log_weights_.size()); }
    std::int64_t rounds() const { return rounds_; }
    std::int64_t round() const { return round_; }
    const Exp3PParams& params() const { return params_; }
    const std::vector<double>& log_weights() const { return log_weights_; }

    /// p(j) = (1 - gamma) s(j) / sum s + gamma / (J+1).
    std::vector<double> probabilities() const;

    /// Always consumes one uniform draw, even with a single arm.
    int draw(Rng& rng) const;

    /// Feeds the raw reward sum `reward` of the chosen arm, with
    /// `reward / scale` in [0,1]; every arm's weight is updated.
    void update(int chosen, double reward, double scale);

private:
    std::vector<double> log_weights_;
    std::int64_t rounds_;
    std::int64_t round_ = 0;
    Exp3PParams params_;
};

struct PhaseRecord {
    int phase = 0;
    int arm = 0;
    int epochs = 0;         // D_i
    int epoch_length = 0;   // K_i
    int first_episode = 1;
    int episodes = 0;
    double reward = 0.0;
    std::vector<double> probabilities;  // p_i before the draw
};

struct DoubleRestartOptions {
    double delta = 0.1;                      // Exp3.P failure probability
    std::optional<double> agent_delta;       // inner learner; defaults to delta
    std::optional<double> ref_threshold;
    std::optional<CandidateGrid> grid;       // overrides candidate_grid
    RunOptions run;
};

struct DoubleRestartResult {
    RunTrace trace;
    CandidateGrid grid;
    Exp3PParams params;
    std::vector<PhaseRecord> phases;
    std::vector<double> final_probabilities;
};

/// Phases of W episodes; each phase draws an arm, runs a fresh Freedman
/// learner (no local budgets) restarting every K_i = floor(M / D_i)
/// episodes, and feeds the phase reward back to Exp3.P.
DoubleRestartResult run_double_restart(const NonstationaryEnv& env, Rng& rng,
                                       const DoubleRestartOptions& opts = {});

}  // namespace nsrl

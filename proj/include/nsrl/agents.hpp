#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsrl/model.hpp"
#include "nsrl/rng.hpp"
#include "nsrl/schedule.hpp"

namespace nsrl {

/// sqrt(H^2 iota / n) + sqrt(iota / n).
double hoeffding_bonus(std::int64_t n_stage, int H, double iota);

/// Freedman-style bonus built from the reference sums (n visits) and the
/// current-stage advantage sums (n_stage visits). Negative empirical
/// variances from rounding are clipped to zero.
double freedman_bonus(std::int64_t n, std::int64_t n_stage, double mu_ref, double sigma_ref,
                      double mu_stage, double sigma_stage, int H, double iota);

/// Epoch counts that balance restart cost against drift, rounded to the
/// nearest integer and clamped to [1, M]. The Hoeffding variant uses M = T/H.
int epochs_hoeffding(int S, int A, double budget, int H, std::int64_t T);
int epochs_freedman(int S, int A, double budget, std::int64_t T, int M);

/// Problem dimensions an agent is built for. The mask (H*S*A, row-major
/// [h][s][a]) defaults to all-valid.
struct AgentShape {
    int H = 1, S = 1, A = 1;
    std::vector<std::uint8_t> mask;

    static AgentShape of(const MdpSnapshot& snap);
    bool valid(int h, int s, int a) const {
        return mask.empty() || mask[(static_cast<std::size_t>(h) * S + s) * A + a] != 0;
    }
};

class Agent {
public:
    virtual ~Agent() = default;

    virtual std::string name() const = 0;
    virtual int act(int h, int s, Rng& rng) = 0;
    virtual void observe(int h, int s, int a, double reward, int next_state) = 0;
    /// Reset every table to its initial value (start of a new epoch).
    virtual void restart() = 0;
    virtual TabularPolicy greedy_policy() const = 0;
    virtual const AgentShape& shape() const = 0;

    /// Agents that use local variation budgets receive
    /// b_delta = Delta_r^(d) + H Delta_p^(d) at the start of each epoch.
    virtual bool wants_local_budget() const { return false; }
    virtual void set_local_budget(double /*b_delta*/) {}
};

enum class BonusKind { Hoeffding, Freedman };
enum class BudgetMode { None, Known };

struct QUcbOptions {
    BonusKind bonus = BonusKind::Hoeffding;
    BudgetMode budgets = BudgetMode::None;
    double delta = 0.1;                       // failure probability, iota = log(2/delta)
    std::optional<double> ref_threshold;      // N0; default S A H^6 iota
};

/// Every table of a RestartQ-UCB learner. Per-(h,s,a) arrays are indexed
/// [h][s][a]; V and V_ref have H+1 rows with the last fixed at zero.
struct QUcbState {
    std::vector<double> Q;
    std::vector<double> V;
    std::vector<std::int64_t> N;
    std::vector<std::int64_t> N_stage;
    std::vector<std::int64_t> stage_len;
    std::vector<double> r_stage;
    std::vector<double> v_stage;
    // reference-advantage sums
    std::vector<double> mu_stage;
    std::vector<double> sigma_stage;
    std::vector<double> mu_ref;
    std::vector<double> sigma_ref;
    std::vector<double> V_ref;
    std::vector<std::int64_t> N_state;  // sum over actions of N, per (h,s)

    bool operator==(const QUcbState&) const = default;
};

struct StageUpdateEvent {
    int h = 0, s = 0, a = 0;
    std::int64_t n = 0;        // lifetime visits in this epoch
    std::int64_t n_stage = 0;  // samples used by the update
    std::int64_t stage_length = 0;
    double q_before = 0.0;
    double q_after = 0.0;
};

/// RestartQ-UCB with Hoeffding or Freedman bonuses. Q values only change at
/// per-(h,s,a) stage boundaries, each using the samples of the stage that
/// just ended. With BudgetMode::None the local-budget offsets are dropped.
class QUcbAgent final : public Agent {
public:
    QUcbAgent(AgentShape shape, QUcbOptions opts, std::string label = {});

    std::string name() const override;
    int act(int h, int s, Rng& rng) override;
    void observe(int h, int s, int a, double reward, int next_state) override;
    void restart() override;
    TabularPolicy greedy_policy() const override;
    const AgentShape& shape() const override { return shape_; }

    bool wants_local_budget() const override { return opts_.budgets == BudgetMode::Known; }
    void set_local_budget(double b_delta) override { b_delta_ = b_delta; }

    void stage_update_hoeffding(int h, int s, int a);
    void stage_update_freedman(int h, int s, int a);

    const QUcbState& state() const { return st_; }
    const QUcbOptions& options() const { return opts_; }
    double iota() const { return iota_; }
    double ref_threshold() const { return n0_; }
    double local_budget() const { return b_delta_; }

    double q(int h, int s, int a) const { return st_.Q[idx(h, s, a)]; }
    double v(int h, int s) const { return st_.V[sidx(h, s)]; }
    double v_ref(int h, int s) const { return st_.V_ref[sidx(h, s)]; }

    /// Invoked after every stage update (tests and monitors).
    std::function<void(const StageUpdateEvent&)> on_stage_update;

private:
    std::size_t idx(int h, int s, int a) const {
        return (static_cast<std::size_t>(h) * shape_.S + s) * shape_.A + a;
    }
    std::size_t sidx(int h, int s) const { return static_cast<std::size_t>(h) * shape_.S + s; }
    double hoeffding_candidate(std::size_t i) const;
    void refresh_v(int h, int s);
    void finish_stage(int h, int s, int a, double q_before);

    AgentShape shape_;
    QUcbOptions opts_;
    std::string label_;
    double iota_;
    double n0_;
    double b_delta_ = 0.0;
    QUcbState st_;
};

/// Epsilon-greedy baseline over stage-averaged value estimates: the
/// RestartQ-UCB update without bonus or running minimum. Tables start at
/// H-h (optimistic) or at zero.
class EpsilonGreedyAgent final : public Agent {
public:
    EpsilonGreedyAgent(AgentShape shape, double epsilon, std::string label = {}, bool optimistic_init = false);

    std::string name() const override;
    int act(int h, int s, Rng& rng) override;
    void observe(int h, int s, int a, double reward, int next_state) override;
    void restart() override;
    TabularPolicy greedy_policy() const override;
    const AgentShape& shape() const override { return shape_; }

    double epsilon() const { return epsilon_; }
    double q(int h, int s, int a) const { return Q_[idx(h, s, a)]; }

private:
    std::size_t idx(int h, int s, int a) const {
        return (static_cast<std::size_t>(h) * shape_.S + s) * shape_.A + a;
    }
    int argmax(int h, int s) const;

    AgentShape shape_;
    double epsilon_;
    bool optimistic_;
    std::string label_;
    std::vector<double> Q_, V_, r_stage_, v_stage_;
    std::vector<std::int64_t> N_stage_, stage_len_;
};

/// Lowest-index valid action maximizing `values[a]` over a row of length A.
int argmax_valid(const AgentShape& shape, int h, int s, const double* values);

}  // namespace nsrl

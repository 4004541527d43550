#include "nsrl/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsrl {

double hoeffding_bonus(std::int64_t n_stage, int H, double iota) {
    require(n_stage >= 1, "hoeffding_bonus: stage count must be positive");
    const double n = static_cast<double>(n_stage);
    return std::sqrt(static_cast<double>(H) * H * iota / n) + std::sqrt(iota / n);
}

double freedman_bonus(std::int64_t n, std::int64_t n_stage, double mu_ref, double sigma_ref,
                      double mu_stage, double sigma_stage, int H, double iota) {
    require(n >= 1 && n_stage >= 1, "freedman_bonus: counts must be positive");
    const double nn = static_cast<double>(n);
    const double ns = static_cast<double>(n_stage);
    const double var_ref = std::max(0.0, sigma_ref / nn - (mu_ref / nn) * (mu_ref / nn));
    const double var_adv = std::max(0.0, sigma_stage / ns - (mu_stage / ns) * (mu_stage / ns));
    const double i34 = std::pow(iota, 0.75);
    return 2.0 * std::sqrt(var_ref * iota / nn) + 2.0 * std::sqrt(var_adv * iota / ns) +
           5.0 * (H * iota / nn + H * iota / ns + H * i34 / std::pow(nn, 0.75) +
                  H * i34 / std::pow(ns, 0.75)) +
           std::sqrt(iota / ns);
}

namespace {

int round_and_clamp(double raw, int M) {
    const double r = std::nearbyint(raw);
    if (!(r >= 1.0)) return 1;
    if (r >= static_cast<double>(M)) return M;
    return static_cast<int>(r);
}

}  // namespace

int epochs_hoeffding(int S, int A, double budget, int H, std::int64_t T) {
    require(budget > 0.0, "epochs_hoeffding: budget must be positive (use D = 1 when stationary)");
    require(T >= 1 && H >= 1 && S >= 1 && A >= 1, "epochs_hoeffding: bad dimensions");
    const double raw = std::cbrt(1.0 / S) * std::cbrt(1.0 / A) * std::cbrt(budget * budget) /
                       std::cbrt(static_cast<double>(H) * H) * std::cbrt(static_cast<double>(T));
    return round_and_clamp(raw, static_cast<int>(std::max<std::int64_t>(1, T / H)));
}

int epochs_freedman(int S, int A, double budget, std::int64_t T, int M) {
    require(budget > 0.0, "epochs_freedman: budget must be positive (use D = 1 when stationary)");
    require(T >= 1 && M >= 1 && S >= 1 && A >= 1, "epochs_freedman: bad dimensions");
    const double raw = std::cbrt(1.0 / S) * std::cbrt(1.0 / A) * std::cbrt(budget * budget) *
                       std::cbrt(static_cast<double>(T));
    return round_and_clamp(raw, M);
}

AgentShape AgentShape::of(const MdpSnapshot& snap) {
    AgentShape shape{snap.H(), snap.S(), snap.A(), {}};
    bool all_valid = true;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(snap.H()) * snap.S() * snap.A(), 1);
    for (int h = 0; h < snap.H(); ++h)
        for (int s = 0; s < snap.S(); ++s)
            for (int a = 0; a < snap.A(); ++a)
                if (!snap.valid(h, s, a)) {
                    mask[(static_cast<std::size_t>(h) * snap.S() + s) * snap.A() + a] = 0;
                    all_valid = false;
                }
    if (!all_valid) shape.mask = std::move(mask);
    return shape;
}

int argmax_valid(const AgentShape& shape, int h, int s, const double* values) {
    int best = -1;
    for (int a = 0; a < shape.A; ++a) {
        if (!shape.valid(h, s, a)) continue;
        if (best < 0 || values[a] > values[best]) best = a;
    }
    require(best >= 0, "no valid action at (h, s)");
    return best;
}

// ---------------------------------------------------------------------------

QUcbAgent::QUcbAgent(AgentShape shape, QUcbOptions opts, std::string label)
    : shape_(std::move(shape)), opts_(opts), label_(std::move(label)) {
    require(shape_.H >= 1 && shape_.S >= 1 && shape_.A >= 1, "QUcbAgent: bad dimensions");
    require(opts_.delta > 0.0 && opts_.delta < 2.0, "QUcbAgent: delta must lie in (0,2)");
    iota_ = std::log(2.0 / opts_.delta);
    n0_ = opts_.ref_threshold.value_or(static_cast<double>(shape_.S) * shape_.A *
                                       std::pow(static_cast<double>(shape_.H), 6) * iota_);
    n0_ = std::ceil(n0_);
    restart();
}

std::string QUcbAgent::name() const {
    if (!label_.empty()) return label_;
    std::string n = "restart-q-ucb-";
    n += opts_.bonus == BonusKind::Hoeffding ? "hoeffding" : "freedman";
    if (opts_.budgets == BudgetMode::Known) n += "-known";
    return n;
}

void QUcbAgent::restart() {
    const int H = shape_.H, S = shape_.S, A = shape_.A;
    const std::size_t n = static_cast<std::size_t>(H) * S * A;
    const std::size_t ns = static_cast<std::size_t>(H + 1) * S;
    st_.Q.assign(n, 0.0);
    st_.V.assign(ns, 0.0);
    for (int h = 0; h < H; ++h) {
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < A; ++a) st_.Q[idx(h, s, a)] = static_cast<double>(H - h);
            st_.V[sidx(h, s)] = static_cast<double>(H - h);
        }
    }
    st_.N.assign(n, 0);
    st_.N_stage.assign(n, 0);
    st_.stage_len.assign(n, H);
    st_.r_stage.assign(n, 0.0);
    st_.v_stage.assign(n, 0.0);
    if (opts_.bonus == BonusKind::Freedman) {
        st_.mu_stage.assign(n, 0.0);
        st_.sigma_stage.assign(n, 0.0);
        st_.mu_ref.assign(n, 0.0);
        st_.sigma_ref.assign(n, 0.0);
        st_.V_ref.assign(ns, 0.0);
        std::fill(st_.V_ref.begin(), st_.V_ref.begin() + static_cast<std::ptrdiff_t>(H) * S,
                  static_cast<double>(H));
        st_.N_state.assign(static_cast<std::size_t>(H) * S, 0);
    }
}

int QUcbAgent::act(int h, int s, Rng& /*rng*/) {
    return argmax_valid(shape_, h, s, st_.Q.data() + idx(h, s, 0));
}

void QUcbAgent::observe(int h, int s, int a, double reward, int next_state) {
    require(shape_.valid(h, s, a), "observe: masked action");
    const std::size_t i = idx(h, s, a);
    const double v_next = st_.V[sidx(h + 1, next_state)];
    st_.r_stage[i] += reward;
    st_.v_stage[i] += v_next;
    const bool freedman = opts_.bonus == BonusKind::Freedman;
    if (freedman) {
        const double ref_next = st_.V_ref[sidx(h + 1, next_state)];
        const double adv = v_next - ref_next;
        st_.mu_stage[i] += adv;
        st_.sigma_stage[i] += adv * adv;
        st_.mu_ref[i] += ref_next;
        st_.sigma_ref[i] += ref_next * ref_next;
    }
    ++st_.N[i];
    ++st_.N_stage[i];
    if (st_.N_stage[i] == st_.stage_len[i]) {
        if (freedman)
            stage_update_freedman(h, s, a);
        else
            stage_update_hoeffding(h, s, a);
    }
    if (freedman) {
        const std::size_t j = static_cast<std::size_t>(h) * shape_.S + s;
        if (static_cast<double>(++st_.N_state[j]) == n0_) st_.V_ref[sidx(h, s)] = st_.V[sidx(h, s)];
    }
}

double QUcbAgent::hoeffding_candidate(std::size_t i) const {
    const double ns = static_cast<double>(st_.N_stage[i]);
    double cand = st_.r_stage[i] / ns + st_.v_stage[i] / ns +
                  hoeffding_bonus(st_.N_stage[i], shape_.H, iota_);
    if (opts_.budgets == BudgetMode::Known) cand += 2.0 * b_delta_;
    return cand;
}

void QUcbAgent::stage_update_hoeffding(int h, int s, int a) {
    const std::size_t i = idx(h, s, a);
    require(st_.N_stage[i] >= 1, "stage update without samples");
    const double before = st_.Q[i];
    st_.Q[i] = std::min(hoeffding_candidate(i), before);
    finish_stage(h, s, a, before);
}

void QUcbAgent::stage_update_freedman(int h, int s, int a) {
    const std::size_t i = idx(h, s, a);
    require(st_.N_stage[i] >= 1 && st_.N[i] >= 1, "stage update without samples");
    const double before = st_.Q[i];
    const double ns = static_cast<double>(st_.N_stage[i]);
    const double n = static_cast<double>(st_.N[i]);
    const double bonus = freedman_bonus(st_.N[i], st_.N_stage[i], st_.mu_ref[i], st_.sigma_ref[i],
                                        st_.mu_stage[i], st_.sigma_stage[i], shape_.H, iota_);
    double cand = st_.r_stage[i] / ns + st_.mu_ref[i] / n + st_.mu_stage[i] / ns + 2.0 * bonus;
    if (opts_.budgets == BudgetMode::Known) cand += 4.0 * b_delta_;
    st_.Q[i] = std::min({hoeffding_candidate(i), cand, before});
    finish_stage(h, s, a, before);
}

void QUcbAgent::finish_stage(int h, int s, int a, double q_before) {
    const std::size_t i = idx(h, s, a);
    refresh_v(h, s);
    if (on_stage_update)
        on_stage_update({h, s, a, st_.N[i], st_.N_stage[i], st_.stage_len[i], q_before, st_.Q[i]});
    st_.N_stage[i] = 0;
    st_.r_stage[i] = 0.0;
    st_.v_stage[i] = 0.0;
    if (opts_.bonus == BonusKind::Freedman) {
        st_.mu_stage[i] = 0.0;
        st_.sigma_stage[i] = 0.0;
    }
    st_.stage_len[i] = next_stage_length(st_.stage_len[i], shape_.H);
}

void QUcbAgent::refresh_v(int h, int s) {
    const double* row = st_.Q.data() + idx(h, s, 0);
    st_.V[sidx(h, s)] = row[argmax_valid(shape_, h, s, row)];
}

TabularPolicy QUcbAgent::greedy_policy() const {
    TabularPolicy pi(shape_.H, shape_.S);
    for (int h = 0; h < shape_.H; ++h)
        for (int s = 0; s < shape_.S; ++s)
            pi.at(h, s) = argmax_valid(shape_, h, s, st_.Q.data() + idx(h, s, 0));
    return pi;
}

// ---------------------------------------------------------------------------

EpsilonGreedyAgent::EpsilonGreedyAgent(AgentShape shape, double epsilon, std::string label, bool optimistic_init)
    : shape_(std::move(shape)), epsilon_(epsilon), optimistic_(optimistic_init), label_(std::move(label)) {
    require(epsilon >= 0.0 && epsilon <= 1.0, "EpsilonGreedyAgent: epsilon must lie in [0,1]");
    restart();
}

std::string EpsilonGreedyAgent::name() const {
    return label_.empty() ? std::string("epsilon-greedy") : label_;
}

void EpsilonGreedyAgent::restart() {
    const std::size_t n = static_cast<std::size_t>(shape_.H) * shape_.S * shape_.A;
    Q_.assign(n, 0.0);
    V_.assign(static_cast<std::size_t>(shape_.H + 1) * shape_.S, 0.0);
    r_stage_.assign(n, 0.0);
    v_stage_.assign(n, 0.0);
    N_stage_.assign(n, 0);
    stage_len_.assign(n, shape_.H);
    if (!optimistic_) return;
    for (int h = 0; h < shape_.H; ++h)
        for (int s = 0; s < shape_.S; ++s) {
            for (int a = 0; a < shape_.A; ++a) Q_[idx(h, s, a)] = static_cast<double>(shape_.H - h);
            V_[static_cast<std::size_t>(h) * shape_.S + s] = static_cast<double>(shape_.H - h);
        }
}

int EpsilonGreedyAgent::argmax(int h, int s) const {
    return argmax_valid(shape_, h, s, Q_.data() + idx(h, s, 0));
}

int EpsilonGreedyAgent::act(int h, int s, Rng& rng) {
    if (epsilon_ > 0.0 && rng.uniform() < epsilon_) {
        int valid = 0;
        for (int a = 0; a < shape_.A; ++a) valid += shape_.valid(h, s, a) ? 1 : 0;
        auto k = static_cast<int>(rng.below(static_cast<std::uint64_t>(valid)));
        for (int a = 0; a < shape_.A; ++a)
            if (shape_.valid(h, s, a) && k-- == 0) return a;
    }
    return argmax(h, s);
}

void EpsilonGreedyAgent::observe(int h, int s, int a, double reward, int next_state) {
    require(shape_.valid(h, s, a), "observe: masked action");
    const std::size_t i = idx(h, s, a);
    r_stage_[i] += reward;
    v_stage_[i] += V_[static_cast<std::size_t>(h + 1) * shape_.S + next_state];
    if (++N_stage_[i] == stage_len_[i]) {
        const double n = static_cast<double>(N_stage_[i]);
        Q_[i] = r_stage_[i] / n + v_stage_[i] / n;
        V_[static_cast<std::size_t>(h) * shape_.S + s] = Q_[idx(h, s, argmax(h, s))];
        N_stage_[i] = 0;
        r_stage_[i] = 0.0;
        v_stage_[i] = 0.0;
        stage_len_[i] = next_stage_length(stage_len_[i], shape_.H);
    }
}

TabularPolicy EpsilonGreedyAgent::greedy_policy() const {
    TabularPolicy pi(shape_.H, shape_.S);
    for (int h = 0; h < shape_.H; ++h)
        for (int s = 0; s < shape_.S; ++s) pi.at(h, s) = argmax(h, s);
    return pi;
}

}  // namespace nsrl

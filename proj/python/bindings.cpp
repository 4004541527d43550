#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nsrl/harness.hpp"

namespace py = pybind11;
using namespace nsrl;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

MdpSnapshot snapshot_from(const Array& P, const Array& R) {
    if (P.ndim() != 4 || R.ndim() != 3) throw py::value_error("P must be (H,S,A,S) and R must be (H,S,A)");
    const int H = static_cast<int>(P.shape(0)), S = static_cast<int>(P.shape(1)), A = static_cast<int>(P.shape(2));
    if (P.shape(3) != S || R.shape(0) != H || R.shape(1) != S || R.shape(2) != A)
        throw py::value_error("P and R shapes disagree");
    MdpSnapshot snap(H, S, A);
    auto p = P.unchecked<4>();
    auto r = R.unchecked<3>();
    for (int h = 0; h < H; ++h)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                snap.r(h, s, a) = r(h, s, a);
                for (int k = 0; k < S; ++k) snap.p(h, s, a, k) = p(h, s, a, k);
            }
    const auto report = validate_snapshot(snap);
    if (!report.empty())
        throw py::value_error(std::string("invalid snapshot: ") + to_string(report.front().kind));
    return snap;
}

Array table(const std::vector<double>& v, std::vector<py::ssize_t> shape) {
    Array out(shape);
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

ExperimentConfig config_from(const std::string& text) {
    try {
        return parse_config(nlohmann::json::parse(text, nullptr, true, true));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(e.what());
    }
}

py::dict stats_dict(const AggregateStats& st) {
    py::dict d;
    d["mean_cum_reward"] = st.mean_cum_reward;
    d["std_cum_reward"] = st.std_cum_reward;
    d["mean_cum_regret"] = st.mean_cum_regret;
    d["std_cum_regret"] = st.std_cum_regret;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Tabular non-stationary RL core";
    m.attr("__version__") = kVersion;

    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("stage_ends", [](int H, std::int64_t n_max) {
        const auto st = stage_ends(H, n_max);
        return py::make_tuple(st.lengths, st.ends);
    }, py::arg("H"), py::arg("n_max"), "Stage lengths and ending times up to n_max.");

    m.def("hoeffding_bonus", &hoeffding_bonus, py::arg("n_stage"), py::arg("H"), py::arg("iota"));
    m.def("freedman_bonus", &freedman_bonus, py::arg("n"), py::arg("n_stage"), py::arg("mu_ref"),
          py::arg("sigma_ref"), py::arg("mu_stage"), py::arg("sigma_stage"), py::arg("H"), py::arg("iota"));
    m.def("epochs_hoeffding", &epochs_hoeffding, py::arg("S"), py::arg("A"), py::arg("budget"), py::arg("H"),
          py::arg("T"));
    m.def("epochs_freedman", &epochs_freedman, py::arg("S"), py::arg("A"), py::arg("budget"), py::arg("T"),
          py::arg("M"));

    m.def("candidate_grid", [](std::int64_t T, int S, int A, int H) {
        const auto g = candidate_grid(T, S, A, H);
        py::dict d;
        d["W"] = g.W;
        d["J"] = g.J;
        d["values"] = g.values;
        return d;
    }, py::arg("T"), py::arg("S"), py::arg("A"), py::arg("H"));
    m.def("exp3p_params", [](std::int64_t M, std::int64_t W, int J, double delta) {
        const auto p = exp3p_params(M, W, J, delta);
        return py::make_tuple(p.alpha, p.gamma);
    }, py::arg("M"), py::arg("W"), py::arg("J"), py::arg("delta"));

    m.def("optimal_values", [](const Array& P, const Array& R) {
        const auto snap = snapshot_from(P, R);
        const auto vt = optimal_values(snap);
        return py::make_tuple(table(vt.V, {snap.H() + 1, snap.S()}), table(vt.Q, {snap.H(), snap.S(), snap.A()}));
    }, py::arg("P"), py::arg("R"), "Exact V* (H+1, S) and Q* (H, S, A).");
    m.def("policy_value", [](const Array& P, const Array& R, const py::array_t<int>& pi) {
        const auto snap = snapshot_from(P, R);
        if (pi.ndim() != 2 || pi.shape(0) != snap.H() || pi.shape(1) != snap.S())
            throw py::value_error("policy must be (H, S)");
        TabularPolicy policy(snap.H(), snap.S());
        auto v = pi.unchecked<2>();
        for (int h = 0; h < snap.H(); ++h)
            for (int s = 0; s < snap.S(); ++s) policy.at(h, s) = v(h, s);
        check_policy(snap, policy);
        return table(policy_value(snap, policy), {snap.H() + 1, snap.S()});
    }, py::arg("P"), py::arg("R"), py::arg("policy"));

    m.def("variation_budgets", [](const std::string& config) {
        const auto cfg = config_from(config);
        const auto env = build_env(cfg);
        const auto rep = variation_budgets(env);
        py::dict d;
        d["delta_r"] = rep.delta_r;
        d["delta_p"] = rep.delta_p;
        d["per_step_r"] = rep.per_step_r;
        d["per_step_p"] = rep.per_step_p;
        return d;
    }, py::arg("config"), "Variation budgets of the env described by a JSON config string.");

    m.def("run_experiment", [](const std::string& config, std::optional<int> seeds, std::optional<std::string> output) {
        auto cfg = config_from(config);
        if (seeds) cfg.seeds = *seeds;
        if (output) cfg.output = *output;
        ExperimentResult res;
        {
            py::gil_scoped_release release;
            res = run_experiment(cfg, output.has_value());
        }
        py::dict d = stats_dict(res.stats);
        std::vector<std::string> files;
        for (const auto& f : res.files) files.push_back(f.string());
        d["files"] = files;
        return d;
    }, py::arg("config"), py::arg("seeds") = py::none(), py::arg("output") = py::none(),
       "Run every seed of a JSON config; files are written only when output is given.");
}

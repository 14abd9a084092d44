#include "ergoloop/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "ergoloop/linear_block.hpp"

namespace ergoloop {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) {
    throw ConfigError(ptr, msg);
}

void check_keys(const json& obj, const std::string& ptr,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(ptr, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.count(key)) fail(ptr + "/" + key, "unknown key");
}

const json& require(const json& obj, const std::string& ptr, const char* key) {
    if (!obj.contains(key)) fail(ptr, std::string("missing required key '") + key + "'");
    return obj.at(key);
}

double as_number(const json& j, const std::string& ptr) {
    if (!j.is_number()) fail(ptr, "expected a number");
    return j.get<double>();
}

std::size_t as_positive_int(const json& j, const std::string& ptr) {
    if (!j.is_number_integer() || j.get<long long>() < 1) fail(ptr, "expected a positive integer");
    return j.get<std::size_t>();
}

std::uint64_t as_seed(const json& j, const std::string& ptr) {
    if (!j.is_number_integer() || j.get<long long>() < 0)
        fail(ptr, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

Vec as_vector(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) fail(ptr, "expected a non-empty array of numbers");
    Vec v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_number(j[i], ptr + "/" + std::to_string(i)));
    return v;
}

Matrix as_matrix(const json& j, const std::string& ptr) {
    if (j.is_number()) return Matrix::scalar(j.get<double>());
    if (!j.is_array() || j.empty()) fail(ptr, "expected a matrix (array of row arrays)");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Vec entries;
    for (std::size_t i = 0; i < rows; ++i) {
        const Vec row = as_vector(j[i], ptr + "/" + std::to_string(i));
        if (i == 0)
            cols = row.size();
        else if (row.size() != cols)
            fail(ptr + "/" + std::to_string(i), "ragged matrix rows");
        entries.insert(entries.end(), row.begin(), row.end());
    }
    return Matrix(rows, cols, std::move(entries));
}

ProbabilityFunction parse_prob(const json& j, const std::string& ptr) {
    check_keys(j, ptr, {"family", "value", "midpoint", "slope", "points", "floor"});
    const std::string family = require(j, ptr, "family").get<std::string>();
    ProbabilityFunction f;
    f.floor = j.contains("floor") ? as_number(j.at("floor"), ptr + "/floor") : 0.0;
    if (f.floor < 0.0 || f.floor >= 1.0) fail(ptr + "/floor", "floor must lie in [0, 1)");
    if (family == "constant") {
        f.family = ConstantProb{as_number(require(j, ptr, "value"), ptr + "/value")};
    } else if (family == "logistic") {
        f.family = LogisticProb{as_number(require(j, ptr, "midpoint"), ptr + "/midpoint"),
                                as_number(require(j, ptr, "slope"), ptr + "/slope")};
    } else if (family == "piecewise_linear") {
        const json& pts = require(j, ptr, "points");
        if (!pts.is_array() || pts.size() < 2) fail(ptr + "/points", "need at least two points");
        PiecewiseLinearProb p;
        double last = -1e308;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Vec pair = as_vector(pts[i], ptr + "/points/" + std::to_string(i));
            if (pair.size() != 2)
                fail(ptr + "/points/" + std::to_string(i), "each point is [pi, value]");
            if (pair[0] <= last)
                fail(ptr + "/points/" + std::to_string(i), "points must be sorted by pi");
            last = pair[0];
            p.points.emplace_back(pair[0], pair[1]);
        }
        f.family = std::move(p);
    } else {
        fail(ptr + "/family", "unknown family '" + family +
                                  "' (expected constant, logistic, or piecewise_linear)");
    }
    return f;
}

Agent parse_agent(const json& j, const std::string& ptr) {
    const std::string kind = require(j, ptr, "kind").get<std::string>();
    if (kind == "affine") {
        check_keys(j, ptr, {"kind", "A", "c", "b_choices", "d_choices"});
        AffineAgent a;
        a.A = as_matrix(require(j, ptr, "A"), ptr + "/A");
        a.c = as_vector(require(j, ptr, "c"), ptr + "/c");
        const json& bs = require(j, ptr, "b_choices");
        if (!bs.is_array() || bs.empty()) fail(ptr + "/b_choices", "expected a non-empty array");
        for (std::size_t i = 0; i < bs.size(); ++i) {
            const std::string bptr = ptr + "/b_choices/" + std::to_string(i);
            check_keys(bs[i], bptr, {"value", "prob"});
            a.b_choices.push_back(as_vector(require(bs[i], bptr, "value"), bptr + "/value"));
            a.b_probs.push_back(parse_prob(require(bs[i], bptr, "prob"), bptr + "/prob"));
        }
        const json& ds = require(j, ptr, "d_choices");
        if (!ds.is_array() || ds.empty()) fail(ptr + "/d_choices", "expected a non-empty array");
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const std::string dptr = ptr + "/d_choices/" + std::to_string(i);
            check_keys(ds[i], dptr, {"value", "prob"});
            a.d_choices.push_back(as_number(require(ds[i], dptr, "value"), dptr + "/value"));
            a.d_probs.push_back(parse_prob(require(ds[i], dptr, "prob"), dptr + "/prob"));
        }
        a.x = Vec(a.A.rows(), 0.0);
        try {
            a.validate();
        } catch (const std::exception& ex) {
            fail(ptr, ex.what());
        }
        return a;
    }
    if (kind == "lipschitz") {
        check_keys(j, ptr, {"kind", "state_dim", "transition_maps", "output_maps"});
        LipschitzAgent a;
        const std::size_t dim = as_positive_int(require(j, ptr, "state_dim"), ptr + "/state_dim");
        a.x = Vec(dim, 0.0);
        const json& tms = require(j, ptr, "transition_maps");
        if (!tms.is_array() || tms.empty()) fail(ptr + "/transition_maps", "expected a non-empty array");
        for (std::size_t i = 0; i < tms.size(); ++i) {
            const std::string mptr = ptr + "/transition_maps/" + std::to_string(i);
            const std::string type = require(tms[i], mptr, "type").get<std::string>();
            if (type == "affine") {
                check_keys(tms[i], mptr, {"type", "M", "b", "prob"});
                a.transition_maps.push_back(make_lipschitz_map(
                    AffineMap{as_matrix(require(tms[i], mptr, "M"), mptr + "/M"),
                              as_vector(require(tms[i], mptr, "b"), mptr + "/b")}));
            } else if (type == "saturated_affine") {
                check_keys(tms[i], mptr, {"type", "M", "b", "lo", "hi", "prob"});
                a.transition_maps.push_back(make_lipschitz_map(SaturatedAffineMap{
                    as_matrix(require(tms[i], mptr, "M"), mptr + "/M"),
                    as_vector(require(tms[i], mptr, "b"), mptr + "/b"),
                    as_number(require(tms[i], mptr, "lo"), mptr + "/lo"),
                    as_number(require(tms[i], mptr, "hi"), mptr + "/hi")}));
            } else if (type == "tanh") {
                check_keys(tms[i], mptr, {"type", "gain", "scale", "b", "prob"});
                a.transition_maps.push_back(make_lipschitz_map(
                    TanhMap{as_number(require(tms[i], mptr, "gain"), mptr + "/gain"),
                            as_number(require(tms[i], mptr, "scale"), mptr + "/scale"),
                            as_vector(require(tms[i], mptr, "b"), mptr + "/b")}));
            } else {
                fail(mptr + "/type", "unknown transition map type '" + type + "'");
            }
            a.transition_probs.push_back(parse_prob(require(tms[i], mptr, "prob"), mptr + "/prob"));
        }
        const json& oms = require(j, ptr, "output_maps");
        if (!oms.is_array() || oms.empty()) fail(ptr + "/output_maps", "expected a non-empty array");
        for (std::size_t i = 0; i < oms.size(); ++i) {
            const std::string mptr = ptr + "/output_maps/" + std::to_string(i);
            const std::string type = require(oms[i], mptr, "type").get<std::string>();
            if (type == "affine") {
                check_keys(oms[i], mptr, {"type", "c", "d", "prob"});
                a.output_maps.push_back(make_output_map(
                    AffineFunctional{as_vector(require(oms[i], mptr, "c"), mptr + "/c"),
                                     as_number(require(oms[i], mptr, "d"), mptr + "/d")}));
            } else if (type == "tanh") {
                check_keys(oms[i], mptr, {"type", "c", "gain", "scale", "d", "prob"});
                a.output_maps.push_back(make_output_map(TanhFunctional{
                    as_vector(require(oms[i], mptr, "c"), mptr + "/c"),
                    as_number(require(oms[i], mptr, "gain"), mptr + "/gain"),
                    as_number(require(oms[i], mptr, "scale"), mptr + "/scale"),
                    as_number(require(oms[i], mptr, "d"), mptr + "/d")}));
            } else {
                fail(mptr + "/type", "unknown output map type '" + type + "'");
            }
            a.output_probs.push_back(parse_prob(require(oms[i], mptr, "prob"), mptr + "/prob"));
        }
        try {
            a.validate();
        } catch (const std::exception& ex) {
            fail(ptr, ex.what());
        }
        return a;
    }
    if (kind == "discrete") {
        check_keys(j, ptr, {"kind", "states", "transition_maps", "output_values"});
        DiscreteAgent a;
        a.n_states = as_positive_int(require(j, ptr, "states"), ptr + "/states");
        const json& tms = require(j, ptr, "transition_maps");
        if (!tms.is_array() || tms.empty()) fail(ptr + "/transition_maps", "expected a non-empty array");
        for (std::size_t i = 0; i < tms.size(); ++i) {
            const std::string mptr = ptr + "/transition_maps/" + std::to_string(i);
            check_keys(tms[i], mptr, {"map", "prob"});
            const Vec map = as_vector(require(tms[i], mptr, "map"), mptr + "/map");
            std::vector<std::uint32_t> m;
            m.reserve(map.size());
            for (double v : map) {
                if (v < 0 || v != std::floor(v)) fail(mptr + "/map", "state indices must be non-negative integers");
                m.push_back(static_cast<std::uint32_t>(v));
            }
            a.transition_maps.push_back(std::move(m));
            a.transition_probs.push_back(parse_prob(require(tms[i], mptr, "prob"), mptr + "/prob"));
        }
        a.output_values = as_vector(require(j, ptr, "output_values"), ptr + "/output_values");
        try {
            a.validate();
        } catch (const std::exception& ex) {
            fail(ptr, ex.what());
        }
        return a;
    }
    fail(ptr + "/kind", "unknown agent kind '" + kind + "' (expected affine, lipschitz, or discrete)");
}

LinearBlock parse_block(const json& j, const std::string& ptr, const std::string& default_name) {
    const std::string type = require(j, ptr, "type").get<std::string>();
    LinearBlock b;
    std::size_t period = 1;
    if (j.contains("update_period"))
        period = as_positive_int(j.at("update_period"), ptr + "/update_period");
    if (type == "recurrence") {
        check_keys(j, ptr, {"type", "name", "alpha", "beta", "kappa", "update_period"});
        b = realize_toy_controller(as_number(require(j, ptr, "alpha"), ptr + "/alpha"),
                                   as_number(require(j, ptr, "beta"), ptr + "/beta"),
                                   as_number(require(j, ptr, "kappa"), ptr + "/kappa"), period);
    } else if (type == "pi") {
        check_keys(j, ptr, {"type", "name", "kp", "ki", "update_period"});
        b = build_pi(as_number(require(j, ptr, "kp"), ptr + "/kp"),
                     as_number(require(j, ptr, "ki"), ptr + "/ki"));
        b.update_period = period;
    } else if (type == "lag") {
        check_keys(j, ptr, {"type", "name", "kp", "ki", "rho", "update_period"});
        try {
            b = build_lag(as_number(require(j, ptr, "kp"), ptr + "/kp"),
                          as_number(require(j, ptr, "ki"), ptr + "/ki"),
                          as_number(require(j, ptr, "rho"), ptr + "/rho"));
        } catch (const std::exception& ex) {
            fail(ptr + "/rho", ex.what());
        }
        b.update_period = period;
    } else if (type == "state_space") {
        check_keys(j, ptr, {"type", "name", "A", "B", "C", "D", "x0", "update_period"});
        b.A = as_matrix(require(j, ptr, "A"), ptr + "/A");
        b.B = as_matrix(require(j, ptr, "B"), ptr + "/B");
        b.C = as_matrix(require(j, ptr, "C"), ptr + "/C");
        b.D = as_matrix(require(j, ptr, "D"), ptr + "/D");
        b.x = j.contains("x0") ? as_vector(j.at("x0"), ptr + "/x0") : Vec(b.A.rows(), 0.0);
        b.held_output = Vec(b.C.rows(), 0.0);
        b.update_period = period;
        b.name = default_name;
    } else if (type == "delay") {
        check_keys(j, ptr, {"type", "name", "update_period"});
        b = make_delay_filter();
        b.update_period = period;
    } else if (type == "constant") {
        check_keys(j, ptr, {"type", "name", "value", "update_period"});
        // pi(k) = value forever; useful for open-loop (oracle) scenarios.
        b.A = Matrix::scalar(1.0);
        b.B = Matrix::scalar(0.0);
        b.C = Matrix::scalar(1.0);
        b.D = Matrix::scalar(0.0);
        b.x = Vec{as_number(require(j, ptr, "value"), ptr + "/value")};
        b.held_output = Vec(1, 0.0);
        b.update_period = period;
        b.name = default_name;
    } else {
        fail(ptr + "/type", "unknown block type '" + type + "'");
    }
    if (j.contains("name")) b.name = j.at("name").get<std::string>();
    else if (b.name.empty() || type == "recurrence" || type == "pi" || type == "lag" || type == "delay")
        b.name = default_name;
    try {
        b.validate();
    } catch (const std::exception& ex) {
        fail(ptr, ex.what());
    }
    return b;
}

EnsembleInit parse_ensemble_init(const json& j, const std::string& ptr) {
    const std::string mode = require(j, ptr, "mode").get<std::string>();
    if (mode == "constant") {
        check_keys(j, ptr, {"mode", "value"});
        return InitConstant{as_number(require(j, ptr, "value"), ptr + "/value")};
    }
    if (mode == "explicit") {
        check_keys(j, ptr, {"mode", "states"});
        const json& sts = require(j, ptr, "states");
        if (!sts.is_array() || sts.empty()) fail(ptr + "/states", "expected a non-empty array");
        InitExplicit e;
        for (std::size_t i = 0; i < sts.size(); ++i)
            e.states.push_back(as_vector(sts[i], ptr + "/states/" + std::to_string(i)));
        return e;
    }
    if (mode == "uniform") {
        check_keys(j, ptr, {"mode", "lo", "hi"});
        const double lo = as_number(require(j, ptr, "lo"), ptr + "/lo");
        const double hi = as_number(require(j, ptr, "hi"), ptr + "/hi");
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            fail(ptr, "uniform bounds must be finite with lo < hi");
        return InitUniform{lo, hi};
    }
    if (mode == "population_bernoulli") {
        check_keys(j, ptr, {"mode", "low", "high", "q"});
        InitPopulationBernoulli pb;
        pb.low = as_number(require(j, ptr, "low"), ptr + "/low");
        pb.high = as_number(require(j, ptr, "high"), ptr + "/high");
        if (j.contains("q")) {
            pb.q = as_number(j.at("q"), ptr + "/q");
            if (*pb.q < 0.0 || *pb.q > 1.0) fail(ptr + "/q", "q must lie in [0, 1]");
        }
        return pb;
    }
    fail(ptr + "/mode", "unknown initial-condition mode '" + mode + "'");
}

InitialConditions parse_initial_conditions(const json& j, const std::string& ptr,
                                           std::size_t n_ensembles) {
    check_keys(j, ptr, {"name", "ensembles", "controllers", "filters"});
    InitialConditions init;
    if (j.contains("name")) init.name = j.at("name").get<std::string>();
    if (j.contains("ensembles")) {
        const json& ens = j.at("ensembles");
        if (!ens.is_array() || ens.size() != n_ensembles)
            fail(ptr + "/ensembles", "need one initial-condition entry per ensemble");
        for (std::size_t i = 0; i < ens.size(); ++i)
            init.ensembles.push_back(
                parse_ensemble_init(ens[i], ptr + "/ensembles/" + std::to_string(i)));
    }
    if (j.contains("controllers")) {
        const json& cs = j.at("controllers");
        if (!cs.is_array()) fail(ptr + "/controllers", "expected an array of state vectors");
        for (std::size_t i = 0; i < cs.size(); ++i)
            init.controller_states.push_back(as_vector(cs[i], ptr + "/controllers/" + std::to_string(i)));
    }
    if (j.contains("filters")) {
        const json& fs = j.at("filters");
        if (!fs.is_array()) fail(ptr + "/filters", "expected an array of state vectors");
        for (std::size_t i = 0; i < fs.size(); ++i)
            init.filter_states.push_back(as_vector(fs[i], ptr + "/filters/" + std::to_string(i)));
    }
    return init;
}

TopologyKind parse_kind(const json& j, const std::string& ptr) {
    const std::string kind = j.get<std::string>();
    if (kind == "two_sided") return TopologyKind::two_sided;
    if (kind == "multi_sided") return TopologyKind::multi_sided;
    if (kind == "toy1") return TopologyKind::toy1;
    if (kind == "toy2") return TopologyKind::toy2;
    fail(ptr, "unknown topology kind '" + kind + "'");
}

}  // namespace

std::string stable_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

LoadedScenario parse_scenario(const json& doc, const std::string& name_hint) {
    check_keys(doc, "", {"name", "topology", "simulation", "diagnostics", "provenance"});
    LoadedScenario out;
    out.scenario.name = doc.contains("name") ? doc.at("name").get<std::string>() : name_hint;

    const json& topo = require(doc, "", "topology");
    check_keys(topo, "/topology",
               {"kind", "ensembles", "controllers", "filters", "H", "u", "r", "signal_ranges",
                "pi_initial"});
    Topology& t = out.scenario.topology;
    t.kind = parse_kind(require(topo, "/topology", "kind"), "/topology/kind");

    const json& ensembles = require(topo, "/topology", "ensembles");
    if (!ensembles.is_array() || ensembles.empty())
        fail("/topology/ensembles", "expected a non-empty array");
    for (std::size_t q = 0; q < ensembles.size(); ++q) {
        const std::string eptr = "/topology/ensembles/" + std::to_string(q);
        check_keys(ensembles[q], eptr, {"name", "size", "agent"});
        const std::size_t n = as_positive_int(require(ensembles[q], eptr, "size"), eptr + "/size");
        const Agent tpl = parse_agent(require(ensembles[q], eptr, "agent"), eptr + "/agent");
        Ensemble ens;
        ens.agents.assign(n, tpl);
        t.ensembles.push_back(std::move(ens));
    }

    const json& controllers = require(topo, "/topology", "controllers");
    if (!controllers.is_array() || controllers.empty())
        fail("/topology/controllers", "expected a non-empty array");
    for (std::size_t c = 0; c < controllers.size(); ++c)
        t.controllers.push_back(parse_block(controllers[c],
                                            "/topology/controllers/" + std::to_string(c),
                                            "controller" + std::to_string(c + 1)));

    const bool needs_filters =
        t.kind == TopologyKind::two_sided || t.kind == TopologyKind::multi_sided;
    if (topo.contains("filters") && !topo.at("filters").empty()) {
        const json& filters = topo.at("filters");
        if (!filters.is_array()) fail("/topology/filters", "expected an array");
        for (std::size_t f = 0; f < filters.size(); ++f)
            t.filters.push_back(parse_block(filters[f], "/topology/filters/" + std::to_string(f),
                                            "filter" + std::to_string(f + 1)));
    } else if (needs_filters) {
        // Omitted filters default to the identity-with-one-step-delay realization.
        for (std::size_t f = 0; f < t.ensembles.size(); ++f) {
            LinearBlock d = make_delay_filter();
            d.name = "filter" + std::to_string(f + 1);
            t.filters.push_back(std::move(d));
        }
    }

    if (topo.contains("H")) t.H = as_matrix(topo.at("H"), "/topology/H");

    const json& u = require(topo, "/topology", "u");
    if (!u.is_array() || u.empty()) fail("/topology/u", "expected a non-empty array");
    for (std::size_t i = 0; i < u.size(); ++i) {
        ExternalInput in;
        if (u[i].is_number())
            in.values = {u[i].get<double>()};
        else
            in.values = as_vector(u[i], "/topology/u/" + std::to_string(i));
        t.u.push_back(std::move(in));
    }
    if (topo.contains("r")) t.r = as_vector(topo.at("r"), "/topology/r");

    const json& ranges = require(topo, "/topology", "signal_ranges");
    if (!ranges.is_array() || ranges.empty())
        fail("/topology/signal_ranges", "expected a non-empty array");
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const std::string rptr = "/topology/signal_ranges/" + std::to_string(i);
        check_keys(ranges[i], rptr, {"lo", "hi"});
        SignalRange sr{as_number(require(ranges[i], rptr, "lo"), rptr + "/lo"),
                       as_number(require(ranges[i], rptr, "hi"), rptr + "/hi")};
        if (!(sr.lo < sr.hi)) fail(rptr, "need lo < hi");
        t.signal_ranges.push_back(sr);
    }
    if (topo.contains("pi_initial"))
        t.pi_initial = as_vector(topo.at("pi_initial"), "/topology/pi_initial");

    const json& sim = require(doc, "", "simulation");
    check_keys(sim, "/simulation",
               {"horizon", "runs", "base_seed", "record_granularity", "workers", "initial"});
    out.scenario.horizon = as_positive_int(require(sim, "/simulation", "horizon"),
                                           "/simulation/horizon");
    out.runs = sim.contains("runs") ? as_positive_int(sim.at("runs"), "/simulation/runs") : 1;
    out.scenario.base_seed =
        sim.contains("base_seed") ? as_seed(sim.at("base_seed"), "/simulation/base_seed") : 0;
    if (sim.contains("record_granularity")) {
        const std::string g = sim.at("record_granularity").get<std::string>();
        if (g == "aggregate_only")
            out.scenario.granularity = RecordGranularity::aggregate_only;
        else if (g == "per_agent")
            out.scenario.granularity = RecordGranularity::per_agent;
        else
            fail("/simulation/record_granularity", "expected aggregate_only or per_agent");
    }
    if (sim.contains("workers"))
        out.workers = as_positive_int(sim.at("workers"), "/simulation/workers");
    if (sim.contains("initial"))
        out.scenario.init =
            parse_initial_conditions(sim.at("initial"), "/simulation/initial", t.ensembles.size());

    if (doc.contains("diagnostics")) {
        const json& diag = doc.at("diagnostics");
        check_keys(diag, "/diagnostics",
                   {"burn_in", "tolerance", "runs_per_ic", "initial_conditions", "feasibility_r"});
        if (diag.contains("burn_in"))
            out.burn_in = as_positive_int(diag.at("burn_in"), "/diagnostics/burn_in");
        if (diag.contains("tolerance"))
            out.tolerance = as_number(diag.at("tolerance"), "/diagnostics/tolerance");
        if (diag.contains("runs_per_ic"))
            out.runs_per_ic = as_positive_int(diag.at("runs_per_ic"), "/diagnostics/runs_per_ic");
        if (diag.contains("feasibility_r"))
            out.feasibility_r = as_number(diag.at("feasibility_r"), "/diagnostics/feasibility_r");
        if (diag.contains("initial_conditions")) {
            const json& ics = diag.at("initial_conditions");
            if (!ics.is_array()) fail("/diagnostics/initial_conditions", "expected an array");
            for (std::size_t i = 0; i < ics.size(); ++i) {
                auto ic = parse_initial_conditions(
                    ics[i], "/diagnostics/initial_conditions/" + std::to_string(i),
                    t.ensembles.size());
                if (ic.name == "default") ic.name = "ic" + std::to_string(i + 1);
                out.diag_initial_conditions.push_back(std::move(ic));
            }
        }
    }

    try {
        t.validate();
    } catch (const std::exception& ex) {
        fail("/topology", ex.what());
    }

    out.normalized = doc;
    const std::string dump = out.normalized.dump();
    out.config_hash = stable_hash(dump);
    out.scenario.scenario_hash = out.config_hash;
    return out;
}

LoadedScenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& ex) {
        throw ConfigError("", std::string("invalid JSON: ") + ex.what());
    }
    std::string hint = path;
    const auto slash = hint.find_last_of('/');
    if (slash != std::string::npos) hint = hint.substr(slash + 1);
    const auto dot = hint.find_last_of('.');
    if (dot != std::string::npos) hint = hint.substr(0, dot);
    return parse_scenario(doc, hint);
}

nlohmann::json scenario_to_json(const LoadedScenario& s) {
    // The loader keeps the validated document; re-emitting it (plus any
    // overridden run parameters) round-trips exactly.
    json doc = s.normalized;
    doc["simulation"]["horizon"] = s.scenario.horizon;
    doc["simulation"]["runs"] = s.runs;
    doc["simulation"]["base_seed"] = s.scenario.base_seed;
    doc["simulation"]["record_granularity"] =
        s.scenario.granularity == RecordGranularity::per_agent ? "per_agent" : "aggregate_only";
    doc["name"] = s.scenario.name;
    return doc;
}

}  // namespace ergoloop

#include "ergoloop/certify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ergoloop/spectral.hpp"

namespace ergoloop {

namespace {

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::string agent_name(std::size_t q, std::size_t i) {
    return "ensemble" + std::to_string(q + 1) + ".agent" + std::to_string(i + 1);
}

struct Checker {
    const Topology& t;
    const CertifyOptions& opt;
    std::vector<CertCheck> checks;

    void schur_check(const std::string& kind, const std::string& component, const Matrix& A,
                     const std::string& hypothesis) {
        CertCheck c;
        c.name = "schur." + kind;
        c.component = component;
        c.hypothesis = hypothesis;
        const SchurResult res = is_schur(A, opt.schur_tol);
        c.passed = res.verdict;
        c.detail = "spectral radius " + format_double(1.0 - res.margin) + ", margin " +
                   format_double(res.margin);
        checks.push_back(std::move(c));
    }

    // Min over the signal grid of every realized branch probability, per branch
    // family list; the floor itself must be strictly positive.
    void floor_check(const std::string& component, const std::string& which,
                     const std::vector<ProbabilityFunction>& branches, const SignalRange& range) {
        CertCheck c;
        c.name = "probability_floor." + which;
        c.component = component;
        c.hypothesis =
            "every branch selection probability is bounded below by a positive floor over the "
            "whole signal range";
        double min_floor = 1.0;
        double min_prob = 1.0;
        const std::size_t points = std::max<std::size_t>(2, opt.probability_grid_points);
        for (const auto& b : branches) min_floor = std::min(min_floor, b.floor);
        if (branches.size() == 1) min_floor = 1.0;  // a sole branch always has probability one
        for (std::size_t g = 0; g < points; ++g) {
            const double pi =
                range.lo + (range.hi - range.lo) * static_cast<double>(g) /
                               static_cast<double>(points - 1);
            const auto probs = branch_probabilities(branches, pi);
            for (double p : probs) min_prob = std::min(min_prob, p);
        }
        c.passed = min_floor > 0.0 && min_prob >= min_floor - 1e-12;
        c.detail = "declared floor " + format_double(min_floor) + ", grid minimum " +
                   format_double(min_prob);
        checks.push_back(std::move(c));
    }

    void lipschitz_check(const std::string& component, const LipschitzAgent& agent) {
        for (std::size_t j = 0; j < agent.transition_maps.size(); ++j) {
            CertCheck c;
            c.name = "lipschitz.transition";
            c.component = component + ".map" + std::to_string(j + 1);
            c.hypothesis = "every transition map has Lipschitz constant strictly below 1";
            const double l = agent.transition_maps[j].lipschitz;
            c.passed = l < 1.0;
            c.detail = "declared constant " + format_double(l);
            checks.push_back(std::move(c));
        }
        CertCheck info;
        info.name = "lipschitz.output_constants";
        info.component = component;
        info.hypothesis = "output map constants are recorded for reference; no bound is imposed";
        info.passed = true;
        info.informational = true;
        std::string detail;
        for (std::size_t l = 0; l < agent.output_maps.size(); ++l) {
            if (!detail.empty()) detail += ", ";
            detail += format_double(agent.output_maps[l].lipschitz);
        }
        info.detail = "constants: " + detail;
        checks.push_back(std::move(info));
    }

    bool all_passed() const {
        return std::all_of(checks.begin(), checks.end(),
                           [](const CertCheck& c) { return c.passed; });
    }

    bool failures_only_in(const std::string& name_prefix) const {
        bool some_failed = false;
        for (const auto& c : checks) {
            if (c.passed) continue;
            some_failed = true;
            if (c.name.rfind(name_prefix, 0) != 0) return false;
        }
        return some_failed;
    }
};

// Componentwise product graph of per-agent graphs (edges require an edge in
// every component); node count is the product of the state counts.
AdjacencyMatrix product_graph(const std::vector<const DiscreteAgent*>& agents) {
    std::size_t total = 1;
    for (const auto* a : agents) total *= a->n_states;
    std::vector<AdjacencyMatrix> parts;
    parts.reserve(agents.size());
    for (const auto* a : agents) parts.push_back(agent_graph(*a));

    AdjacencyMatrix g(total);
    std::vector<std::size_t> radix(agents.size());
    for (std::size_t node = 0; node < total; ++node) {
        std::size_t rest = node;
        for (std::size_t c = 0; c < agents.size(); ++c) {
            radix[c] = rest % agents[c]->n_states;
            rest /= agents[c]->n_states;
        }
        for (std::size_t other = 0; other < total; ++other) {
            std::size_t orest = other;
            bool ok = true;
            for (std::size_t c = 0; c < agents.size() && ok; ++c) {
                const std::size_t to = orest % agents[c]->n_states;
                orest /= agents[c]->n_states;
                ok = parts[c].has_edge(radix[c], to);
            }
            if (ok) g.add_edge(node, other);
        }
    }
    return g;
}

}  // namespace

std::string to_string(CertVerdict v) {
    switch (v) {
        case CertVerdict::certified_unique: return "certified_unique";
        case CertVerdict::certified_existence: return "certified_existence";
        case CertVerdict::not_certified: return "not_certified";
    }
    return "unknown";
}

CertificationReport certify(const Topology& t, const CertifyOptions& options) {
    t.validate();
    CertificationReport report;
    Checker checker{t, options, {}};

    // Match the applicable hypothesis set from wiring kind and agent kind.
    AgentKind kind = t.ensembles.front().kind();
    bool homogeneous = true;
    for (const auto& ens : t.ensembles)
        if (ens.kind() != kind) homogeneous = false;

    if (!homogeneous) {
        report.applicable_theorem = "none";
        report.note = "mixed agent kinds across ensembles match none of the certified hypothesis sets";
        report.verdict = CertVerdict::not_certified;
        return report;
    }
    switch (t.kind) {
        case TopologyKind::two_sided:
            report.applicable_theorem = kind == AgentKind::affine      ? "Thm1"
                                        : kind == AgentKind::lipschitz ? "Thm2"
                                                                       : "Thm3";
            break;
        case TopologyKind::multi_sided:
            report.applicable_theorem = kind == AgentKind::affine ? "Thm4" : "none";
            break;
        case TopologyKind::toy1:
            report.applicable_theorem = kind == AgentKind::affine ? "Prop1" : "none";
            break;
        case TopologyKind::toy2:
            report.applicable_theorem = kind == AgentKind::affine ? "Prop2" : "none";
            break;
    }
    if (report.applicable_theorem == "none") {
        report.note = "wiring kind '" + to_string(t.kind) +
                      "' with non-affine agents matches none of the certified hypothesis sets";
        report.verdict = CertVerdict::not_certified;
        return report;
    }

    // Controllers and filters must be internally stable for every hypothesis set.
    for (std::size_t c = 0; c < t.controllers.size(); ++c)
        checker.schur_check("controller", "controller" + std::to_string(c + 1), t.controllers[c].A,
                            "every controller state matrix is Schur (all eigenvalues strictly "
                            "inside the unit circle)");
    for (std::size_t f = 0; f < t.filters.size(); ++f)
        checker.schur_check("filter", "filter" + std::to_string(f + 1), t.filters[f].A,
                            "every filter state matrix is Schur");

    // Per-agent hypotheses.
    for (std::size_t q = 0; q < t.ensembles.size(); ++q) {
        const auto& ens = t.ensembles[q];
        const SignalRange range = t.signal_ranges[t.controller_for_ensemble(q)];
        for (std::size_t i = 0; i < ens.agents.size(); ++i) {
            const std::string name = agent_name(q, i);
            if (const auto* affine = std::get_if<AffineAgent>(&ens.agents[i])) {
                checker.schur_check("agent", name, affine->A,
                                    "every agent state matrix is Schur");
                checker.floor_check(name, "transition", affine->b_probs, range);
                checker.floor_check(name, "output", affine->d_probs, range);
            } else if (const auto* lip = std::get_if<LipschitzAgent>(&ens.agents[i])) {
                checker.lipschitz_check(name, *lip);
                checker.floor_check(name, "transition", lip->transition_probs, range);
                checker.floor_check(name, "output", lip->output_probs, range);
            } else if (const auto* disc = std::get_if<DiscreteAgent>(&ens.agents[i])) {
                checker.floor_check(name, "transition", disc->transition_probs, range);
                const AdjacencyMatrix g = agent_graph(*disc);
                CertCheck sc;
                sc.name = "graph.strongly_connected";
                sc.component = name;
                sc.hypothesis =
                    "the positive-probability transition graph on the state set is strongly "
                    "connected";
                sc.passed = is_strongly_connected(g);
                sc.detail = sc.passed ? "strongly connected" : "not strongly connected";
                checker.checks.push_back(sc);
                CertCheck pr;
                pr.name = "graph.primitive";
                pr.component = name;
                pr.hypothesis =
                    "the transition graph is primitive (strongly connected with aperiodic cycle "
                    "structure), making the invariant measure uniquely attractive";
                pr.passed = is_primitive(g);
                pr.detail = pr.passed ? "primitive" : ("period " + std::to_string(graph_period(g)));
                checker.checks.push_back(pr);
            }
        }
    }

    // Joint graph for finite-state agents, when the product stays tractable.
    if (kind == AgentKind::discrete) {
        std::vector<const DiscreteAgent*> all_agents;
        std::size_t product_size = 1;
        bool tractable = true;
        for (const auto& ens : t.ensembles)
            for (const auto& a : ens.agents) {
                const auto* d = &std::get<DiscreteAgent>(a);
                all_agents.push_back(d);
                if (product_size > options.product_graph_cap / d->n_states) tractable = false;
                if (tractable) product_size *= d->n_states;
            }
        if (tractable) {
            const AdjacencyMatrix joint = product_graph(all_agents);
            CertCheck sc;
            sc.name = "graph.joint_strongly_connected";
            sc.component = "joint_state_space";
            sc.hypothesis = "the product transition graph over all agents is strongly connected";
            sc.passed = is_strongly_connected(joint);
            sc.detail = std::to_string(joint.n) + " joint states";
            checker.checks.push_back(sc);
            CertCheck pr;
            pr.name = "graph.joint_primitive";
            pr.component = "joint_state_space";
            pr.hypothesis = "the product transition graph is primitive";
            pr.passed = is_primitive(joint);
            pr.detail = std::to_string(joint.n) + " joint states";
            checker.checks.push_back(pr);
        } else {
            report.note = "joint state space exceeds " +
                          std::to_string(options.product_graph_cap) +
                          " nodes; graph hypotheses were checked per agent";
        }
    }

    // Consistency check on the assembled augmented matrix for affine wirings:
    // when every block is Schur some finite power must contract in norm.
    if (kind == AgentKind::affine) {
        const bool blocks_ok = checker.all_passed();
        CertCheck c;
        c.name = "augmented_contraction";
        c.component = "augmented_matrix";
        c.hypothesis =
            "some finite power of the assembled closed-loop matrix has induced 2-norm below 1";
        const AugmentedSystem sys = assemble_augmented_matrix(t);
        if (sys.A.rows() <= options.exact_contraction_dim_cap) {
            const auto order = power_contraction_order(sys.A, options.contraction_m_max);
            c.passed = order.has_value();
            c.detail = order ? ("contraction order " + std::to_string(*order))
                             : ("no power up to " + std::to_string(options.contraction_m_max) +
                                " contracts");
        } else {
            c.passed = contracts_under_squaring(sys.A);
            c.detail = c.passed ? "a dyadic power contracts (repeated squaring)"
                                : "no dyadic power contracts";
        }
        if (!blocks_ok && !c.passed)
            c.detail += "; expected, since a component hypothesis already failed";
        checker.checks.push_back(std::move(c));
    }

    report.checks = std::move(checker.checks);
    const bool all = std::all_of(report.checks.begin(), report.checks.end(),
                                 [](const CertCheck& c) { return c.passed; });
    if (all) {
        report.verdict = CertVerdict::certified_unique;
    } else if (report.applicable_theorem == "Thm3") {
        bool only_primitivity = true;
        for (const auto& c : report.checks)
            if (!c.passed && c.name.find("primitive") == std::string::npos) only_primitivity = false;
        report.verdict =
            only_primitivity ? CertVerdict::certified_existence : CertVerdict::not_certified;
        if (only_primitivity)
            report.note = "an invariant measure exists (strong connectivity holds) but unique "
                          "attractivity is not certified: the transition graph is periodic";
    } else {
        report.verdict = CertVerdict::not_certified;
    }
    return report;
}

std::string explain(const CertificationReport& report) {
    std::ostringstream os;
    os << "verdict: " << to_string(report.verdict) << " (rule " << report.applicable_theorem
       << ")\n";
    if (!report.note.empty()) os << "note: " << report.note << "\n";
    if (report.checks.empty()) {
        os << "no applicable certificate: no hypothesis set matches this topology\n";
        return os.str();
    }
    for (const auto& c : report.checks) {
        os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " (" << c.component << ")\n"
           << "       requires: " << c.hypothesis << "\n"
           << "       measured: " << c.detail << "\n";
    }
    if (report.applicable_theorem == "Thm3")
        os << "note: graph edges are taken as the transitions reachable with positive-floor "
              "branch probability; this is the checker's interpretation of the joint edge set\n";
    return os.str();
}

}  // namespace ergoloop

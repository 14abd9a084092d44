#include "ergoloop/topology.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ergoloop {

namespace {

Matrix col_matrix(const Vec& v) { return Matrix(v.size(), 1, v); }
Matrix row_matrix(const Vec& v) { return Matrix(1, v.size(), v); }

std::string ensemble_agent_name(std::size_t q, std::size_t i) {
    return "ensemble" + std::to_string(q + 1) + ".agent" + std::to_string(i + 1);
}
std::string filter_name(std::size_t q) { return "filter" + std::to_string(q + 1); }
std::string controller_name(std::size_t p) { return "controller" + std::to_string(p + 1); }

void require_siso(const LinearBlock& b, const std::string& what) {
    if (b.input_dim() != 1 || b.output_dim() != 1)
        throw DimensionError(what + " '" + b.name + "' must have scalar input and output, got " +
                             std::to_string(b.input_dim()) + " -> " +
                             std::to_string(b.output_dim()));
}

void require_finite_signal(double v, const std::string& component, std::size_t k) {
    if (!std::isfinite(v))
        throw SimulationError(component, k,
                              "non-finite signal in '" + component + "' at step " +
                                  std::to_string(k));
}

const AffineAgent& as_affine(const Agent& a, const std::string& name) {
    if (const auto* p = std::get_if<AffineAgent>(&a)) return *p;
    throw std::invalid_argument("augmented-matrix assembly requires affine agents; '" + name +
                                "' is not affine");
}

struct Layout {
    AugmentedSystem sys;  // A left empty until filled
    std::size_t total = 0;

    void push(const std::string& name, std::size_t dim) {
        sys.block_index[name] = {total, dim};
        sys.block_order.push_back(name);
        total += dim;
    }
    const BlockSpan& span(const std::string& name) const { return sys.block_index.at(name); }
};

Layout build_layout(const Topology& t) {
    Layout layout;
    for (std::size_t q = 0; q < t.ensembles.size(); ++q)
        for (std::size_t i = 0; i < t.ensembles[q].agents.size(); ++i) {
            const auto& agent = as_affine(t.ensembles[q].agents[i], ensemble_agent_name(q, i));
            layout.push(ensemble_agent_name(q, i), agent.state_dim());
        }
    for (std::size_t q = 0; q < t.filters.size(); ++q)
        layout.push(filter_name(q), t.filters[q].state_dim());
    for (std::size_t p = 0; p < t.controllers.size(); ++p)
        layout.push(controller_name(p), t.controllers[p].state_dim());
    return layout;
}

}  // namespace

std::string to_string(TopologyKind k) {
    switch (k) {
        case TopologyKind::two_sided: return "two_sided";
        case TopologyKind::multi_sided: return "multi_sided";
        case TopologyKind::toy1: return "toy1";
        case TopologyKind::toy2: return "toy2";
    }
    return "unknown";
}

void Topology::validate() const {
    const std::size_t n_ens = ensembles.size();
    const std::size_t n_ctrl = controllers.size();
    const std::size_t n_filt = filters.size();
    switch (kind) {
        case TopologyKind::two_sided:
            if (n_ens != 2 || n_ctrl != 2 || n_filt != 2)
                throw std::invalid_argument("two_sided needs 2 ensembles, 2 controllers, 2 filters");
            if (u.size() != 2) throw std::invalid_argument("two_sided needs 2 external inputs");
            break;
        case TopologyKind::toy1:
            if (n_ens != 2 || n_ctrl != 2 || n_filt != 0)
                throw std::invalid_argument("toy1 needs 2 ensembles, 2 controllers, no filters");
            if (u.size() != 1) throw std::invalid_argument("toy1 needs a single external input");
            break;
        case TopologyKind::toy2:
            if (n_ens != 2 || n_ctrl != 1 || n_filt != 0)
                throw std::invalid_argument("toy2 needs 2 ensembles, 1 controller, no filters");
            if (u.size() != 1) throw std::invalid_argument("toy2 needs a single external input");
            break;
        case TopologyKind::multi_sided:
            if (n_ens == 0 || n_ctrl != n_ens || n_filt != n_ens)
                throw std::invalid_argument(
                    "multi_sided needs M ensembles, M controllers, M filters");
            if (!H || H->rows() != n_ens || H->cols() != n_ens)
                throw std::invalid_argument("multi_sided needs an MxM interconnection matrix H");
            if (u.size() != n_ens) throw std::invalid_argument("multi_sided needs M external inputs");
            break;
    }
    if (signal_ranges.size() != n_ctrl)
        throw std::invalid_argument("need one signal range per controller");
    for (const auto& sr : signal_ranges)
        if (!(sr.lo < sr.hi)) throw std::invalid_argument("signal range must have lo < hi");
    if (!pi_initial.empty() && pi_initial.size() != n_ctrl)
        throw std::invalid_argument("pi_initial must have one value per controller");
    for (const auto& ens : ensembles) ens.validate();
    for (const auto& c : controllers) {
        c.validate();
        require_siso(c, "controller");
    }
    for (const auto& f : filters) {
        f.validate();
        require_siso(f, "filter");
        if (f.D.max_abs() != 0.0)
            throw std::invalid_argument("filter '" + f.name +
                                        "' must have zero feedthrough (D = 0)");
    }
}

void Topology::initialize_signals() {
    pi_held = pi_initial.empty() ? std::vector<double>(controllers.size(), 0.0) : pi_initial;
    for (std::size_t c = 0; c < pi_held.size(); ++c) pi_held[c] = signal_ranges[c].clamp(pi_held[c]);
}

std::size_t Topology::controller_for_ensemble(std::size_t q) const {
    return kind == TopologyKind::toy2 ? 0 : q;
}

std::size_t Topology::error_count() const {
    return (kind == TopologyKind::toy1 || kind == TopologyKind::toy2) ? 1 : controllers.size();
}

AugmentedSystem assemble_augmented_matrix(const Topology& t) {
    t.validate();
    Layout layout = build_layout(t);
    Matrix A(layout.total, layout.total);

    // Ensemble diagonal blocks.
    for (std::size_t q = 0; q < t.ensembles.size(); ++q)
        for (std::size_t i = 0; i < t.ensembles[q].agents.size(); ++i) {
            const auto name = ensemble_agent_name(q, i);
            const auto& agent = as_affine(t.ensembles[q].agents[i], name);
            const auto& span = layout.span(name);
            A.set_block(span.offset, span.offset, agent.A);
        }

    // Filter diagonal blocks and their read-out coupling to the own side:
    // x_f(k+1) = A_f x_f + B_f * sum_i c_i^T x_i + offsets.
    for (std::size_t q = 0; q < t.filters.size(); ++q) {
        const auto& fspan = layout.span(filter_name(q));
        A.set_block(fspan.offset, fspan.offset, t.filters[q].A);
        for (std::size_t i = 0; i < t.ensembles[q].agents.size(); ++i) {
            const auto name = ensemble_agent_name(q, i);
            const auto& agent = as_affine(t.ensembles[q].agents[i], name);
            const auto& aspan = layout.span(name);
            A.set_block(fspan.offset, aspan.offset, t.filters[q].B * row_matrix(agent.c));
        }
    }

    // Controller diagonal blocks plus the error-wiring couplings.
    for (std::size_t p = 0; p < t.controllers.size(); ++p) {
        const auto& cspan = layout.span(controller_name(p));
        A.set_block(cspan.offset, cspan.offset, t.controllers[p].A);
    }
    switch (t.kind) {
        case TopologyKind::two_sided: {
            // e1 = u1 - C_f2 x_f2 ; e2 = u2 + C_f1 x_f1.
            const auto& c1 = layout.span(controller_name(0));
            const auto& c2 = layout.span(controller_name(1));
            const auto& f1 = layout.span(filter_name(0));
            const auto& f2 = layout.span(filter_name(1));
            A.set_block(c1.offset, f2.offset, -1.0 * (t.controllers[0].B * t.filters[1].C));
            A.set_block(c2.offset, f1.offset, t.controllers[1].B * t.filters[0].C);
            break;
        }
        case TopologyKind::toy1: {
            // Both controllers see e = u - (y1 + y2).
            for (std::size_t p = 0; p < 2; ++p) {
                const auto& cspan = layout.span(controller_name(p));
                for (std::size_t q = 0; q < 2; ++q)
                    for (std::size_t i = 0; i < t.ensembles[q].agents.size(); ++i) {
                        const auto name = ensemble_agent_name(q, i);
                        const auto& agent = as_affine(t.ensembles[q].agents[i], name);
                        const auto& aspan = layout.span(name);
                        A.set_block(cspan.offset, aspan.offset,
                                    -1.0 * (t.controllers[p].B * row_matrix(agent.c)));
                    }
            }
            break;
        }
        case TopologyKind::toy2: {
            // e = u + y2 - y1.
            const auto& cspan = layout.span(controller_name(0));
            for (std::size_t q = 0; q < 2; ++q) {
                const double sign = q == 0 ? -1.0 : 1.0;
                for (std::size_t i = 0; i < t.ensembles[q].agents.size(); ++i) {
                    const auto name = ensemble_agent_name(q, i);
                    const auto& agent = as_affine(t.ensembles[q].agents[i], name);
                    const auto& aspan = layout.span(name);
                    A.set_block(cspan.offset, aspan.offset,
                                sign * (t.controllers[0].B * row_matrix(agent.c)));
                }
            }
            break;
        }
        case TopologyKind::multi_sided: {
            // e_p = u_p - sum_q H(p,q) C_fq x_fq.
            for (std::size_t p = 0; p < t.controllers.size(); ++p) {
                const auto& cspan = layout.span(controller_name(p));
                for (std::size_t q = 0; q < t.filters.size(); ++q) {
                    const double h = (*t.H)(p, q);
                    if (h == 0.0) continue;
                    const auto& fspan = layout.span(filter_name(q));
                    A.set_block(cspan.offset, fspan.offset,
                                (-h) * (t.controllers[p].B * t.filters[q].C));
                }
            }
            break;
        }
    }

    AugmentedSystem sys = std::move(layout.sys);
    sys.A = std::move(A);
    return sys;
}

Vec wire_error_signals(const Topology& t, const Vec& filtered_outputs, std::size_t k) {
    switch (t.kind) {
        case TopologyKind::two_sided: {
            if (filtered_outputs.size() != 2)
                throw DimensionError("two_sided error wiring needs 2 filtered outputs");
            return {t.u[0].at(k) - filtered_outputs[1], t.u[1].at(k) + filtered_outputs[0]};
        }
        case TopologyKind::toy1: {
            if (filtered_outputs.size() != 2)
                throw DimensionError("toy1 error wiring needs 2 ensemble outputs");
            return {t.u[0].at(k) - (filtered_outputs[0] + filtered_outputs[1])};
        }
        case TopologyKind::toy2: {
            if (filtered_outputs.size() != 2)
                throw DimensionError("toy2 error wiring needs 2 ensemble outputs");
            return {t.u[0].at(k) + filtered_outputs[1] - filtered_outputs[0]};
        }
        case TopologyKind::multi_sided: {
            const std::size_t m = t.controllers.size();
            if (filtered_outputs.size() != m)
                throw DimensionError("multi_sided error wiring needs M filtered outputs");
            Vec e(m, 0.0);
            for (std::size_t p = 0; p < m; ++p) {
                double coupled = 0.0;
                for (std::size_t q = 0; q < m; ++q) coupled += (*t.H)(p, q) * filtered_outputs[q];
                e[p] = t.u[p].at(k) - coupled;
            }
            return e;
        }
    }
    throw std::logic_error("unreachable");
}

StepRecord step_topology(Topology& t, std::size_t k, const StepContext& ctx,
                         bool record_per_agent) {
    if (t.pi_held.size() != t.controllers.size()) t.initialize_signals();
    StepRecord rec;
    rec.k = k;

    // (1)-(2) Sample and aggregate outputs at the currently held signals.
    rec.y.resize(t.ensembles.size());
    if (record_per_agent) rec.per_agent.resize(t.ensembles.size());
    for (std::size_t q = 0; q < t.ensembles.size(); ++q) {
        const double pi_q = t.pi_held[t.controller_for_ensemble(q)];
        EnsembleOutput out = ensemble_output(t.ensembles[q], q, pi_q, ctx);
        require_finite_signal(out.total, "ensemble" + std::to_string(q + 1), k);
        rec.y[q] = out.total;
        if (record_per_agent) rec.per_agent[q] = std::move(out.per_agent);
    }

    // (3) Filters consume their own side's aggregate output.
    rec.y_hat.resize(t.filters.size());
    for (std::size_t q = 0; q < t.filters.size(); ++q) {
        rec.y_hat[q] = block_step(t.filters[q], {rec.y[q]}, k)[0];
        require_finite_signal(rec.y_hat[q], filter_name(q), k);
    }

    // (4) Error wiring.
    rec.e = wire_error_signals(t, t.filters.empty() ? rec.y : rec.y_hat, k);
    for (double ev : rec.e) require_finite_signal(ev, "error_wiring", k);

    // (5) Controllers emit the new signals, clamped to their ranges.
    rec.pi.resize(t.controllers.size());
    for (std::size_t c = 0; c < t.controllers.size(); ++c) {
        const double e_c = rec.e[rec.e.size() == 1 ? 0 : c];
        const double raw = block_step(t.controllers[c], {e_c}, k)[0];
        require_finite_signal(raw, controller_name(c), k);
        bool clamped = false;
        rec.pi[c] = t.signal_ranges[c].clamp(raw, &clamped);
        if (clamped && ctx.pi_clamp_events) ++(*ctx.pi_clamp_events);
        t.pi_held[c] = rec.pi[c];
    }

    // (6) Transitions at the new signals.
    for (std::size_t q = 0; q < t.ensembles.size(); ++q) {
        const double pi_q = t.pi_held[t.controller_for_ensemble(q)];
        ensemble_transition(t.ensembles[q], q, pi_q, ctx);
    }
    return rec;
}

Vec augmented_state(const Topology& t) {
    Vec xi;
    for (const auto& ens : t.ensembles)
        for (const auto& a : ens.agents) {
            const auto& agent = std::get<AffineAgent>(a);
            xi.insert(xi.end(), agent.x.begin(), agent.x.end());
        }
    for (const auto& f : t.filters) xi.insert(xi.end(), f.x.begin(), f.x.end());
    for (const auto& c : t.controllers) xi.insert(xi.end(), c.x.begin(), c.x.end());
    return xi;
}

namespace {

// Offset contribution entering each controller's error channel, given the
// ensembles' aggregated output offsets (sum of the sampled d terms per side).
Vec controller_error_offsets(const Topology& t, const Vec& d_sums) {
    switch (t.kind) {
        case TopologyKind::two_sided:
            return {t.u[0].at(0), t.u[1].at(0)};  // d offsets reach controllers only via filters
        case TopologyKind::toy1: {
            const double off = t.u[0].at(0) - d_sums[0] - d_sums[1];
            return {off, off};
        }
        case TopologyKind::toy2:
            return {t.u[0].at(0) + d_sums[1] - d_sums[0]};
        case TopologyKind::multi_sided: {
            Vec offs(t.controllers.size());
            for (std::size_t p = 0; p < offs.size(); ++p) offs[p] = t.u[p].at(0);
            return offs;
        }
    }
    throw std::logic_error("unreachable");
}

Vec offset_vector_for_choices(const Topology& t,
                              const std::vector<std::size_t>& b_choice,
                              const std::vector<std::size_t>& d_choice) {
    Vec beta;
    Vec d_sums(t.ensembles.size(), 0.0);
    std::size_t flat = 0;
    for (std::size_t q = 0; q < t.ensembles.size(); ++q)
        for (const auto& a : t.ensembles[q].agents) {
            const auto& agent = std::get<AffineAgent>(a);
            const Vec& b = agent.b_choices[b_choice[flat]];
            beta.insert(beta.end(), b.begin(), b.end());
            d_sums[q] += agent.d_choices[d_choice[flat]];
            ++flat;
        }
    for (std::size_t q = 0; q < t.filters.size(); ++q) {
        const Vec fb = matvec(t.filters[q].B, {d_sums[q]});
        beta.insert(beta.end(), fb.begin(), fb.end());
    }
    const Vec e_offs = controller_error_offsets(t, d_sums);
    for (std::size_t p = 0; p < t.controllers.size(); ++p) {
        const Vec cb = matvec(t.controllers[p].B, {e_offs[p]});
        beta.insert(beta.end(), cb.begin(), cb.end());
    }
    return beta;
}

std::size_t total_agents(const Topology& t) {
    std::size_t n = 0;
    for (const auto& ens : t.ensembles) n += ens.agents.size();
    return n;
}

}  // namespace

Vec constant_offset_vector(const Topology& t) {
    for (const auto& u : t.u)
        if (u.values.size() != 1)
            throw std::invalid_argument("constant offset vector requires constant external inputs");
    std::vector<std::size_t> zeros(total_agents(t), 0);
    for (const auto& ens : t.ensembles)
        for (const auto& a : ens.agents) {
            const auto& agent = std::get<AffineAgent>(a);
            if (agent.b_choices.size() != 1 || agent.d_choices.size() != 1)
                throw std::invalid_argument(
                    "constant offset vector requires single-branch agents; use "
                    "enumerate_offset_library for stochastic topologies");
        }
    return offset_vector_for_choices(t, zeros, zeros);
}

std::optional<std::vector<OffsetSample>> enumerate_offset_library(
    const Topology& t, const std::vector<double>& pi) {
    if (pi.size() != t.controllers.size())
        throw DimensionError("need one signal value per controller");
    constexpr std::size_t cap = 1u << 16;

    struct AgentRef {
        const AffineAgent* agent;
        std::size_t ensemble;
    };
    std::vector<AgentRef> agents;
    std::size_t combos = 1;
    for (std::size_t q = 0; q < t.ensembles.size(); ++q)
        for (const auto& a : t.ensembles[q].agents) {
            const auto& agent = std::get<AffineAgent>(a);
            agents.push_back({&agent, q});
            const std::size_t branch_count = agent.b_choices.size() * agent.d_choices.size();
            if (combos > cap / branch_count) return std::nullopt;
            combos *= branch_count;
        }

    // Per-agent branch probabilities at the signal its controller holds.
    std::vector<std::vector<double>> pb(agents.size()), pd(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const double pi_q = pi[t.controller_for_ensemble(agents[i].ensemble)];
        pb[i] = branch_probabilities(agents[i].agent->b_probs, pi_q);
        pd[i] = branch_probabilities(agents[i].agent->d_probs, pi_q);
    }

    std::vector<OffsetSample> library;
    library.reserve(combos);
    std::vector<std::size_t> b_choice(agents.size(), 0), d_choice(agents.size(), 0);
    while (true) {
        double prob = 1.0;
        for (std::size_t i = 0; i < agents.size(); ++i)
            prob *= pb[i][b_choice[i]] * pd[i][d_choice[i]];
        library.push_back({offset_vector_for_choices(t, b_choice, d_choice), prob});

        // Odometer over (b, d) choice indices.
        std::size_t i = 0;
        for (; i < agents.size(); ++i) {
            if (++d_choice[i] < agents[i].agent->d_choices.size()) break;
            d_choice[i] = 0;
            if (++b_choice[i] < agents[i].agent->b_choices.size()) break;
            b_choice[i] = 0;
        }
        if (i == agents.size()) break;
    }
    return library;
}

}  // namespace ergoloop

#include "qgnn/ansatz.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace qgnn {

std::string family_name(AnsatzFamily family) {
    return family == AnsatzFamily::Rook ? "rook" : "millefeuille";
}

AnsatzFamily family_from_name(const std::string &name) {
    if (name == "rook") {
        return AnsatzFamily::Rook;
    }
    if (name == "millefeuille" || name == "mf") {
        return AnsatzFamily::MilleFeuille;
    }
    throw std::invalid_argument(
        fmt::format("unknown ansatz family '{}' (expected rook or millefeuille)", name));
}

void validate_spec(const AnsatzSpec &spec) {
    if (spec.layers < 1) {
        throw std::invalid_argument("ansatz needs at least one layer");
    }
    if (spec.family == AnsatzFamily::MilleFeuille && spec.inner_layers < 1) {
        throw std::invalid_argument("millefeuille needs inner_layers >= 1");
    }
    if (spec.family == AnsatzFamily::Rook && spec.inner_layers != 0) {
        throw std::invalid_argument("rook takes no inner_layers");
    }
}

int edge_param_count(const AnsatzSpec &spec) {
    return spec.family == AnsatzFamily::Rook ? 2 : 5 * spec.inner_layers;
}

int param_count(const AnsatzSpec &spec) {
    validate_spec(spec);
    const int per_layer = 3 + 2 * edge_param_count(spec);
    return per_layer * spec.layers + (spec.include_initial_state ? 3 : 0);
}

namespace {

void emit_pair_block(const AnsatzSpec &spec, int u, int v, int base_slot,
                     std::vector<PlannedGate> &gates) {
    if (spec.family == AnsatzFamily::Rook) {
        // ZZ phase gadget plus the shared single-body Z term on both endpoints
        gates.push_back({{GateKind::ZZPhase, u, v, 0.0}, base_slot});
        gates.push_back({{GateKind::RZ, u, -1, 0.0}, base_slot + 1});
        gates.push_back({{GateKind::RZ, v, -1, 0.0}, base_slot + 1});
        return;
    }
    for (int m = 0; m < spec.inner_layers; ++m) {
        const int s = base_slot + 5 * m;
        gates.push_back({{GateKind::RY, u, -1, 0.0}, s});
        gates.push_back({{GateKind::RY, v, -1, 0.0}, s + 1});
        gates.push_back({{GateKind::RZ, u, -1, 0.0}, s + 2});
        gates.push_back({{GateKind::RZ, v, -1, 0.0}, s + 3});
        // higher-index vertex controls, lower-index vertex is the target
        gates.push_back({{GateKind::CRX, u, v, 0.0}, s + 4});
    }
}

} // namespace

CircuitPlan build_plan(const AnsatzSpec &spec, const Graph &g) {
    validate_spec(spec);
    CircuitPlan plan;
    plan.n_qubits = g.n();
    plan.param_count = param_count(spec);

    int next_slot = 0;
    if (spec.include_initial_state) {
        for (int v = 0; v < g.n(); ++v) {
            plan.gates.push_back({{GateKind::RX, v, -1, 0.0}, 0});
            plan.gates.push_back({{GateKind::RZ, v, -1, 0.0}, 1});
            plan.gates.push_back({{GateKind::RX, v, -1, 0.0}, 2});
        }
        next_slot = 3;
    }

    const auto anti = complement_edges(g);
    const int edge_len = edge_param_count(spec);
    for (int layer = 0; layer < spec.layers; ++layer) {
        const int node_slot = next_slot;
        for (int v = 0; v < g.n(); ++v) {
            plan.gates.push_back({{GateKind::RX, v, -1, 0.0}, node_slot});
            plan.gates.push_back({{GateKind::RZ, v, -1, 0.0}, node_slot + 1});
            plan.gates.push_back({{GateKind::RX, v, -1, 0.0}, node_slot + 2});
        }
        const int edge_slot = node_slot + 3;
        for (const auto &[u, v] : g.edges()) {
            emit_pair_block(spec, u, v, edge_slot, plan.gates);
        }
        const int anti_slot = edge_slot + edge_len;
        for (const auto &[u, v] : anti) {
            emit_pair_block(spec, u, v, anti_slot, plan.gates);
        }
        next_slot = anti_slot + edge_len;
    }
    return plan;
}

StateVector apply_plan(const CircuitPlan &plan, std::span<const double> theta) {
    if (static_cast<int>(theta.size()) != plan.param_count) {
        throw std::invalid_argument(fmt::format("parameter vector has {} slots, plan expects {}",
                                                theta.size(), plan.param_count));
    }
    StateVector state(plan.n_qubits);
    for (const auto &pg : plan.gates) {
        GateOp gate = pg.gate;
        gate.angle = theta[static_cast<std::size_t>(pg.slot)];
        apply_gate(state, gate);
    }
    return state;
}

StateVector apply_ansatz(const AnsatzSpec &spec, const Graph &g, const ParameterSet &params) {
    return apply_plan(build_plan(spec, g), params.values);
}

} // namespace qgnn

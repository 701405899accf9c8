#pragma once

#include "qgnn/graph.hpp"
#include "qgnn/statevector.hpp"

#include <span>
#include <string>
#include <vector>

namespace qgnn {

enum class AnsatzFamily { Rook, MilleFeuille };

std::string family_name(AnsatzFamily family);
AnsatzFamily family_from_name(const std::string &name);

struct AnsatzSpec {
    AnsatzFamily family = AnsatzFamily::Rook;
    int layers = 1;       // L
    int inner_layers = 0; // M, MilleFeuille only (0 for Rook)
    bool include_initial_state = true;

    bool operator==(const AnsatzSpec &) const = default;
};

// Flat parameter vector in canonical slot order: the 3 initial-state Euler
// angles (when present), then per layer the node triple, the edge vector and
// the anti-edge vector. Parameters are tied: one slot feeds every gate of its
// orbit, so the layout does not depend on the graph.
struct ParameterSet {
    std::vector<double> values;
};

struct PlannedGate {
    GateOp gate; // angle field unused; filled from the slot at application
    int slot;
};

struct CircuitPlan {
    int n_qubits = 0;
    int param_count = 0;
    std::vector<PlannedGate> gates;
};

/// Slots in one (anti-)edge vector: 2 for Rook, 5M for MilleFeuille.
int edge_param_count(const AnsatzSpec &spec);

/// Total slot count. Rook: 7L+3; MilleFeuille: (3+10M)L+3 (drop the +3 when
/// the trainable initial state is excluded).
int param_count(const AnsatzSpec &spec);

void validate_spec(const AnsatzSpec &spec);

/// Gate sequence for the spec on a concrete graph. Per layer, in order: node
/// sub-layer over every vertex, edge sub-layer over g's edges in ascending
/// (u,v) order, anti-edge sub-layer over the complement edges in ascending
/// order. The initial product state appears as leading per-vertex rotations
/// so one plan covers the whole differentiable circuit.
CircuitPlan build_plan(const AnsatzSpec &spec, const Graph &g);

/// Apply the plan to |0...0> reading angles from theta.
StateVector apply_plan(const CircuitPlan &plan, std::span<const double> theta);

/// Full model state for a graph: initial product state plus all layers.
StateVector apply_ansatz(const AnsatzSpec &spec, const Graph &g, const ParameterSet &params);

} // namespace qgnn

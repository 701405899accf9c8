#include "qgnn/gradients.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qgnn {

namespace {

// d(loss)/d(p_b) for every basis state b. The expectation-based terms route
// through E = sum_b p_b * eig_b.
std::vector<double> loss_probability_gradient(const ModelConfig &config,
                                              std::span<const double> probs, double expectation,
                                              const ResolvedTargets &targets,
                                              std::span<const double> eigenvalues) {
    std::vector<double> dp(probs.size(), 0.0);
    auto in_targets = [&](Bitstring b) {
        return std::binary_search(targets.target_set.begin(), targets.target_set.end(), b);
    };
    switch (config.loss) {
    case LossKind::Dist:
        for (std::uint64_t b = 0; b < probs.size(); ++b) {
            if (!in_targets(b)) {
                dp[b] = 2.0 * probs[b];
            }
        }
        break;
    case LossKind::LogWrong: {
        const double scale = 1.0 / (config.epsilon + wrong_mass(probs, targets.target_set));
        for (std::uint64_t b = 0; b < probs.size(); ++b) {
            if (!in_targets(b)) {
                dp[b] = scale;
            }
        }
        break;
    }
    case LossKind::Mse: {
        const double scale = 2.0 * (expectation - targets.target_value);
        for (std::uint64_t b = 0; b < probs.size(); ++b) {
            dp[b] = scale * eigenvalues[b];
        }
        break;
    }
    case LossKind::Mountain: {
        const double mse_scale = (1.0 - config.alpha) * 2.0 * (expectation - targets.target_value);
        const double log_scale =
            config.alpha / (config.epsilon + wrong_mass(probs, targets.target_set));
        for (std::uint64_t b = 0; b < probs.size(); ++b) {
            dp[b] = mse_scale * eigenvalues[b] + (in_targets(b) ? 0.0 : log_scale);
        }
        break;
    }
    case LossKind::Crater: {
        // indicator penalty is flat almost everywhere
        const double scale = 2.0 * (expectation - targets.target_value);
        for (std::uint64_t b = 0; b < probs.size(); ++b) {
            dp[b] = scale * eigenvalues[b];
        }
        break;
    }
    case LossKind::Argmax:
        throw std::invalid_argument("argmax loss is evaluation-only and has no gradient");
    }
    return dp;
}

GateOp with_angle(const PlannedGate &pg, std::span<const double> theta) {
    GateOp gate = pg.gate;
    gate.angle = theta[static_cast<std::size_t>(pg.slot)];
    return gate;
}

} // namespace

GradientVector loss_gradient(const ModelConfig &config, const DatasetEntry &entry,
                             std::span<const double> theta) {
    const CircuitPlan plan = build_plan(config.ansatz, entry.graph);
    if (static_cast<int>(theta.size()) != plan.param_count) {
        throw std::invalid_argument(fmt::format("parameter vector has {} slots, plan expects {}",
                                                theta.size(), plan.param_count));
    }
    const ResolvedTargets targets = resolve_targets(config, entry);
    const std::vector<double> eig = observable_eigenvalues(config.observable, entry.graph.n());

    StateVector phi = apply_plan(plan, theta);
    const std::vector<double> probs = probabilities(phi);
    const double expectation = expectation_diag(phi, eig);
    const std::vector<double> dp =
        loss_probability_gradient(config, probs, expectation, targets, eig);

    // lambda_b = dL/d(conj(amp_b)) = dL/dp_b * amp_b
    StateVector lambda(phi.n_qubits());
    for (std::size_t b = 0; b < phi.size(); ++b) {
        lambda[b] = dp[b] * phi[b];
    }

    GradientVector grad;
    grad.values.assign(static_cast<std::size_t>(plan.param_count), 0.0);
    // Backward sweep. For U = exp(-i angle/2 * G): dL/d(angle) = Im<lambda|G|phi>
    // evaluated just after the gate; both states are then rolled back.
    for (auto it = plan.gates.rbegin(); it != plan.gates.rend(); ++it) {
        GateOp gate = with_angle(*it, theta);
        grad.values[static_cast<std::size_t>(it->slot)] +=
            generator_overlap(lambda, phi, gate).imag();
        gate.angle = -gate.angle;
        apply_gate(phi, gate);
        apply_gate(lambda, gate);
    }
    return grad;
}

GradientVector loss_gradient_paramshift(const ModelConfig &config, const DatasetEntry &entry,
                                        std::span<const double> theta) {
    const CircuitPlan plan = build_plan(config.ansatz, entry.graph);
    if (static_cast<int>(theta.size()) != plan.param_count) {
        throw std::invalid_argument("parameter vector length mismatch");
    }
    for (const PlannedGate &pg : plan.gates) {
        if (pg.gate.kind == GateKind::CRX) {
            throw std::invalid_argument(
                "parameter-shift path covers Pauli rotations only (no CRX)");
        }
    }
    const ResolvedTargets targets = resolve_targets(config, entry);
    const std::vector<double> eig = observable_eigenvalues(config.observable, entry.graph.n());
    const StateVector base = apply_plan(plan, theta);
    const std::vector<double> probs = probabilities(base);
    const double expectation = expectation_diag(base, eig);
    const std::vector<double> dp =
        loss_probability_gradient(config, probs, expectation, targets, eig);

    auto probs_with_shift = [&](std::size_t gate_index, double delta) {
        StateVector state(plan.n_qubits);
        for (std::size_t i = 0; i < plan.gates.size(); ++i) {
            GateOp gate = with_angle(plan.gates[i], theta);
            if (i == gate_index) {
                gate.angle += delta;
            }
            apply_gate(state, gate);
        }
        return probabilities(state);
    };

    GradientVector grad;
    grad.values.assign(static_cast<std::size_t>(plan.param_count), 0.0);
    constexpr double half_pi = 1.5707963267948966;
    for (std::size_t i = 0; i < plan.gates.size(); ++i) {
        const std::vector<double> plus = probs_with_shift(i, half_pi);
        const std::vector<double> minus = probs_with_shift(i, -half_pi);
        double d = 0.0;
        for (std::size_t b = 0; b < dp.size(); ++b) {
            d += dp[b] * 0.5 * (plus[b] - minus[b]);
        }
        grad.values[static_cast<std::size_t>(plan.gates[i].slot)] += d;
    }
    return grad;
}

GradStats grad_stats(std::span<const GradientVector> batch) {
    if (batch.empty()) {
        throw std::invalid_argument("grad_stats: empty batch");
    }
    const std::size_t slots = batch.front().values.size();
    for (const GradientVector &g : batch) {
        if (g.values.size() != slots) {
            throw std::invalid_argument("grad_stats: ragged batch");
        }
    }
    GradStats stats;
    stats.mean_abs.assign(slots, 0.0);
    stats.variance.assign(slots, 0.0);
    const double inv = 1.0 / static_cast<double>(batch.size());
    std::vector<double> mean(slots, 0.0);
    for (const GradientVector &g : batch) {
        for (std::size_t i = 0; i < slots; ++i) {
            stats.mean_abs[i] += std::abs(g.values[i]) * inv;
            mean[i] += g.values[i] * inv;
        }
    }
    for (const GradientVector &g : batch) {
        for (std::size_t i = 0; i < slots; ++i) {
            const double d = g.values[i] - mean[i];
            stats.variance[i] += d * d * inv;
        }
    }
    double total = 0.0;
    for (const double m : mean) {
        total += std::abs(m);
    }
    stats.aggregate = slots == 0 ? 0.0 : total / static_cast<double>(slots);
    return stats;
}

} // namespace qgnn

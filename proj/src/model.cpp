#include "qgnn/model.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qgnn {

Task task_of(const ModelConfig &config) {
    return config.observable == ObservableKind::Bitstring ? Task::MaxClique
                                                          : Task::CliqueNumber;
}

ResolvedTargets resolve_targets(const ModelConfig &config, const DatasetEntry &entry) {
    ResolvedTargets targets;
    const int n = entry.graph.n();
    if (task_of(config) == Task::MaxClique) {
        targets.target_set = entry.target_bitstrings;
    } else {
        targets.target_set = popcount_targets(n, entry.omega);
    }
    switch (config.observable) {
    case ObservableKind::Bitstring:
        // identity observable: the expectation is 1 up to rounding, so the
        // band must have width for the crater indicator to be stable
        targets.target_value = 1.0;
        targets.band_lo = 0.5;
        targets.band_hi = 1.5;
        break;
    case ObservableKind::Mountain:
        targets.target_value = static_cast<double>(entry.omega);
        targets.band_lo = targets.target_value - 0.5;
        targets.band_hi = targets.target_value + 0.5;
        break;
    case ObservableKind::Crater: {
        targets.target_value = crater_target(entry.omega, n);
        const auto [lo, hi] = crater_band(entry.omega, n);
        targets.band_lo = lo;
        targets.band_hi = hi;
        break;
    }
    }
    return targets;
}

LossValue evaluate_loss(const ModelConfig &config, std::span<const double> probs,
                        double expectation, const ResolvedTargets &targets) {
    switch (config.loss) {
    case LossKind::Dist: {
        const double v = loss_dist(probs, targets.target_set);
        return {v, {{"dist", v}}};
    }
    case LossKind::LogWrong: {
        const double v = loss_logwrong(probs, targets.target_set, config.epsilon);
        return {v, {{"logwrong", v}}};
    }
    case LossKind::Argmax: {
        const double v = loss_argmax(probs, targets.target_set);
        return {v, {{"argmax", v}}};
    }
    case LossKind::Mse: {
        const double v = loss_mse(expectation, targets.target_value);
        return {v, {{"mse", v}}};
    }
    case LossKind::Mountain:
        return loss_mountain(probs, expectation, targets.target_set, targets.target_value,
                             config.alpha, config.epsilon);
    case LossKind::Crater:
        return loss_crater(expectation, targets.target_value, targets.band_lo, targets.band_hi,
                           config.alpha);
    }
    throw std::logic_error("unhandled loss kind");
}

LossValue entry_loss(const ModelConfig &config, const DatasetEntry &entry,
                     std::span<const double> theta) {
    const StateVector state =
        apply_plan(build_plan(config.ansatz, entry.graph), theta);
    const std::vector<double> probs = probabilities(state);
    const std::vector<double> eig = observable_eigenvalues(config.observable, entry.graph.n());
    const double expectation = expectation_diag(state, eig);
    return evaluate_loss(config, probs, expectation, resolve_targets(config, entry));
}

EntryMetrics evaluate_entry(const ModelConfig &config, const DatasetEntry &entry,
                            std::span<const double> theta) {
    const int n = entry.graph.n();
    const StateVector state = apply_plan(build_plan(config.ansatz, entry.graph), theta);
    const std::vector<double> probs = probabilities(state);
    const std::vector<double> eig = observable_eigenvalues(config.observable, n);
    const double expectation = expectation_diag(state, eig);
    const ResolvedTargets targets = resolve_targets(config, entry);

    EntryMetrics m;
    m.loss = evaluate_loss(config, probs, expectation, targets).scalar;
    m.expectation = expectation;
    m.dist_acc = metric_distribution_accuracy(probs, targets.target_set);
    m.argmax_acc = 1.0 - loss_argmax(probs, targets.target_set);
    m.sureness = metric_sureness_argmax(probs, targets.target_set);

    if (task_of(config) == Task::MaxClique) {
        const Bitstring best = argmax_index(probs);
        const int found = std::popcount(best);
        m.approx_ratio = is_clique(entry.graph, best)
                             ? static_cast<double>(found) / static_cast<double>(entry.omega)
                             : 0.0;
        m.exp_acc = std::numeric_limits<double>::quiet_NaN();
        m.random_baseline = random_baseline_max_clique(n, entry.target_bitstrings.size());
    } else {
        const int predicted = config.observable == ObservableKind::Crater
                                  ? crater_class(expectation, n)
                                  : mountain_class(expectation, n);
        m.approx_ratio = predicted <= entry.omega
                             ? static_cast<double>(predicted) / static_cast<double>(entry.omega)
                             : static_cast<double>(entry.omega) / static_cast<double>(predicted);
        m.exp_acc = predicted == entry.omega ? 1.0 : 0.0;
        m.random_baseline = random_baseline_clique_number(n, entry.omega);
    }
    return m;
}

double metric_random_baseline(Task task, std::span<const DatasetEntry> entries) {
    if (entries.empty()) {
        throw std::invalid_argument("metric_random_baseline: empty dataset");
    }
    double total = 0.0;
    for (const DatasetEntry &entry : entries) {
        total += task == Task::MaxClique
                     ? random_baseline_max_clique(entry.graph.n(), entry.target_bitstrings.size())
                     : random_baseline_clique_number(entry.graph.n(), entry.omega);
    }
    return total / static_cast<double>(entries.size());
}

std::string config_fingerprint(const ModelConfig &config) {
    const std::string canonical =
        fmt::format("family={} layers={} inner={} init={} obs={} loss={} alpha={:.17g} eps={:.17g}",
                    family_name(config.ansatz.family), config.ansatz.layers,
                    config.ansatz.inner_layers, config.ansatz.include_initial_state ? 1 : 0,
                    observable_name(config.observable), loss_name(config.loss), config.alpha,
                    config.epsilon);
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (const char c : canonical) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

} // namespace qgnn

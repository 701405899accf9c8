#pragma once

#include "qgnn/ansatz.hpp"
#include "qgnn/dataset.hpp"
#include "qgnn/observables.hpp"

#include <span>
#include <string>
#include <vector>

namespace qgnn {

// A complete model: circuit family, readout observable, training loss and the
// loss hyper-parameters. Dist/logwrong/argmax losses read the measurement
// distribution directly; mse/mountain/crater read the observable expectation.
struct ModelConfig {
    AnsatzSpec ansatz;
    ObservableKind observable = ObservableKind::Bitstring;
    LossKind loss = LossKind::LogWrong;
    double alpha = 0.5;     // mountain/crater mix weight
    double epsilon = 1e-10; // logwrong stability constant

    bool operator==(const ModelConfig &) const = default;
};

Task task_of(const ModelConfig &config);

// Per-entry supervision resolved from the dataset labels: the target
// bitstring set (maximum cliques for the max-clique task, the omega-weight
// popcount class otherwise), the expectation target, and the crater band.
struct ResolvedTargets {
    std::vector<Bitstring> target_set;
    double target_value = 0.0;
    double band_lo = 0.0;
    double band_hi = 0.0;
};

ResolvedTargets resolve_targets(const ModelConfig &config, const DatasetEntry &entry);

LossValue evaluate_loss(const ModelConfig &config, std::span<const double> probs,
                        double expectation, const ResolvedTargets &targets);

struct EntryMetrics {
    double loss = 0.0;
    double expectation = 0.0;
    double dist_acc = 0.0;
    double argmax_acc = 0.0; // 1 - argmax loss
    double sureness = 0.0;
    double approx_ratio = 0.0;
    double exp_acc = 0.0; // clique-number readout correct (NaN for bitstring models)
    double random_baseline = 0.0;
};

/// Loss of one entry at the given parameters.
LossValue entry_loss(const ModelConfig &config, const DatasetEntry &entry,
                     std::span<const double> theta);

/// Full evaluation-metric row for one entry.
EntryMetrics evaluate_entry(const ModelConfig &config, const DatasetEntry &entry,
                            std::span<const double> theta);

/// Mean chance that a uniformly random bitstring solves each entry.
double metric_random_baseline(Task task, std::span<const DatasetEntry> entries);

std::string config_fingerprint(const ModelConfig &config);

} // namespace qgnn

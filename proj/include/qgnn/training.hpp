#pragma once

#include "qgnn/gradients.hpp"
#include "qgnn/model.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qgnn {

enum class SelectionCriterion { ArgmaxAcc, SurenessArgmax, Loss };

std::string selection_name(SelectionCriterion criterion);
SelectionCriterion selection_from_name(const std::string &name);

struct TrainConfig {
    double learning_rate = 0.01;
    int batch_size = 100;
    int max_epochs = 100;
    std::uint64_t seed = 0;
    SelectionCriterion selection = SelectionCriterion::ArgmaxAcc;
    bool record_gradients = false; // keep per-entry gradients in the log (tests)
};

/// Circuit slots ~ U[0, 0.01]; the three initial-state slots ~ U[0, 1].
ParameterSet init_params(const AnsatzSpec &spec, std::uint64_t seed);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t slots) : m(slots, 0.0), v(slots, 0.0) {}
};

void adam_step(std::vector<double> &theta, std::span<const double> grad, AdamState &state,
               double learning_rate);

struct LogRow {
    long step = 0;
    double loss = 0.0;
    std::vector<std::pair<std::string, double>> components; // batch means
    double grad_aggregate = 0.0; // grad_stats aggregate of the batch's per-entry gradients
    // filled on epoch boundaries only, NaN otherwise
    double argmax_acc;
    double dist_acc;
    double sureness;
};

struct TrainingLog {
    std::vector<LogRow> rows;
    std::vector<std::vector<GradientVector>> recorded_gradients; // per step, when enabled
};

struct Checkpoint {
    ModelConfig model;
    std::vector<double> theta;
    double selection_score = 0.0;
    long step = 0;
    std::string fingerprint;
};

struct TrainResult {
    Checkpoint best;
    TrainingLog log;
    double final_loss = 0.0;
};

/// Adam over shuffled batches; batch loss and gradient aggregate by the mean.
/// The checkpoint maximising the selection criterion (evaluated on the
/// training split once per epoch) is retained; ties keep the earliest.
/// Deterministic per seed. Pass warm_theta to resume from a checkpoint.
TrainResult train(const TrainConfig &config, const ModelConfig &model,
                  std::span<const DatasetEntry> data,
                  const std::vector<double> *warm_theta = nullptr);

/// Continue training from an existing checkpoint's parameters. The tied
/// layout is size-independent, so the checkpoint may come from another n.
TrainResult warm_start(const TrainConfig &config, const ModelConfig &model,
                       std::span<const DatasetEntry> data, const Checkpoint &from);

double selection_score(const ModelConfig &model, std::span<const DatasetEntry> data,
                       std::span<const double> theta, SelectionCriterion criterion);

// Per-(n, p) aggregation of entry metrics.
struct CellMetrics {
    int n = 0;
    double p = -1.0;
    int count = 0;
    double dist_mean = 0.0, dist_std = 0.0;
    double argmax_mean = 0.0, argmax_std = 0.0;
    double sureness_mean = 0.0;
    double approx_mean = 0.0;
    double exp_acc_mean = 0.0;
    double baseline_mean = 0.0;
};

std::vector<CellMetrics> aggregate_by_cell(std::span<const DatasetEntry> entries,
                                           std::span<const EntryMetrics> metrics);

struct FoldRecord {
    int iteration = 0;
    int fold = 0;
    std::vector<std::size_t> test_indices;
    std::vector<EntryMetrics> test_metrics;
    double selection_score = 0.0;
};

struct CrossValResult {
    std::vector<FoldRecord> folds;
    std::vector<CellMetrics> cells; // aggregated over every fold and iteration
};

/// k-fold cross-validation, `iterations` independent shuffles. Folds
/// partition the dataset; assignment derives from the run seed only.
CrossValResult cross_validate(const TrainConfig &config, const ModelConfig &model,
                              std::span<const DatasetEntry> data, int folds = 5,
                              int iterations = 2);

void save_checkpoint(const Checkpoint &checkpoint, const std::string &path);
Checkpoint load_checkpoint(const std::string &path);

void write_training_log_csv(const TrainingLog &log, const std::string &run_id,
                            const std::string &path);

nlohmann::json model_config_to_json(const ModelConfig &config);
ModelConfig model_config_from_json(const nlohmann::json &j);
nlohmann::json train_config_to_json(const TrainConfig &config);

} // namespace qgnn

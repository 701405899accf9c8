#include "qgnn/training.hpp"

#include "qgnn/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

using nlohmann::json;

namespace qgnn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

std::string selection_name(SelectionCriterion criterion) {
    switch (criterion) {
    case SelectionCriterion::ArgmaxAcc: return "argmax_acc";
    case SelectionCriterion::SurenessArgmax: return "sureness_argmax";
    case SelectionCriterion::Loss: return "loss";
    }
    return {};
}

SelectionCriterion selection_from_name(const std::string &name) {
    if (name == "argmax_acc") return SelectionCriterion::ArgmaxAcc;
    if (name == "sureness_argmax") return SelectionCriterion::SurenessArgmax;
    if (name == "loss") return SelectionCriterion::Loss;
    throw std::invalid_argument(fmt::format("unknown selection criterion '{}'", name));
}

ParameterSet init_params(const AnsatzSpec &spec, std::uint64_t seed) {
    Rng rng(seed);
    ParameterSet params;
    params.values.assign(static_cast<std::size_t>(param_count(spec)), 0.0);
    std::size_t i = 0;
    if (spec.include_initial_state) {
        for (; i < 3; ++i) {
            params.values[i] = rng.uniform_real(0.0, 1.0);
        }
    }
    for (; i < params.values.size(); ++i) {
        params.values[i] = rng.uniform_real(0.0, 0.01);
    }
    return params;
}

void adam_step(std::vector<double> &theta, std::span<const double> grad, AdamState &state,
               double learning_rate) {
    if (theta.size() != grad.size() || theta.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: shape mismatch");
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        theta[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

double selection_score(const ModelConfig &model, std::span<const DatasetEntry> data,
                       std::span<const double> theta, SelectionCriterion criterion) {
    double total = 0.0;
    for (const DatasetEntry &entry : data) {
        const EntryMetrics m = evaluate_entry(model, entry, theta);
        switch (criterion) {
        case SelectionCriterion::ArgmaxAcc: total += m.argmax_acc; break;
        case SelectionCriterion::SurenessArgmax: total += m.sureness; break;
        case SelectionCriterion::Loss: total -= m.loss; break;
        }
    }
    return total / static_cast<double>(data.size());
}

TrainResult train(const TrainConfig &config, const ModelConfig &model,
                  std::span<const DatasetEntry> data, const std::vector<double> *warm_theta) {
    if (data.empty()) {
        throw std::invalid_argument("train: empty dataset");
    }
    if (config.learning_rate <= 0.0) {
        throw std::invalid_argument("train: learning rate must be positive");
    }
    if (config.batch_size < 1) {
        throw std::invalid_argument("train: batch size must be >= 1");
    }
    const int slots = param_count(model.ansatz);
    std::vector<double> theta;
    if (warm_theta != nullptr) {
        if (static_cast<int>(warm_theta->size()) != slots) {
            throw std::invalid_argument(
                fmt::format("warm-start parameters have {} slots, spec expects {}",
                            warm_theta->size(), slots));
        }
        theta = *warm_theta;
    } else {
        theta = init_params(model.ansatz, config.seed).values;
    }

    TrainResult result;
    result.best.model = model;
    result.best.fingerprint = config_fingerprint(model);
    result.best.theta = theta;
    result.best.step = 0;
    result.best.selection_score = selection_score(model, data, theta, config.selection);

    AdamState adam(static_cast<std::size_t>(slots));
    Rng shuffle_rng(mix_seed(config.seed, 0x0badf00dULL));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    long step = 0;
    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const double inv = 1.0 / static_cast<double>(stop - start);

            std::vector<GradientVector> entry_grads;
            entry_grads.reserve(stop - start);
            std::vector<double> mean_grad(static_cast<std::size_t>(slots), 0.0);
            double mean_loss = 0.0;
            std::vector<std::pair<std::string, double>> mean_components;
            for (std::size_t k = start; k < stop; ++k) {
                const DatasetEntry &entry = data[order[k]];
                const LossValue loss = entry_loss(model, entry, theta);
                mean_loss += loss.scalar * inv;
                if (mean_components.empty()) {
                    for (const auto &[name, value] : loss.components) {
                        mean_components.emplace_back(name, value * inv);
                    }
                } else {
                    for (std::size_t c = 0; c < loss.components.size(); ++c) {
                        mean_components[c].second += loss.components[c].second * inv;
                    }
                }
                GradientVector grad = loss_gradient(model, entry, theta);
                for (std::size_t i = 0; i < mean_grad.size(); ++i) {
                    mean_grad[i] += grad.values[i] * inv;
                }
                entry_grads.push_back(std::move(grad));
            }

            if (!std::isfinite(mean_loss)) {
                throw std::runtime_error(fmt::format(
                    "training aborted: non-finite loss {} at step {} (epoch {})", mean_loss,
                    step + 1, epoch + 1));
            }

            ++step;
            LogRow row;
            row.step = step;
            row.loss = mean_loss;
            row.components = std::move(mean_components);
            row.grad_aggregate = grad_stats(entry_grads).aggregate;
            row.argmax_acc = kNaN;
            row.dist_acc = kNaN;
            row.sureness = kNaN;
            result.log.rows.push_back(std::move(row));
            if (config.record_gradients) {
                result.log.recorded_gradients.push_back(std::move(entry_grads));
            }

            adam_step(theta, mean_grad, adam, config.learning_rate);
        }

        // model selection once per epoch, not per step
        double argmax_total = 0.0, dist_total = 0.0, sureness_total = 0.0, loss_total = 0.0;
        for (const DatasetEntry &entry : data) {
            const EntryMetrics m = evaluate_entry(model, entry, theta);
            argmax_total += m.argmax_acc;
            dist_total += m.dist_acc;
            sureness_total += m.sureness;
            loss_total += m.loss;
        }
        const double inv_n = 1.0 / static_cast<double>(data.size());
        LogRow &last = result.log.rows.back();
        last.argmax_acc = argmax_total * inv_n;
        last.dist_acc = dist_total * inv_n;
        last.sureness = sureness_total * inv_n;

        double score = 0.0;
        switch (config.selection) {
        case SelectionCriterion::ArgmaxAcc: score = last.argmax_acc; break;
        case SelectionCriterion::SurenessArgmax: score = last.sureness; break;
        case SelectionCriterion::Loss: score = -loss_total * inv_n; break;
        }
        if (score > result.best.selection_score) {
            result.best.selection_score = score;
            result.best.theta = theta;
            result.best.step = step;
        }
    }
    result.final_loss = result.log.rows.empty() ? kNaN : result.log.rows.back().loss;
    return result;
}

TrainResult warm_start(const TrainConfig &config, const ModelConfig &model,
                       std::span<const DatasetEntry> data, const Checkpoint &from) {
    if (from.model.ansatz != model.ansatz) {
        throw std::invalid_argument("warm_start: checkpoint ansatz spec differs from the model");
    }
    return train(config, model, data, &from.theta);
}

std::vector<CellMetrics> aggregate_by_cell(std::span<const DatasetEntry> entries,
                                           std::span<const EntryMetrics> metrics) {
    if (entries.size() != metrics.size()) {
        throw std::invalid_argument("aggregate_by_cell: size mismatch");
    }
    std::map<std::pair<int, double>, std::vector<const EntryMetrics *>> groups;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        groups[{entries[i].graph.n(), entries[i].edge_probability}].push_back(&metrics[i]);
    }
    std::vector<CellMetrics> cells;
    for (const auto &[key, rows] : groups) {
        CellMetrics cell;
        cell.n = key.first;
        cell.p = key.second;
        cell.count = static_cast<int>(rows.size());
        const double inv = 1.0 / static_cast<double>(rows.size());
        for (const EntryMetrics *m : rows) {
            cell.dist_mean += m->dist_acc * inv;
            cell.argmax_mean += m->argmax_acc * inv;
            cell.sureness_mean += m->sureness * inv;
            cell.approx_mean += m->approx_ratio * inv;
            cell.exp_acc_mean += m->exp_acc * inv;
            cell.baseline_mean += m->random_baseline * inv;
        }
        for (const EntryMetrics *m : rows) {
            cell.dist_std += (m->dist_acc - cell.dist_mean) * (m->dist_acc - cell.dist_mean) * inv;
            cell.argmax_std +=
                (m->argmax_acc - cell.argmax_mean) * (m->argmax_acc - cell.argmax_mean) * inv;
        }
        cell.dist_std = std::sqrt(cell.dist_std);
        cell.argmax_std = std::sqrt(cell.argmax_std);
        cells.push_back(cell);
    }
    return cells;
}

CrossValResult cross_validate(const TrainConfig &config, const ModelConfig &model,
                              std::span<const DatasetEntry> data, int folds, int iterations) {
    if (folds < 2) {
        throw std::invalid_argument("cross_validate: needs at least 2 folds");
    }
    if (static_cast<int>(data.size()) < folds) {
        throw std::invalid_argument(fmt::format(
            "cross_validate: dataset of {} entries cannot fill {} folds", data.size(), folds));
    }
    if (iterations < 1) {
        throw std::invalid_argument("cross_validate: needs at least 1 iteration");
    }

    CrossValResult result;
    std::vector<const DatasetEntry *> flat_entries;
    std::vector<EntryMetrics> flat_metrics;

    for (int iter = 0; iter < iterations; ++iter) {
        Rng fold_rng(mix_seed(config.seed, 0xf01dULL + static_cast<std::uint64_t>(iter)));
        std::vector<std::size_t> perm(data.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        fold_rng.shuffle(perm);

        for (int fold = 0; fold < folds; ++fold) {
            const std::size_t lo = data.size() * static_cast<std::size_t>(fold) /
                                   static_cast<std::size_t>(folds);
            const std::size_t hi = data.size() * (static_cast<std::size_t>(fold) + 1) /
                                   static_cast<std::size_t>(folds);
            FoldRecord record;
            record.iteration = iter;
            record.fold = fold;
            record.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(lo),
                                       perm.begin() + static_cast<std::ptrdiff_t>(hi));
            std::sort(record.test_indices.begin(), record.test_indices.end());

            std::vector<DatasetEntry> train_split;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (!std::binary_search(record.test_indices.begin(), record.test_indices.end(),
                                        i)) {
                    train_split.push_back(data[i]);
                }
            }
            TrainConfig fold_config = config;
            fold_config.seed =
                mix_seed(config.seed, 0x1000ULL + static_cast<std::uint64_t>(iter * folds + fold));
            const TrainResult trained = train(fold_config, model, train_split);
            record.selection_score = trained.best.selection_score;
            for (const std::size_t idx : record.test_indices) {
                record.test_metrics.push_back(
                    evaluate_entry(model, data[idx], trained.best.theta));
                flat_entries.push_back(&data[idx]);
                flat_metrics.push_back(record.test_metrics.back());
            }
            result.folds.push_back(std::move(record));
        }
    }

    std::vector<DatasetEntry> flat_copy;
    flat_copy.reserve(flat_entries.size());
    for (const DatasetEntry *e : flat_entries) {
        flat_copy.push_back(*e);
    }
    result.cells = aggregate_by_cell(flat_copy, flat_metrics);
    return result;
}

json model_config_to_json(const ModelConfig &config) {
    json j;
    j["spec"] = {{"family", family_name(config.ansatz.family)},
                 {"layers", config.ansatz.layers},
                 {"inner_layers", config.ansatz.inner_layers},
                 {"include_initial_state", config.ansatz.include_initial_state}};
    j["observable"] = observable_name(config.observable);
    j["loss"] = loss_name(config.loss);
    j["alpha"] = config.alpha;
    j["epsilon"] = config.epsilon;
    return j;
}

ModelConfig model_config_from_json(const json &j) {
    ModelConfig config;
    const json &spec = j.at("spec");
    config.ansatz.family = family_from_name(spec.at("family").get<std::string>());
    config.ansatz.layers = spec.at("layers").get<int>();
    config.ansatz.inner_layers = spec.at("inner_layers").get<int>();
    config.ansatz.include_initial_state = spec.at("include_initial_state").get<bool>();
    config.observable = observable_from_name(j.at("observable").get<std::string>());
    config.loss = loss_from_name(j.at("loss").get<std::string>());
    config.alpha = j.at("alpha").get<double>();
    config.epsilon = j.at("epsilon").get<double>();
    validate_spec(config.ansatz);
    return config;
}

json train_config_to_json(const TrainConfig &config) {
    json j;
    j["learning_rate"] = config.learning_rate;
    j["batch_size"] = config.batch_size;
    j["max_epochs"] = config.max_epochs;
    j["seed"] = config.seed;
    j["selection"] = selection_name(config.selection);
    return j;
}

void save_checkpoint(const Checkpoint &checkpoint, const std::string &path) {
    json j = model_config_to_json(checkpoint.model);
    j["theta"] = checkpoint.theta;
    j["metadata"] = {{"selection_score", checkpoint.selection_score},
                     {"step", checkpoint.step},
                     {"config_fingerprint", checkpoint.fingerprint}};
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
    }
    out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open '{}'", path));
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw std::runtime_error(fmt::format("{}: corrupt checkpoint: {}", path, e.what()));
    }
    Checkpoint checkpoint;
    try {
        checkpoint.model = model_config_from_json(j);
        checkpoint.theta = j.at("theta").get<std::vector<double>>();
        const json &meta = j.at("metadata");
        checkpoint.selection_score = meta.at("selection_score").get<double>();
        checkpoint.step = meta.at("step").get<long>();
        checkpoint.fingerprint = meta.at("config_fingerprint").get<std::string>();
    } catch (const json::exception &e) {
        throw std::runtime_error(fmt::format("{}: corrupt checkpoint: {}", path, e.what()));
    }
    if (static_cast<int>(checkpoint.theta.size()) != param_count(checkpoint.model.ansatz)) {
        throw std::runtime_error(
            fmt::format("{}: checkpoint has {} parameters, spec expects {}", path,
                        checkpoint.theta.size(), param_count(checkpoint.model.ansatz)));
    }
    for (const double v : checkpoint.theta) {
        if (!std::isfinite(v)) {
            throw std::runtime_error(fmt::format("{}: non-finite checkpoint parameter", path));
        }
    }
    return checkpoint;
}

void write_training_log_csv(const TrainingLog &log, const std::string &run_id,
                            const std::string &path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
    }
    out << "run_id,step,loss,loss_components,grad_norm_mean,argmax_acc,dist_acc,sureness\n";
    auto cell = [](double v) { return std::isnan(v) ? std::string{} : fmt::format("{:.17g}", v); };
    for (const LogRow &row : log.rows) {
        std::string components;
        for (const auto &[name, value] : row.components) {
            if (!components.empty()) {
                components += ';';
            }
            components += fmt::format("{}={:.17g}", name, value);
        }
        out << fmt::format("{},{},{:.17g},{},{:.17g},{},{},{}\n", run_id, row.step, row.loss,
                           components, row.grad_aggregate, cell(row.argmax_acc),
                           cell(row.dist_acc), cell(row.sureness));
    }
}

} // namespace qgnn

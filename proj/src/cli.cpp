#include "qgnn/cli.hpp"

#include "qgnn/audit.hpp"
#include "qgnn/calibration.hpp"
#include "qgnn/dataset.hpp"
#include "qgnn/pine.hpp"
#include "qgnn/plot.hpp"
#include "qgnn/rng.hpp"
#include "qgnn/training.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using nlohmann::json;
namespace fs = std::filesystem;

namespace qgnn::cli {

namespace {

std::string fnv1a_hex(const std::string &text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

// Every command leaves a replayable record next to its outputs.
struct RunRecord {
    std::string command;
    std::uint64_t seed = 0;
    json config;
    std::vector<std::string> artifacts;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void write(const fs::path &path) const {
        json j;
        j["run_id"] = fnv1a_hex(fmt::format("{}#{}", command, seed));
        j["command"] = command;
        j["seed"] = seed;
        j["config"] = config;
        j["artifacts"] = artifacts;
        j["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::ofstream out(path);
        if (!out) {
            throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
        }
        out << j.dump(2) << '\n';
    }

    std::string run_id() const { return fnv1a_hex(fmt::format("{}#{}", command, seed)); }
};

std::string join_args(const std::vector<std::string> &args) {
    std::string out;
    for (const std::string &a : args) {
        if (!out.empty()) {
            out += ' ';
        }
        out += a;
    }
    return out;
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
    }
    out << text;
}

// ---------------------------------------------------------------------------
// gen-data

// Cell syntax: "n=2-6:all" or "n=8:p=0.5:count=111" or
// "n=8:p=0.1-0.9/0.1:count=111". Ranges expand per n and per p.
std::vector<GenCell> parse_cells(const std::vector<std::string> &specs) {
    std::vector<GenCell> cells;
    for (const std::string &spec : specs) {
        std::vector<std::string> fields;
        std::stringstream ss(spec);
        std::string field;
        while (std::getline(ss, field, ':')) {
            fields.push_back(field);
        }
        if (fields.size() < 2 || fields.front().rfind("n=", 0) != 0) {
            throw CLI::ValidationError(
                "--cell", fmt::format("bad cell '{}': expected n=<range>:all or "
                                      "n=<range>:p=<grid>:count=<k>",
                                      spec));
        }
        const std::string n_part = fields.front().substr(2);
        int n_lo = 0, n_hi = 0;
        if (const auto dash = n_part.find('-'); dash != std::string::npos) {
            n_lo = std::stoi(n_part.substr(0, dash));
            n_hi = std::stoi(n_part.substr(dash + 1));
        } else {
            n_lo = n_hi = std::stoi(n_part);
        }
        if (n_lo < 1 || n_hi < n_lo) {
            throw CLI::ValidationError("--cell", fmt::format("bad n range in '{}'", spec));
        }

        if (fields[1] == "all") {
            if (fields.size() != 2) {
                throw CLI::ValidationError("--cell", fmt::format("bad cell '{}'", spec));
            }
            for (int n = n_lo; n <= n_hi; ++n) {
                cells.push_back({n, true, -1.0, 0});
            }
            continue;
        }
        if (fields.size() != 3 || fields[1].rfind("p=", 0) != 0 ||
            fields[2].rfind("count=", 0) != 0) {
            throw CLI::ValidationError("--cell", fmt::format("bad cell '{}'", spec));
        }
        const std::string p_part = fields[1].substr(2);
        std::vector<double> ps;
        if (const auto dash = p_part.find('-'); dash != std::string::npos) {
            const auto slash = p_part.find('/', dash);
            if (slash == std::string::npos) {
                throw CLI::ValidationError(
                    "--cell", fmt::format("p range in '{}' needs a /step", spec));
            }
            const double lo = std::stod(p_part.substr(0, dash));
            const double hi = std::stod(p_part.substr(dash + 1, slash - dash - 1));
            const double step = std::stod(p_part.substr(slash + 1));
            if (step <= 0.0) {
                throw CLI::ValidationError("--cell", "p step must be positive");
            }
            for (double p = lo; p <= hi + 1e-9; p += step) {
                ps.push_back(p);
            }
        } else {
            ps.push_back(std::stod(p_part));
        }
        const int count = std::stoi(fields[2].substr(6));
        for (int n = n_lo; n <= n_hi; ++n) {
            for (const double p : ps) {
                cells.push_back({n, false, p, count});
            }
        }
    }
    return cells;
}

struct GenDataOptions {
    std::vector<std::string> cell_specs;
    std::uint64_t seed = 0;
    std::string out;
    bool force = false;
};

int cmd_gen_data(const GenDataOptions &opt, const std::string &command) {
    const std::vector<GenCell> cells = parse_cells(opt.cell_specs);
    if (fs::exists(opt.out) && !opt.force) {
        throw std::runtime_error(
            fmt::format("'{}' already exists (pass --force to overwrite)", opt.out));
    }
    RunRecord record;
    record.command = command;
    record.seed = opt.seed;
    const DatasetManifest manifest = build_dataset(cells, opt.seed);
    save_manifest(manifest, opt.out);

    std::map<std::string, int> per_cell;
    for (const DatasetEntry &entry : manifest.entries) {
        const std::string key = entry.edge_probability < 0.0
                                    ? fmt::format("n={} all", entry.graph.n())
                                    : fmt::format("n={} p={}", entry.graph.n(),
                                                  entry.edge_probability);
        per_cell[key] += 1;
    }
    for (const auto &[key, count] : per_cell) {
        fmt::print("{}: {} entries\n", key, count);
    }
    fmt::print("total: {} entries -> {}\n", manifest.entries.size(), opt.out);

    record.config = {{"cells", opt.cell_specs}, {"out", opt.out}};
    record.artifacts = {opt.out};
    record.write(fs::path(opt.out).replace_extension(".run.json"));
    return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
    std::string data;
    std::string out_dir;
    std::string family = "rook";
    int layers = 5;
    int inner_layers = 0;
    std::string loss = "logwrong";
    std::string observable; // default derived from the loss
    double alpha = 0.5;
    double epsilon = 1e-10;
    double learning_rate = 0.01;
    int batch_size = 100;
    int epochs = 100;
    std::uint64_t seed = 0;
    std::string selection = "argmax_acc";
    std::string warm_start_path;
    int restarts = 1;
};

ModelConfig model_from_options(const TrainOptions &opt) {
    ModelConfig model;
    model.ansatz.family = family_from_name(opt.family);
    model.ansatz.layers = opt.layers;
    model.ansatz.inner_layers =
        model.ansatz.family == AnsatzFamily::MilleFeuille && opt.inner_layers == 0
            ? 2
            : opt.inner_layers;
    model.loss = loss_from_name(opt.loss);
    if (!opt.observable.empty()) {
        model.observable = observable_from_name(opt.observable);
    } else {
        switch (model.loss) {
        case LossKind::Mse:
        case LossKind::Mountain:
            model.observable = ObservableKind::Mountain;
            break;
        case LossKind::Crater:
            model.observable = ObservableKind::Crater;
            break;
        default:
            model.observable = ObservableKind::Bitstring;
        }
    }
    model.alpha = opt.alpha;
    model.epsilon = opt.epsilon;
    validate_spec(model.ansatz);
    return model;
}

int cmd_train(const TrainOptions &opt, const std::string &command) {
    const ModelConfig model = model_from_options(opt);
    TrainConfig config;
    config.learning_rate = opt.learning_rate;
    config.batch_size = opt.batch_size;
    config.max_epochs = opt.epochs;
    config.seed = opt.seed;
    config.selection = selection_from_name(opt.selection);

    const DatasetManifest manifest = load_manifest(opt.data);
    fs::create_directories(opt.out_dir);

    RunRecord record;
    record.command = command;
    record.seed = opt.seed;

    fmt::print("training {} (L={}{}) loss={} observable={} lr={} batch={} epochs={} seed={}\n",
               opt.family, opt.layers,
               model.ansatz.family == AnsatzFamily::MilleFeuille
                   ? fmt::format(", M={}", model.ansatz.inner_layers)
                   : "",
               loss_name(model.loss), observable_name(model.observable), config.learning_rate,
               config.batch_size, config.max_epochs, config.seed);

    std::optional<Checkpoint> warm;
    if (!opt.warm_start_path.empty()) {
        warm = load_checkpoint(opt.warm_start_path);
        fmt::print("warm start from {} (step {})\n", opt.warm_start_path, warm->step);
    }

    std::optional<TrainResult> best;
    int best_restart = 0;
    json restart_log = json::array();
    for (int r = 0; r < std::max(1, opt.restarts); ++r) {
        TrainConfig attempt = config;
        attempt.seed = opt.restarts > 1 ? mix_seed(config.seed, static_cast<std::uint64_t>(r))
                                        : config.seed;
        TrainResult result = warm ? warm_start(attempt, model, manifest.entries, *warm)
                                  : train(attempt, model, manifest.entries);
        fmt::print("restart {}: selection score {:.6f} at step {} (final loss {:.6g})\n", r,
                   result.best.selection_score, result.best.step, result.final_loss);
        restart_log.push_back({{"restart", r},
                               {"seed", attempt.seed},
                               {"selection_score", result.best.selection_score},
                               {"best_step", result.best.step},
                               {"final_loss", result.final_loss}});
        if (!best || result.best.selection_score > best->best.selection_score) {
            best = std::move(result);
            best_restart = r;
        }
    }

    const fs::path out_dir(opt.out_dir);
    save_checkpoint(best->best, (out_dir / "checkpoint.json").string());
    write_training_log_csv(best->log, record.run_id(), (out_dir / "training_log.csv").string());

    json config_json;
    config_json["model"] = model_config_to_json(model);
    config_json["train"] = train_config_to_json(config);
    config_json["restarts"] = opt.restarts;
    config_json["restart_outcomes"] = restart_log;
    config_json["best_restart"] = best_restart;
    config_json["warm_start"] = opt.warm_start_path;
    config_json["data"] = opt.data;
    write_text(out_dir / "config.json", config_json.dump(2) + "\n");

    record.config = config_json;
    record.artifacts = {(out_dir / "checkpoint.json").string(),
                        (out_dir / "training_log.csv").string(),
                        (out_dir / "config.json").string()};
    record.write(out_dir / "run_record.json");
    fmt::print("checkpoint: {} (selection score {:.6f})\n",
               (out_dir / "checkpoint.json").string(), best->best.selection_score);
    return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
    std::string checkpoint;
    std::string data;
    std::string out;
    std::string calibration;
    std::uint64_t seed = 0;
};

std::string cell_csv_header() {
    return "n,p,count,dist_acc,dist_std,argmax_acc,argmax_std,sureness,approx_ratio,exp_acc,"
           "random_baseline";
}

std::string cell_csv_row(const CellMetrics &cell) {
    return fmt::format("{},{:.17g},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},"
                       "{:.17g}",
                       cell.n, cell.p, cell.count, cell.dist_mean, cell.dist_std,
                       cell.argmax_mean, cell.argmax_std, cell.sureness_mean, cell.approx_mean,
                       cell.exp_acc_mean, cell.baseline_mean);
}

int cmd_eval(const EvalOptions &opt, const std::string &command) {
    const Checkpoint checkpoint = load_checkpoint(opt.checkpoint);
    const DatasetManifest manifest = load_manifest(opt.data);
    RunRecord record;
    record.command = command;
    record.seed = opt.seed;

    std::optional<ShiftModel> shift;
    if (!opt.calibration.empty()) {
        shift = load_shift(opt.calibration);
        if (task_of(checkpoint.model) != Task::CliqueNumber) {
            throw std::runtime_error("calibration applies to clique-number models only");
        }
    }

    std::vector<EntryMetrics> metrics;
    metrics.reserve(manifest.entries.size());
    for (const DatasetEntry &entry : manifest.entries) {
        EntryMetrics m = evaluate_entry(checkpoint.model, entry, checkpoint.theta);
        if (shift) {
            const double corrected =
                apply_shift(*shift, entry.graph.n(), m.expectation);
            m.exp_acc = mountain_class(corrected, entry.graph.n()) == entry.omega ? 1.0 : 0.0;
        }
        metrics.push_back(m);
    }
    const std::vector<CellMetrics> cells = aggregate_by_cell(manifest.entries, metrics);

    std::string csv = cell_csv_header() + "\n";
    for (const CellMetrics &cell : cells) {
        csv += cell_csv_row(cell) + "\n";
    }
    write_text(opt.out, csv);
    for (const CellMetrics &cell : cells) {
        fmt::print("n={} p={} count={}: dist={:.4f} argmax={:.4f} sureness={:.4f} "
                   "approx={:.4f} baseline={:.4f}\n",
                   cell.n, cell.p, cell.count, cell.dist_mean, cell.argmax_mean,
                   cell.sureness_mean, cell.approx_mean, cell.baseline_mean);
    }

    record.config = {{"checkpoint", opt.checkpoint},
                     {"data", opt.data},
                     {"calibration", opt.calibration}};
    record.artifacts = {opt.out};
    record.write(fs::path(opt.out).replace_extension(".run.json"));
    return 0;
}

// ---------------------------------------------------------------------------
// pine

struct PineOptions {
    std::string data;
    std::string heuristic = "uniform";
    std::string checkpoint;
    int runs = 100;
    std::uint64_t seed = 0;
    std::string out;
    bool exact = false;
};

int cmd_pine(const PineOptions &opt, const std::string &command) {
    const DatasetManifest manifest = load_manifest(opt.data);
    RunRecord record;
    record.command = command;
    record.seed = opt.seed;

    NodeHeuristic heuristic;
    if (opt.heuristic == "uniform") {
        heuristic = NodeHeuristic::uniform();
    } else if (opt.heuristic == "degree") {
        heuristic = NodeHeuristic::degree();
    } else if (opt.heuristic == "quantum") {
        if (opt.checkpoint.empty()) {
            throw std::runtime_error("--heuristic quantum needs --checkpoint");
        }
        heuristic = NodeHeuristic::quantum(load_checkpoint(opt.checkpoint));
    } else {
        throw std::runtime_error(
            fmt::format("unknown heuristic '{}' (uniform|degree|quantum)", opt.heuristic));
    }

    std::string csv =
        "graph_id,heuristic,run,success,clique_size,omega,trace_length,exact_success_prob\n";
    double success_total = 0.0;
    long row_count = 0;
    for (std::size_t g = 0; g < manifest.entries.size(); ++g) {
        const DatasetEntry &entry = manifest.entries[g];
        std::string exact_cell;
        if (opt.exact && entry.graph.n() <= 16) {
            exact_cell = fmt::format("{:.17g}", pine_success_prob(entry.graph, heuristic));
        }
        for (int run = 0; run < opt.runs; ++run) {
            const PineTrace trace =
                pine_run(entry.graph, heuristic,
                         mix_seed(opt.seed, (static_cast<std::uint64_t>(g) << 24) |
                                                static_cast<std::uint64_t>(run)));
            const bool success = std::binary_search(entry.target_bitstrings.begin(),
                                                    entry.target_bitstrings.end(), trace.clique);
            success_total += success ? 1.0 : 0.0;
            ++row_count;
            csv += fmt::format("{},{},{},{},{},{},{},{}\n", g, heuristic_name(heuristic.kind),
                               run, success ? 1 : 0, std::popcount(trace.clique), entry.omega,
                               trace.steps.size(), exact_cell);
        }
    }
    write_text(opt.out, csv);
    fmt::print("{} runs over {} graphs: success rate {:.4f}\n", row_count,
               manifest.entries.size(), success_total / static_cast<double>(row_count));

    record.config = {{"data", opt.data},
                     {"heuristic", opt.heuristic},
                     {"checkpoint", opt.checkpoint},
                     {"runs", opt.runs},
                     {"exact", opt.exact}};
    record.artifacts = {opt.out};
    record.write(fs::path(opt.out).replace_extension(".run.json"));
    return 0;
}

// ---------------------------------------------------------------------------
// audit

struct AuditOptions {
    std::string checkpoint;
    std::string data;
    std::string out_dir;
    int perms_per_entry = 2;
    std::uint64_t seed = 0;
};

int cmd_audit(const AuditOptions &opt, const std::string &command) {
    const Checkpoint checkpoint = load_checkpoint(opt.checkpoint);
    const DatasetManifest manifest = load_manifest(opt.data);
    fs::create_directories(opt.out_dir);
    RunRecord record;
    record.command = command;
    record.seed = opt.seed;

    const ParameterSet params{checkpoint.theta};
    SymmetryReport report = gate_symmetry_metrics(checkpoint.model.ansatz, params);

    double equivariance_max = 0.0;
    double invariance_max = 0.0;
    json per_graph = json::array();
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const DatasetEntry &entry = manifest.entries[i];
        const std::vector<Permutation> sigmas = audit_permutations(
            entry.graph.n(), mix_seed(opt.seed, static_cast<std::uint64_t>(i)));
        double graph_equiv = 0.0;
        for (const Permutation &sigma : sigmas) {
            graph_equiv = std::max(
                graph_equiv, check_equivariance(checkpoint.model.ansatz, entry.graph, params, sigma));
        }
        const double graph_inv =
            check_loss_invariance(checkpoint.model, entry, checkpoint.theta, sigmas);
        equivariance_max = std::max(equivariance_max, graph_equiv);
        invariance_max = std::max(invariance_max, graph_inv);
        per_graph.push_back({{"entry", i},
                             {"n", entry.graph.n()},
                             {"permutations", sigmas.size()},
                             {"equivariance_max_dev", graph_equiv},
                             {"loss_invariance_delta", graph_inv}});
    }
    report.loss_invariance_delta = invariance_max;

    const std::vector<AccuracyDropRow> drops =
        permuted_accuracy_drop(checkpoint, manifest.entries, opt.perms_per_entry, opt.seed);

    json j;
    j["checkpoint"] = opt.checkpoint;
    j["model"] = model_config_to_json(checkpoint.model);
    j["equivariance_max_dev"] = equivariance_max;
    j["loss_invariance_delta"] = invariance_max;
    j["per_graph"] = per_graph;
    j["permuted_accuracy"] = json::array();
    for (const AccuracyDropRow &row : drops) {
        j["permuted_accuracy"].push_back({{"entry", row.entry_index},
                                          {"n", row.n},
                                          {"original_argmax", row.original_argmax},
                                          {"permuted_argmax_mean", row.permuted_argmax_mean},
                                          {"original_dist", row.original_dist},
                                          {"permuted_dist_mean", row.permuted_dist_mean}});
    }
    j["gate_symmetry"] = json::array();
    for (const SymmetryLayerRow &row : report.rows) {
        j["gate_symmetry"].push_back({{"layer", row.layer},
                                      {"edge_type", row.anti_edge ? "anti_edge" : "edge"},
                                      {"swap_asymmetry", row.swap_asymmetry},
                                      {"commutator_norm", row.commutator_norm},
                                      {"identity_distance", row.identity_distance}});
    }
    const fs::path out_dir(opt.out_dir);
    write_text(out_dir / "audit.json", j.dump(2) + "\n");

    std::string csv = "layer,edge_type,swap_asymmetry,commutator_norm,identity_distance\n";
    for (const SymmetryLayerRow &row : report.rows) {
        csv += fmt::format("{},{},{:.17g},{:.17g},{:.17g}\n", row.layer,
                           row.anti_edge ? "anti_edge" : "edge", row.swap_asymmetry,
                           row.commutator_norm, row.identity_distance);
    }
    write_text(out_dir / "gate_symmetry.csv", csv);

    fmt::print("equivariance max deviation: {:.3e}\n", equivariance_max);
    fmt::print("loss invariance max delta:  {:.3e}\n", invariance_max);

    record.config = {{"checkpoint", opt.checkpoint},
                     {"data", opt.data},
                     {"perms_per_entry", opt.perms_per_entry}};
    record.artifacts = {(out_dir / "audit.json").string(),
                        (out_dir / "gate_symmetry.csv").string()};
    record.write(out_dir / "run_record.json");
    return 0;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateOptions {
    std::string checkpoint;
    std::string fit_data;
    std::string eval_data;
    std::string mode = "linear_in_n";
    std::string out;
    std::uint64_t seed = 0;
};

int cmd_calibrate(const CalibrateOptions &opt, const std::string &command) {
    const Checkpoint checkpoint = load_checkpoint(opt.checkpoint);
    if (task_of(checkpoint.model) != Task::CliqueNumber) {
        throw std::runtime_error("calibration applies to clique-number models only");
    }
    const DatasetManifest fit_manifest = load_manifest(opt.fit_data);
    RunRecord record;
    record.command = command;
    record.seed = opt.seed;

    std::vector<CalPoint> points;
    for (const DatasetEntry &entry : fit_manifest.entries) {
        const EntryMetrics m = evaluate_entry(checkpoint.model, entry, checkpoint.theta);
        points.push_back({entry.graph.n(), m.expectation, entry.omega});
    }
    const ShiftModel shift = fit_shift(points, shift_mode_from_name(opt.mode));
    save_shift(shift, opt.out);

    double max_residual = 0.0;
    for (const double r : shift.residuals) {
        max_residual = std::max(max_residual, std::abs(r));
    }
    fmt::print("fitted {} shift on {} points, max |residual| {:.4g}\n", opt.mode, points.size(),
               max_residual);

    if (!opt.eval_data.empty()) {
        const DatasetManifest eval_manifest = load_manifest(opt.eval_data);
        double raw_acc = 0.0, corrected_acc = 0.0;
        for (const DatasetEntry &entry : eval_manifest.entries) {
            const EntryMetrics m = evaluate_entry(checkpoint.model, entry, checkpoint.theta);
            raw_acc += m.exp_acc;
            const double corrected = apply_shift(shift, entry.graph.n(), m.expectation);
            corrected_acc +=
                mountain_class(corrected, entry.graph.n()) == entry.omega ? 1.0 : 0.0;
        }
        const double inv = 1.0 / static_cast<double>(eval_manifest.entries.size());
        fmt::print("expectation accuracy: raw {:.4f} -> corrected {:.4f}\n", raw_acc * inv,
                   corrected_acc * inv);
    }

    record.config = {{"checkpoint", opt.checkpoint},
                     {"fit_data", opt.fit_data},
                     {"eval_data", opt.eval_data},
                     {"mode", opt.mode}};
    record.artifacts = {opt.out};
    record.write(fs::path(opt.out).replace_extension(".run.json"));
    return 0;
}

// ---------------------------------------------------------------------------
// plot

struct PlotOptions {
    std::string kind = "generalisation";
    std::vector<std::string> metrics;
    std::string out;
    std::string metric = "dist_acc";
    std::uint64_t seed = 0;
};

std::vector<std::map<std::string, std::string>> read_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open '{}'", path));
    }
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        throw std::runtime_error(fmt::format("{}: empty metrics file", path));
    }
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            header.push_back(field);
        }
    }
    std::vector<std::map<std::string, std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        std::map<std::string, std::string> row;
        std::size_t i = 0;
        while (std::getline(ss, field, ',') && i < header.size()) {
            row[header[i++]] = field;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw std::runtime_error(fmt::format("{}: metrics file has no data rows", path));
    }
    return rows;
}

int cmd_plot(const PlotOptions &opt, const std::string &command) {
    RunRecord record;
    record.command = command;
    record.seed = opt.seed;

    std::string svg;
    if (opt.kind == "generalisation") {
        PlotSpec spec;
        spec.title = fmt::format("{} vs graph size", opt.metric);
        spec.x_label = "n";
        spec.y_label = opt.metric;
        for (const std::string &path : opt.metrics) {
            const auto rows = read_csv(path);
            std::map<int, std::pair<double, int>> by_n; // mean over p cells
            for (const auto &row : rows) {
                if (!row.count("n") || !row.count(opt.metric)) {
                    throw std::runtime_error(
                        fmt::format("{}: missing column 'n' or '{}'", path, opt.metric));
                }
                auto &[sum, count] = by_n[std::stoi(row.at("n"))];
                sum += std::stod(row.at(opt.metric));
                count += 1;
            }
            PlotSeries series;
            series.label = fs::path(path).stem().string();
            for (const auto &[n, agg] : by_n) {
                series.points.emplace_back(n, agg.first / agg.second);
            }
            spec.series.push_back(std::move(series));
        }
        svg = render_charts({spec});
    } else if (opt.kind == "training") {
        if (opt.metrics.size() != 1) {
            throw std::runtime_error("--kind training takes exactly one metrics file");
        }
        const auto rows = read_csv(opt.metrics.front());
        PlotSpec loss_spec{"training loss", "step", "loss", {PlotSeries{"loss", {}}}};
        PlotSpec grad_spec{
            "mean gradient magnitude", "step", "grad_norm_mean", {PlotSeries{"grad", {}}}};
        for (const auto &row : rows) {
            const double step = std::stod(row.at("step"));
            loss_spec.series[0].points.emplace_back(step, std::stod(row.at("loss")));
            grad_spec.series[0].points.emplace_back(step, std::stod(row.at("grad_norm_mean")));
        }
        svg = render_charts({loss_spec, grad_spec});
    } else {
        throw std::runtime_error(
            fmt::format("unknown plot kind '{}' (generalisation|training)", opt.kind));
    }
    write_text(opt.out, svg);
    fmt::print("wrote {}\n", opt.out);

    record.config = {{"kind", opt.kind}, {"metrics", opt.metrics}, {"metric", opt.metric}};
    record.artifacts = {opt.out};
    record.write(fs::path(opt.out).replace_extension(".run.json"));
    return 0;
}

} // namespace

int run(const std::vector<std::string> &args) {
    CLI::App app{"exact-simulation toolkit for graph-encoded variational circuits on clique tasks"};
    app.require_subcommand(1);
    const std::string command = join_args(args);

    GenDataOptions gen_opt;
    CLI::App *gen = app.add_subcommand("gen-data", "sample and label graph datasets");
    gen->add_option("--cell", gen_opt.cell_specs,
                    "generation cell, e.g. n=2-6:all or n=8:p=0.1-0.9/0.1:count=111")
        ->required();
    gen->add_option("--seed", gen_opt.seed, "global RNG seed");
    gen->add_option("--out", gen_opt.out, "output dataset path (JSONL)")->required();
    gen->add_flag("--force", gen_opt.force, "overwrite an existing output file");

    TrainOptions train_opt;
    CLI::App *train_cmd = app.add_subcommand("train", "train a model on a dataset");
    train_cmd->add_option("--data", train_opt.data, "training dataset (JSONL)")->required();
    train_cmd->add_option("--out-dir", train_opt.out_dir, "output directory")->required();
    train_cmd->add_option("--family", train_opt.family, "ansatz family: rook|millefeuille");
    train_cmd->add_option("--layers", train_opt.layers, "layer count L");
    train_cmd->add_option("--inner-layers", train_opt.inner_layers,
                          "inner layers M (millefeuille; default 2)");
    train_cmd->add_option("--loss", train_opt.loss,
                          "training loss: dist|logwrong|mse|mountain|crater");
    train_cmd->add_option("--observable", train_opt.observable,
                          "readout observable: bitstring|mountain|crater (default from loss)");
    train_cmd->add_option("--alpha", train_opt.alpha, "mountain/crater mix weight");
    train_cmd->add_option("--epsilon", train_opt.epsilon, "logwrong stability constant");
    train_cmd->add_option("--lr", train_opt.learning_rate, "Adam learning rate");
    train_cmd->add_option("--batch-size", train_opt.batch_size, "batch size");
    train_cmd->add_option("--epochs", train_opt.epochs, "epoch count");
    train_cmd->add_option("--seed", train_opt.seed, "global RNG seed");
    train_cmd->add_option("--selection", train_opt.selection,
                          "model selection criterion: argmax_acc|sureness_argmax|loss");
    train_cmd->add_option("--warm-start", train_opt.warm_start_path,
                          "checkpoint to initialise the parameters from");
    train_cmd->add_option("--restarts", train_opt.restarts,
                          "independent training restarts; the best checkpoint is kept");

    EvalOptions eval_opt;
    CLI::App *eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    eval_cmd->add_option("--checkpoint", eval_opt.checkpoint, "checkpoint JSON")->required();
    eval_cmd->add_option("--data", eval_opt.data, "dataset (JSONL)")->required();
    eval_cmd->add_option("--out", eval_opt.out, "metrics CSV output")->required();
    eval_cmd->add_option("--calibration", eval_opt.calibration,
                         "apply a fitted observable shift before classifying");
    eval_cmd->add_option("--seed", eval_opt.seed, "global RNG seed (unused; recorded)");

    PineOptions pine_opt;
    CLI::App *pine_cmd = app.add_subcommand("pine", "recursive clique search benchmark");
    pine_cmd->add_option("--data", pine_opt.data, "dataset (JSONL)")->required();
    pine_cmd->add_option("--heuristic", pine_opt.heuristic, "uniform|degree|quantum");
    pine_cmd->add_option("--checkpoint", pine_opt.checkpoint,
                         "checkpoint JSON (quantum heuristic)");
    pine_cmd->add_option("--runs", pine_opt.runs, "sampled runs per graph");
    pine_cmd->add_option("--seed", pine_opt.seed, "global RNG seed");
    pine_cmd->add_option("--out", pine_opt.out, "result rows CSV")->required();
    pine_cmd->add_flag("--exact", pine_opt.exact,
                       "also compute the exact success probability (n <= 16)");

    AuditOptions audit_opt;
    CLI::App *audit_cmd = app.add_subcommand("audit", "symmetry audits for a checkpoint");
    audit_cmd->add_option("--checkpoint", audit_opt.checkpoint, "checkpoint JSON")->required();
    audit_cmd->add_option("--data", audit_opt.data, "dataset (JSONL)")->required();
    audit_cmd->add_option("--out-dir", audit_opt.out_dir, "output directory")->required();
    audit_cmd->add_option("--perms-per-entry", audit_opt.perms_per_entry,
                          "permuted copies per entry for the accuracy-drop check");
    audit_cmd->add_option("--seed", audit_opt.seed, "global RNG seed");

    CalibrateOptions cal_opt;
    CLI::App *cal_cmd = app.add_subcommand("calibrate", "fit an observable shift");
    cal_cmd->add_option("--checkpoint", cal_opt.checkpoint, "checkpoint JSON")->required();
    cal_cmd->add_option("--fit-data", cal_opt.fit_data, "compositional-validation set (JSONL)")
        ->required();
    cal_cmd->add_option("--eval-data", cal_opt.eval_data,
                        "optional dataset to report corrected accuracy on");
    cal_cmd->add_option("--mode", cal_opt.mode, "per_size|linear_in_n|per_parity");
    cal_cmd->add_option("--out", cal_opt.out, "calibration JSON output")->required();
    cal_cmd->add_option("--seed", cal_opt.seed, "global RNG seed (unused; recorded)");

    PlotOptions plot_opt;
    CLI::App *plot_cmd = app.add_subcommand("plot", "render metric CSVs as SVG");
    plot_cmd->add_option("--kind", plot_opt.kind, "generalisation|training");
    plot_cmd->add_option("--metrics", plot_opt.metrics, "input metrics CSV file(s)")->required();
    plot_cmd->add_option("--metric", plot_opt.metric,
                         "column to plot for generalisation curves");
    plot_cmd->add_option("--out", plot_opt.out, "output SVG path")->required();
    plot_cmd->add_option("--seed", plot_opt.seed, "global RNG seed (unused; recorded)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) {
            return cmd_gen_data(gen_opt, command);
        }
        if (train_cmd->parsed()) {
            return cmd_train(train_opt, command);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(eval_opt, command);
        }
        if (pine_cmd->parsed()) {
            return cmd_pine(pine_opt, command);
        }
        if (audit_cmd->parsed()) {
            return cmd_audit(audit_opt, command);
        }
        if (cal_cmd->parsed()) {
            return cmd_calibrate(cal_opt, command);
        }
        if (plot_cmd->parsed()) {
            return cmd_plot(plot_opt, command);
        }
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}

} // namespace qgnn::cli

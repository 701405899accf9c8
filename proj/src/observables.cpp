#include "qgnn/observables.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qgnn {

std::string observable_name(ObservableKind kind) {
    switch (kind) {
    case ObservableKind::Bitstring: return "bitstring";
    case ObservableKind::Mountain: return "mountain";
    case ObservableKind::Crater: return "crater";
    }
    return {};
}

ObservableKind observable_from_name(const std::string &name) {
    if (name == "bitstring") return ObservableKind::Bitstring;
    if (name == "mountain") return ObservableKind::Mountain;
    if (name == "crater") return ObservableKind::Crater;
    throw std::invalid_argument(fmt::format("unknown observable '{}'", name));
}

std::string loss_name(LossKind kind) {
    switch (kind) {
    case LossKind::Dist: return "dist";
    case LossKind::LogWrong: return "logwrong";
    case LossKind::Argmax: return "argmax";
    case LossKind::Mse: return "mse";
    case LossKind::Mountain: return "mountain";
    case LossKind::Crater: return "crater";
    }
    return {};
}

LossKind loss_from_name(const std::string &name) {
    if (name == "dist") return LossKind::Dist;
    if (name == "logwrong") return LossKind::LogWrong;
    if (name == "argmax") return LossKind::Argmax;
    if (name == "mse") return LossKind::Mse;
    if (name == "mountain") return LossKind::Mountain;
    if (name == "crater") return LossKind::Crater;
    throw std::invalid_argument(fmt::format("unknown loss '{}'", name));
}

std::vector<double> observable_eigenvalues(ObservableKind kind, int n) {
    const std::size_t size = std::size_t{1} << n;
    std::vector<double> eig(size);
    for (std::uint64_t b = 0; b < size; ++b) {
        const int weight = std::popcount(b);
        switch (kind) {
        case ObservableKind::Bitstring:
            eig[b] = 1.0;
            break;
        case ObservableKind::Mountain:
            eig[b] = static_cast<double>(weight);
            break;
        case ObservableKind::Crater:
            if (2 * weight < n) {
                eig[b] = 1.0;
            } else if (2 * weight > n) {
                eig[b] = -1.0;
            } else {
                eig[b] = 0.0;
            }
            break;
        }
    }
    return eig;
}

namespace {

// Order-independent sum: accumulate ascending so the result depends only on
// the value multiset.
double sorted_sum(std::vector<double> &values) {
    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (const double v : values) {
        total += v;
    }
    return total;
}

void check_targets(std::span<const Bitstring> targets) {
    if (targets.empty()) {
        throw std::invalid_argument("target bitstring set is empty");
    }
}

bool is_target(std::span<const Bitstring> targets, Bitstring b) {
    return std::binary_search(targets.begin(), targets.end(), b);
}

} // namespace

double wrong_mass(std::span<const double> probs, std::span<const Bitstring> targets) {
    std::vector<double> values;
    values.reserve(probs.size());
    for (std::uint64_t b = 0; b < probs.size(); ++b) {
        if (!is_target(targets, b)) {
            values.push_back(probs[b]);
        }
    }
    return sorted_sum(values);
}

double loss_dist(std::span<const double> probs, std::span<const Bitstring> targets) {
    check_targets(targets);
    std::vector<double> values;
    values.reserve(probs.size());
    for (std::uint64_t b = 0; b < probs.size(); ++b) {
        if (!is_target(targets, b)) {
            values.push_back(probs[b] * probs[b]);
        }
    }
    return sorted_sum(values);
}

double loss_logwrong(std::span<const double> probs, std::span<const Bitstring> targets,
                     double epsilon) {
    check_targets(targets);
    if (epsilon <= 0.0) {
        throw std::invalid_argument("logwrong stability constant must be positive");
    }
    return std::log(epsilon + wrong_mass(probs, targets));
}

Bitstring argmax_index(std::span<const double> probs) {
    Bitstring best = 0;
    for (std::uint64_t b = 1; b < probs.size(); ++b) {
        if (probs[b] > probs[best]) {
            best = b;
        }
    }
    return best;
}

int loss_argmax(std::span<const double> probs, std::span<const Bitstring> targets) {
    check_targets(targets);
    return is_target(targets, argmax_index(probs)) ? 0 : 1;
}

double loss_mse(double expectation, double target) {
    const double diff = expectation - target;
    return diff * diff;
}

LossValue loss_mountain(std::span<const double> probs, double expectation,
                        std::span<const Bitstring> targets, double target_value, double alpha,
                        double epsilon) {
    if (alpha < 0.0 || alpha > 1.0) {
        throw std::invalid_argument("mountain mix weight must lie in [0, 1]");
    }
    const double mse = loss_mse(expectation, target_value);
    const double logwrong = loss_logwrong(probs, targets, epsilon);
    LossValue value;
    value.scalar = (1.0 - alpha) * mse + alpha * logwrong;
    value.components = {{"mse", mse}, {"logwrong", logwrong}};
    return value;
}

LossValue loss_crater(double expectation, double target_value, double lo, double hi,
                      double alpha) {
    if (lo > hi) {
        throw std::invalid_argument("crater band is inverted (lo > hi)");
    }
    const double mse = loss_mse(expectation, target_value);
    const bool outside = expectation < lo || expectation > hi; // closed interval
    LossValue value;
    value.scalar = mse + (outside ? alpha : 0.0);
    value.components = {{"mse", mse}, {"penalty", outside ? alpha : 0.0}};
    return value;
}

double metric_distribution_accuracy(std::span<const double> probs,
                                    std::span<const Bitstring> targets) {
    std::vector<double> values;
    values.reserve(targets.size());
    for (const Bitstring b : targets) {
        values.push_back(probs[b]);
    }
    return sorted_sum(values);
}

double metric_sureness_argmax(std::span<const double> probs,
                              std::span<const Bitstring> targets) {
    const Bitstring best = argmax_index(probs);
    return is_target(targets, best) ? probs[best] : 0.0;
}

std::vector<Bitstring> popcount_targets(int n, int weight) {
    std::vector<Bitstring> targets;
    const std::uint64_t size = std::uint64_t{1} << n;
    for (std::uint64_t b = 0; b < size; ++b) {
        if (std::popcount(b) == weight) {
            targets.push_back(b);
        }
    }
    return targets;
}

double random_baseline_max_clique(int n, std::size_t target_count) {
    return static_cast<double>(target_count) * std::pow(2.0, -n);
}

double random_baseline_clique_number(int n, int omega) {
    return static_cast<double>(binomial(n, omega)) * std::pow(2.0, -n);
}

double crater_target(int omega, int n) {
    return 1.0 - 2.0 * static_cast<double>(omega) / static_cast<double>(n);
}

std::pair<double, double> crater_band(int omega, int n) {
    const double centre = crater_target(omega, n);
    const double half = 1.0 / static_cast<double>(n);
    return {centre - half, centre + half};
}

int mountain_class(double expectation, int n) {
    const int k = static_cast<int>(std::floor(expectation + 0.5)); // ties round up
    return std::clamp(k, 1, n);
}

int crater_class(double expectation, int n) {
    int best = 1;
    double best_dist = std::abs(expectation - crater_target(1, n));
    for (int k = 2; k <= n; ++k) {
        const double dist = std::abs(expectation - crater_target(k, n));
        if (dist < best_dist) {
            best_dist = dist;
            best = k;
        }
    }
    return best;
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    unsigned __int128 result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    }
    return static_cast<std::uint64_t>(result);
}

} // namespace qgnn

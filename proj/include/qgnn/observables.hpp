#pragma once

#include "qgnn/graph.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qgnn {

enum class ObservableKind { Bitstring, Mountain, Crater };
enum class LossKind { Dist, LogWrong, Argmax, Mse, Mountain, Crater };
enum class Task { MaxClique, CliqueNumber };

std::string observable_name(ObservableKind kind);
ObservableKind observable_from_name(const std::string &name);
std::string loss_name(LossKind kind);
LossKind loss_from_name(const std::string &name);

// Eigenvalues of the diagonal readout observables, indexed by basis state.
// Bitstring is the identity (all ones); Mountain assigns the Hamming weight;
// Crater assigns +1 below weight n/2, -1 above, 0 at exactly n/2 (even n).
std::vector<double> observable_eigenvalues(ObservableKind kind, int n);

struct LossValue {
    double scalar = 0.0;
    std::vector<std::pair<std::string, double>> components;
};

// Target sets are sorted ascending bitmask lists. Sum reductions over
// probability subsets are performed in value order, so losses and metrics are
// bitwise invariant under simultaneous permutation of probabilities and
// targets.

/// Sum_{b not in Y} p(b)^2. Zero exactly when the support lies inside Y.
double loss_dist(std::span<const double> probs, std::span<const Bitstring> targets);

/// log(eps + wrong mass).
double loss_logwrong(std::span<const double> probs, std::span<const Bitstring> targets,
                     double epsilon);

/// 0 if the most probable bitstring is a target, else 1. Ties break to the
/// lowest index; evaluation-only (non-differentiable).
int loss_argmax(std::span<const double> probs, std::span<const Bitstring> targets);

double loss_mse(double expectation, double target);

/// (1-alpha) * mse + alpha * logwrong.
LossValue loss_mountain(std::span<const double> probs, double expectation,
                        std::span<const Bitstring> targets, double target_value, double alpha,
                        double epsilon);

/// mse against the band centre plus an alpha penalty outside the closed band.
LossValue loss_crater(double expectation, double target_value, double lo, double hi,
                      double alpha);

Bitstring argmax_index(std::span<const double> probs);

/// Probability mass on the target set.
double metric_distribution_accuracy(std::span<const double> probs,
                                    std::span<const Bitstring> targets);

/// Argmax-correct indicator times the argmax mass.
double metric_sureness_argmax(std::span<const double> probs,
                              std::span<const Bitstring> targets);

double wrong_mass(std::span<const double> probs, std::span<const Bitstring> targets);

/// All n-bit strings of the given Hamming weight, ascending.
std::vector<Bitstring> popcount_targets(int n, int weight);

/// Chance that one uniform bitstring hits the task's target set.
double random_baseline_max_clique(int n, std::size_t target_count);
double random_baseline_clique_number(int n, int omega);

// Clique-number readout. Mountain expectations live on [0, n] and round to
// the nearest integer in [1, n] (ties up); Crater expectations live on
// [-1, 1] with bin centres 1 - 2k/n and half-width 1/n.
double crater_target(int omega, int n);
std::pair<double, double> crater_band(int omega, int n);
int mountain_class(double expectation, int n);
int crater_class(double expectation, int n);

std::uint64_t binomial(int n, int k);

} // namespace qgnn

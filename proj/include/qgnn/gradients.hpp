#pragma once

#include "qgnn/model.hpp"

#include <span>
#include <vector>

namespace qgnn {

struct GradientVector {
    std::vector<double> values; // canonical slot order
};

/// Exact derivative of the entry loss with respect to every parameter slot,
/// via one reverse-mode adjoint sweep over the gate sequence (one forward and
/// one backward pass, O(gates * 2^n)). Tied slots accumulate a contribution
/// from every gate that reads them. The argmax loss is evaluation-only and
/// the crater penalty term is piecewise constant, so it contributes zero.
GradientVector loss_gradient(const ModelConfig &config, const DatasetEntry &entry,
                             std::span<const double> theta);

/// Parameter-shift evaluation of the same derivative, restricted to Pauli
/// rotations (every Rook gate). Secondary debug path; two circuit evaluations
/// per gate occurrence.
GradientVector loss_gradient_paramshift(const ModelConfig &config, const DatasetEntry &entry,
                                        std::span<const double> theta);

struct GradStats {
    std::vector<double> mean_abs; // per slot, mean |g| over the batch
    std::vector<double> variance; // per slot, population variance over the batch
    // mean over slots of |dL/d(slot)| for the batch loss (the batch-mean
    // gradient); coincides with mean_abs averaged over slots for one entry
    double aggregate = 0.0;
};

GradStats grad_stats(std::span<const GradientVector> batch);

} // namespace qgnn

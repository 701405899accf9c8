#pragma once

#include <map>
#include <string>
#include <vector>

namespace qgnn {

enum class ShiftMode { PerSize, LinearInN, PerParity };

std::string shift_mode_name(ShiftMode mode);
ShiftMode shift_mode_from_name(const std::string &name);

struct CalPoint {
    int n = 0;
    double expectation = 0.0;
    int omega = 0;
};

// Affine correction from raw expectation (and graph size) to a clique-number
// prediction. PerSize keeps an (a, b) pair per n, with a single point pinning
// a=1 and b = omega - E. LinearInN and PerParity model the drift as an
// additive shift linear in n: omega ~ E + b0 + b1*n, fit by least squares
// (per parity class for PerParity).
struct ShiftModel {
    ShiftMode mode = ShiftMode::PerSize;
    std::map<int, std::pair<double, double>> per_size;        // n -> (a, b)
    std::map<int, std::pair<double, double>> linear;          // key 0, or parity 0/1
    std::vector<CalPoint> fit_points;
    std::vector<double> residuals; // omega - corrected, per fit point
};

/// Least-squares fit of the correction on a compositional-validation sample.
/// Underdetermined fits name the missing sizes in the error.
ShiftModel fit_shift(const std::vector<CalPoint> &points, ShiftMode mode);

/// Corrected clique-number prediction for a raw expectation at size n.
double apply_shift(const ShiftModel &shift, int n, double expectation);

void save_shift(const ShiftModel &shift, const std::string &path);
ShiftModel load_shift(const std::string &path);

} // namespace qgnn

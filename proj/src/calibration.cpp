#include "qgnn/calibration.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

using nlohmann::json;

namespace qgnn {

std::string shift_mode_name(ShiftMode mode) {
    switch (mode) {
    case ShiftMode::PerSize: return "per_size";
    case ShiftMode::LinearInN: return "linear_in_n";
    case ShiftMode::PerParity: return "per_parity";
    }
    return {};
}

ShiftMode shift_mode_from_name(const std::string &name) {
    if (name == "per_size") return ShiftMode::PerSize;
    if (name == "linear_in_n") return ShiftMode::LinearInN;
    if (name == "per_parity") return ShiftMode::PerParity;
    throw std::invalid_argument(fmt::format("unknown shift mode '{}'", name));
}

namespace {

// omega ~ a*E + b on one group of points. A single point (or degenerate
// spread in E) pins a = 1 and fits the offset alone.
std::pair<double, double> fit_affine(const std::vector<CalPoint> &points) {
    double se = 0.0, so = 0.0, see = 0.0, seo = 0.0;
    const double count = static_cast<double>(points.size());
    for (const CalPoint &pt : points) {
        se += pt.expectation;
        so += pt.omega;
        see += pt.expectation * pt.expectation;
        seo += pt.expectation * pt.omega;
    }
    const double det = count * see - se * se;
    if (points.size() < 2 || std::abs(det) < 1e-12 * (1.0 + see)) {
        return {1.0, (so - se) / count};
    }
    const double a = (count * seo - se * so) / det;
    const double b = (so * see - se * seo) / det;
    return {a, b};
}

// omega ~ E + b0 + b1*n by least squares on (b0, b1).
std::pair<double, double> fit_linear_shift(const std::vector<CalPoint> &points,
                                           const std::string &group) {
    std::set<int> sizes;
    for (const CalPoint &pt : points) {
        sizes.insert(pt.n);
    }
    if (sizes.size() < 2) {
        throw std::invalid_argument(fmt::format(
            "linear shift fit for {} needs at least 2 distinct sizes, got {}", group,
            sizes.size()));
    }
    double sn = 0.0, sy = 0.0, snn = 0.0, sny = 0.0;
    const double count = static_cast<double>(points.size());
    for (const CalPoint &pt : points) {
        const double y = static_cast<double>(pt.omega) - pt.expectation;
        sn += pt.n;
        sy += y;
        snn += static_cast<double>(pt.n) * pt.n;
        sny += pt.n * y;
    }
    const double det = count * snn - sn * sn;
    const double b1 = (count * sny - sn * sy) / det;
    const double b0 = (sy * snn - sn * sny) / det;
    return {b0, b1};
}

} // namespace

ShiftModel fit_shift(const std::vector<CalPoint> &points, ShiftMode mode) {
    if (points.empty()) {
        throw std::invalid_argument("fit_shift: no calibration points");
    }
    ShiftModel model;
    model.mode = mode;
    model.fit_points = points;

    switch (mode) {
    case ShiftMode::PerSize: {
        std::map<int, std::vector<CalPoint>> by_size;
        for (const CalPoint &pt : points) {
            by_size[pt.n].push_back(pt);
        }
        for (const auto &[n, group] : by_size) {
            model.per_size[n] = fit_affine(group);
        }
        break;
    }
    case ShiftMode::LinearInN:
        model.linear[0] = fit_linear_shift(points, "all sizes");
        break;
    case ShiftMode::PerParity: {
        std::map<int, std::vector<CalPoint>> by_parity;
        for (const CalPoint &pt : points) {
            by_parity[pt.n % 2].push_back(pt);
        }
        for (const auto &[parity, group] : by_parity) {
            model.linear[parity] =
                fit_linear_shift(group, parity == 0 ? "even sizes" : "odd sizes");
        }
        break;
    }
    }
    for (const CalPoint &pt : points) {
        model.residuals.push_back(static_cast<double>(pt.omega) -
                                  apply_shift(model, pt.n, pt.expectation));
    }
    return model;
}

double apply_shift(const ShiftModel &shift, int n, double expectation) {
    switch (shift.mode) {
    case ShiftMode::PerSize: {
        const auto it = shift.per_size.find(n);
        if (it == shift.per_size.end()) {
            throw std::invalid_argument(
                fmt::format("per-size shift has no fit for n={}", n));
        }
        return it->second.first * expectation + it->second.second;
    }
    case ShiftMode::LinearInN: {
        const auto [b0, b1] = shift.linear.at(0);
        return expectation + b0 + b1 * n;
    }
    case ShiftMode::PerParity: {
        const auto it = shift.linear.find(n % 2);
        if (it == shift.linear.end()) {
            throw std::invalid_argument(fmt::format(
                "per-parity shift has no fit for {} sizes", n % 2 == 0 ? "even" : "odd"));
        }
        const auto [b0, b1] = it->second;
        return expectation + b0 + b1 * n;
    }
    }
    throw std::logic_error("unhandled shift mode");
}

void save_shift(const ShiftModel &shift, const std::string &path) {
    json j;
    j["mode"] = shift_mode_name(shift.mode);
    j["per_size"] = json::object();
    for (const auto &[n, ab] : shift.per_size) {
        j["per_size"][fmt::format("{}", n)] = {{"a", ab.first}, {"b", ab.second}};
    }
    j["linear"] = json::object();
    for (const auto &[key, b] : shift.linear) {
        j["linear"][fmt::format("{}", key)] = {{"b0", b.first}, {"b1", b.second}};
    }
    j["fit_points"] = json::array();
    for (const CalPoint &pt : shift.fit_points) {
        j["fit_points"].push_back(
            {{"n", pt.n}, {"expectation", pt.expectation}, {"omega", pt.omega}});
    }
    j["residuals"] = shift.residuals;
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
    }
    out << j.dump(2) << '\n';
}

ShiftModel load_shift(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open '{}'", path));
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error &e) {
        throw std::runtime_error(fmt::format("{}: corrupt calibration file: {}", path, e.what()));
    }
    ShiftModel model;
    model.mode = shift_mode_from_name(j.at("mode").get<std::string>());
    for (const auto &[key, value] : j.at("per_size").items()) {
        model.per_size[std::stoi(key)] = {value.at("a").get<double>(),
                                          value.at("b").get<double>()};
    }
    for (const auto &[key, value] : j.at("linear").items()) {
        model.linear[std::stoi(key)] = {value.at("b0").get<double>(),
                                        value.at("b1").get<double>()};
    }
    for (const json &pt : j.at("fit_points")) {
        model.fit_points.push_back({pt.at("n").get<int>(), pt.at("expectation").get<double>(),
                                    pt.at("omega").get<int>()});
    }
    model.residuals = j.at("residuals").get<std::vector<double>>();
    return model;
}

} // namespace qgnn

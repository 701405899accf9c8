#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "qgnn/audit.hpp"
#include "qgnn/dataset.hpp"
#include "qgnn/gradients.hpp"
#include "qgnn/rng.hpp"

#include <cmath>

using namespace qgnn;

namespace {

struct Case {
    ModelConfig config;
    DatasetEntry entry;
    std::vector<double> theta;
};

Case random_case(LossKind loss, Rng &rng) {
    Case c{ModelConfig{}, oracles::make_entry(Graph::path(2)), {}};
    c.config.loss = loss;
    switch (loss) {
    case LossKind::Dist:
    case LossKind::LogWrong:
        c.config.observable = ObservableKind::Bitstring;
        break;
    case LossKind::Mse:
    case LossKind::Mountain:
        c.config.observable = ObservableKind::Mountain;
        break;
    default:
        c.config.observable = ObservableKind::Crater;
    }
    c.config.alpha = rng.uniform_double();
    c.config.epsilon = 1e-10;
    const bool rook = rng.uniform_double() < 0.5;
    c.config.ansatz.family = rook ? AnsatzFamily::Rook : AnsatzFamily::MilleFeuille;
    c.config.ansatz.layers = 1 + static_cast<int>(rng.uniform_int(2));
    c.config.ansatz.inner_layers = rook ? 0 : 1 + static_cast<int>(rng.uniform_int(2));
    c.config.ansatz.include_initial_state = rng.uniform_double() < 0.8;

    const int n = 2 + static_cast<int>(rng.uniform_int(4));
    c.entry = oracles::make_entry(sample_er(n, 0.2 + 0.6 * rng.uniform_double(), rng.next()));
    c.theta.resize(static_cast<std::size_t>(param_count(c.config.ansatz)));
    for (double &v : c.theta) {
        v = rng.uniform_real(-1.5, 1.5);
    }
    return c;
}

// max relative error with an absolute fallback near zeros
double grad_error(std::span<const double> got, std::span<const double> want) {
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double scale = std::max(std::abs(want[i]), 1e-7 / 1e-4);
        worst = std::max(worst, std::abs(got[i] - want[i]) / scale);
    }
    return worst;
}

} // namespace

TEST_CASE("adjoint gradients match central finite differences") {
    Rng rng(70);
    for (const LossKind loss : {LossKind::Dist, LossKind::LogWrong, LossKind::Mse,
                                LossKind::Mountain, LossKind::Crater}) {
        for (int trial = 0; trial < 100; ++trial) {
            const Case c = random_case(loss, rng);
            const GradientVector grad = loss_gradient(c.config, c.entry, c.theta);
            const std::vector<double> fd = oracles::fd_gradient(c.config, c.entry, c.theta);
            REQUIRE(grad.values.size() == fd.size());
            CHECK(grad_error(grad.values, fd) < 1e-4);
        }
    }
}

TEST_CASE("parameter-shift debug path agrees with the adjoint sweep") {
    Rng rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        Case c = random_case(LossKind::LogWrong, rng);
        c.config.ansatz.family = AnsatzFamily::Rook; // Pauli rotations only
        c.config.ansatz.inner_layers = 0;
        c.theta.resize(static_cast<std::size_t>(param_count(c.config.ansatz)));
        Rng fill(rng.next());
        for (double &v : c.theta) {
            v = fill.uniform_real(-1.5, 1.5);
        }
        const GradientVector adjoint = loss_gradient(c.config, c.entry, c.theta);
        const GradientVector shifted = loss_gradient_paramshift(c.config, c.entry, c.theta);
        for (std::size_t i = 0; i < adjoint.values.size(); ++i) {
            CHECK(adjoint.values[i] == doctest::Approx(shifted.values[i]).epsilon(1e-9));
        }
    }
    // CRX gates are outside the shift rule used here
    ModelConfig mf;
    mf.ansatz = {AnsatzFamily::MilleFeuille, 1, 1, true};
    const DatasetEntry entry = oracles::make_entry(Graph::path(3));
    std::vector<double> theta(static_cast<std::size_t>(param_count(mf.ansatz)), 0.1);
    CHECK_THROWS(loss_gradient_paramshift(mf, entry, theta));
}

TEST_CASE("argmax loss has no gradient") {
    ModelConfig config;
    config.loss = LossKind::Argmax;
    const DatasetEntry entry = oracles::make_entry(Graph::complete(2));
    std::vector<double> theta(static_cast<std::size_t>(param_count(config.ansatz)), 0.1);
    CHECK_THROWS_WITH_AS(loss_gradient(config, entry, theta),
                         doctest::Contains("evaluation-only"), std::invalid_argument);
}

TEST_CASE("the dist-loss global plateau has zero gradient") {
    // all mass on the unique maximum clique of K2: RX(pi) on both qubits
    ModelConfig config;
    config.loss = LossKind::Dist;
    config.ansatz = {AnsatzFamily::Rook, 1, 0, true};
    const DatasetEntry entry = oracles::make_entry(Graph::complete(2));
    std::vector<double> theta(static_cast<std::size_t>(param_count(config.ansatz)), 0.0);
    theta[0] = M_PI; // initial state RX(pi) RZ(0) RX(0) |0> = |1> up to phase
    CHECK(entry_loss(config, entry, theta).scalar == doctest::Approx(0.0).epsilon(1e-12));
    for (const double g : loss_gradient(config, entry, theta).values) {
        CHECK(std::abs(g) < 1e-10);
    }
}

TEST_CASE("one-parameter circuit reproduces the closed-form sinusoid") {
    // single vertex, node layer only: p(1) = sin^2(a/2), observable = weight
    ModelConfig config;
    config.loss = LossKind::Mse;
    config.observable = ObservableKind::Mountain;
    config.ansatz = {AnsatzFamily::Rook, 1, 0, false};
    const DatasetEntry entry = oracles::make_entry(Graph(1, {}));
    const double y = static_cast<double>(entry.omega); // 1
    for (const double a : {0.3, 1.1, 2.0, -0.7}) {
        // the tied layout is graph-independent: 7 slots even with no pairs
        std::vector<double> theta(static_cast<std::size_t>(param_count(config.ansatz)), 0.0);
        theta[0] = a;
        const double s = std::sin(a / 2.0);
        CHECK(entry_loss(config, entry, theta).scalar ==
              doctest::Approx((s * s - y) * (s * s - y)).epsilon(1e-12));
        const GradientVector grad = loss_gradient(config, entry, theta);
        const double expected = 2.0 * (s * s - y) * 0.5 * std::sin(a);
        CHECK(grad.values[0] == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("rook gradients are invariant under graph relabelling") {
    Rng rng(72);
    ModelConfig config;
    config.loss = LossKind::LogWrong;
    config.ansatz = {AnsatzFamily::Rook, 2, 0, true};
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_int(3));
        const DatasetEntry entry =
            oracles::make_entry(sample_er(n, 0.5, rng.next()));
        std::vector<double> theta(static_cast<std::size_t>(param_count(config.ansatz)));
        for (double &v : theta) {
            v = rng.uniform_real(-1.0, 1.0);
        }
        const Permutation sigma = random_permutation(n, rng);
        const GradientVector base = loss_gradient(config, entry, theta);
        const GradientVector moved = loss_gradient(config, permute_entry(entry, sigma), theta);
        for (std::size_t i = 0; i < base.values.size(); ++i) {
            CHECK(std::abs(base.values[i] - moved.values[i]) < 1e-9);
        }
    }
}

TEST_CASE("gradients are linear in the loss mix") {
    // the mountain loss gradient is the alpha-blend of its two terms
    Rng rng(73);
    for (int trial = 0; trial < 20; ++trial) {
        const DatasetEntry entry =
            oracles::make_entry(sample_er(4, 0.5, rng.next()));
        ModelConfig mountain;
        mountain.loss = LossKind::Mountain;
        mountain.observable = ObservableKind::Mountain;
        mountain.alpha = rng.uniform_double();
        mountain.ansatz = {AnsatzFamily::Rook, 1, 0, true};
        ModelConfig mse = mountain;
        mse.loss = LossKind::Mse;
        ModelConfig logwrong = mountain;
        logwrong.loss = LossKind::LogWrong;

        std::vector<double> theta(static_cast<std::size_t>(param_count(mountain.ansatz)));
        for (double &v : theta) {
            v = rng.uniform_real(-1.0, 1.0);
        }
        const GradientVector full = loss_gradient(mountain, entry, theta);
        const GradientVector part_mse = loss_gradient(mse, entry, theta);
        const GradientVector part_log = loss_gradient(logwrong, entry, theta);
        for (std::size_t i = 0; i < full.values.size(); ++i) {
            const double blended = (1.0 - mountain.alpha) * part_mse.values[i] +
                                   mountain.alpha * part_log.values[i];
            CHECK(std::abs(full.values[i] - blended) < 1e-10);
        }
    }
}

TEST_CASE("grad_stats") {
    GradientVector a{{1.0, -1.0, 0.5}};
    GradientVector b{{1.0, -1.0, 0.5}};
    SUBCASE("identical gradients have zero variance") {
        const GradStats stats = grad_stats(std::vector<GradientVector>{a, b});
        for (const double v : stats.variance) {
            CHECK(v == 0.0);
        }
        CHECK(stats.aggregate == doctest::Approx((1.0 + 1.0 + 0.5) / 3.0));
    }
    SUBCASE("a batch of one reproduces the gradient") {
        const GradStats stats = grad_stats(std::vector<GradientVector>{a});
        CHECK(stats.mean_abs == std::vector<double>{1.0, 1.0, 0.5});
    }
    SUBCASE("synthetic +-1 coordinates") {
        GradientVector plus{{1.0, 1.0}};
        GradientVector minus{{-1.0, -1.0}};
        const GradStats stats = grad_stats(std::vector<GradientVector>{plus, minus});
        CHECK(stats.mean_abs == std::vector<double>{1.0, 1.0});
        CHECK(stats.variance == std::vector<double>{1.0, 1.0});
        // opposite entries cancel in the batch loss derivative
        CHECK(stats.aggregate == 0.0);
    }
    SUBCASE("empty and ragged batches are rejected") {
        CHECK_THROWS(grad_stats(std::vector<GradientVector>{}));
        GradientVector short_vec{{1.0}};
        CHECK_THROWS(grad_stats(std::vector<GradientVector>{a, short_vec}));
    }
}

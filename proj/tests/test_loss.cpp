#include <doctest.h>

#include <cmath>
#include <random>

#include "leafvein/loss.hpp"
#include "oracles.hpp"

using namespace leafvein;

namespace {

ProbGrid grid_of(int w, int h, double v) {
    ProbGrid g(w, h);
    for (double& x : g.values) x = v;
    return g;
}

}  // namespace

TEST_CASE("dice_loss spot values") {
    RasterMask gt(4, 4);
    gt.set(0, 0);
    gt.set(1, 0);
    gt.set(0, 1);
    gt.set(1, 1);

    ProbGrid exact(4, 4);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x) exact.values[y * 4 + x] = 1.0;
    CHECK(dice_loss(exact, gt) == doctest::Approx(0.0).epsilon(1e-12));

    // all-zero prediction against 4 positives: 1 - 1/5
    CHECK(dice_loss(grid_of(4, 4, 0.0), gt) == doctest::Approx(0.8));

    RasterMask empty(4, 4);
    CHECK(dice_loss(grid_of(4, 4, 0.0), empty) == doctest::Approx(0.0));
}

TEST_CASE("dice_loss validates inputs") {
    RasterMask gt(4, 4);
    CHECK_THROWS_AS(dice_loss(grid_of(3, 4, 0.0), gt), DimensionMismatchError);
    ProbGrid bad(4, 4);
    bad.values[3] = 1.5;
    CHECK_THROWS_AS(dice_loss(bad, gt), Error);
}

TEST_CASE("dice_loss stays in [0, 1) and gradient matches finite differences") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        RasterMask gt(8, 8);
        ProbGrid pred(8, 8);
        for (int i = 0; i < 64; ++i) {
            if (rng() % 3 == 0) gt.bits[i] = 1;
            pred.values[i] = oracles::uniform(rng, 0.05, 0.95);
        }
        double loss = dice_loss(pred, gt);
        CHECK(loss >= 0.0);
        CHECK(loss < 1.0);

        GradientTarget target{
            [&](const std::vector<double>& v) {
                ProbGrid p(8, 8);
                p.values = v;
                return dice_loss(p, gt);
            },
            [&](const std::vector<double>& v) {
                ProbGrid p(8, 8);
                p.values = v;
                return dice_loss_gradient(p, gt);
            }};
        CHECK(check_gradient(target, pred.values, 1e-5) < 1e-5);
    }
}

TEST_CASE("nl_loss spot values and symmetry") {
    CHECK(nl_loss(7.3, 7.3) == doctest::Approx(0.0));
    CHECK(nl_loss(2.0, 1.0) == doctest::Approx(std::log(2.0)));
    CHECK(nl_loss(1.0, 2.0) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(nl_loss(0.0, 1.0), Error);
    CHECK_THROWS_AS(nl_loss(1.0, -2.0), Error);
}

TEST_CASE("nl_loss is scale invariant") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        double a = oracles::uniform(rng, 0.1, 50.0);
        double b = oracles::uniform(rng, 0.1, 50.0);
        double k = oracles::uniform(rng, 0.01, 100.0);
        CHECK(nl_loss(k * a, k * b) == doctest::Approx(nl_loss(a, b)).epsilon(1e-9));
    }
}

TEST_CASE("nl_loss gradient matches finite differences away from the kink") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        double a = oracles::uniform(rng, 0.5, 40.0);
        double b = oracles::uniform(rng, 0.5, 40.0);
        if (std::abs(a - b) < 0.05) continue;
        GradientTarget target{
            [](const std::vector<double>& v) { return nl_loss(v[0], v[1]); },
            [](const std::vector<double>& v) {
                auto [da, db] = nl_loss_gradient(v[0], v[1]);
                return std::vector<double>{da, db};
            }};
        CHECK(check_gradient(target, {a, b}, 1e-5) < 1e-6);
    }
}

TEST_CASE("incentive_coeff spot values") {
    CHECK(incentive_coeff(640.0, 640.0, 1.0) == doctest::Approx(0.0));
    CHECK(incentive_coeff(0.0, 640.0, 1.0) == doctest::Approx(std::tanh(1.0)));
    CHECK(incentive_coeff(320.0, 640.0, 1.0) == doctest::Approx(std::tanh(0.5)));
    // clamped above l_s
    CHECK(incentive_coeff(700.0, 640.0, 1.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(incentive_coeff(1.0, 0.0, 1.0), Error);
}

TEST_CASE("incentive_coeff is strictly decreasing in l_gt and bounded") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 200; ++trial) {
        double rho = oracles::uniform(rng, 0.2, 3.0);
        double a = oracles::uniform(rng, 0.0, 639.0);
        double b = a + oracles::uniform(rng, 0.1, 640.0 - a);
        double la = incentive_coeff(a, 640.0, rho);
        double lb = incentive_coeff(b, 640.0, rho);
        CHECK(la > lb);
        CHECK(la >= 0.0);
        CHECK(la < 1.0);
    }
}

TEST_CASE("incentive_coeff gradient: closed form at l_gt = l_s") {
    // d/dl_gt tanh(rho (1 - l/l_s)) at l = l_s is -rho / l_s
    double g = incentive_coeff_gradient(640.0 - 1e-9, 640.0, 1.0);
    CHECK(g == doctest::Approx(-1.0 / 640.0).epsilon(1e-6));

    GradientTarget target{
        [](const std::vector<double>& v) { return incentive_coeff(v[0], 640.0, 1.3); },
        [](const std::vector<double>& v) {
            return std::vector<double>{incentive_coeff_gradient(v[0], 640.0, 1.3)};
        }};
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 100; ++trial) {
        double l = oracles::uniform(rng, 1.0, 600.0);
        CHECK(check_gradient(target, {l}, 1e-5) < 1e-6);
    }
}

TEST_CASE("global_incentive_loss composes lambda and nl") {
    std::vector<std::vector<LengthSample>> one = {{{2.0, 1.0, true}}};
    double expect = std::tanh(1.0 - 1.0 / 640.0) * std::log(2.0);
    CHECK(global_incentive_loss(one, 640.0, 1.0) == doctest::Approx(expect).epsilon(1e-9));

    // all equal lengths: zero
    std::vector<std::vector<LengthSample>> equal = {{{5.0, 5.0, true}, {3.0, 3.0, true}}};
    CHECK(global_incentive_loss(equal, 640.0, 1.0) == doctest::Approx(0.0));

    CHECK_THROWS_AS(global_incentive_loss({}, 640.0, 1.0), Error);
}

TEST_CASE("global_incentive_loss is invariant to duplicating all rows") {
    std::mt19937_64 rng(46);
    std::vector<std::vector<LengthSample>> grid(3);
    for (auto& row : grid) {
        for (int m = 0; m < 4; ++m) {
            row.push_back({oracles::uniform(rng, 1, 60), oracles::uniform(rng, 1, 60), true});
        }
    }
    double v1 = global_incentive_loss(grid, 640.0, 1.0);
    std::vector<std::vector<LengthSample>> doubled = grid;
    doubled.insert(doubled.end(), grid.begin(), grid.end());
    CHECK(global_incentive_loss(doubled, 640.0, 1.0) == doctest::Approx(v1).epsilon(1e-12));
}

TEST_CASE("global_incentive_loss is permutation invariant") {
    std::mt19937_64 rng(47);
    std::vector<std::vector<LengthSample>> grid(4);
    for (auto& row : grid) {
        for (int m = 0; m < 3; ++m) {
            row.push_back({oracles::uniform(rng, 1, 60), oracles::uniform(rng, 1, 60), true});
        }
    }
    double v1 = global_incentive_loss(grid, 640.0, 1.0);
    std::swap(grid[0], grid[3]);
    std::swap(grid[1][0], grid[1][2]);
    CHECK(global_incentive_loss(grid, 640.0, 1.0) == doctest::Approx(v1).epsilon(1e-12));
}

TEST_CASE("global_incentive_loss gradient matches finite differences") {
    std::mt19937_64 rng(48);
    std::vector<std::vector<LengthSample>> grid(2);
    for (auto& row : grid) {
        for (int m = 0; m < 3; ++m) {
            double gt = oracles::uniform(rng, 5, 60);
            row.push_back({gt + oracles::uniform(rng, 0.5, 10), gt, true});
        }
    }
    GradientTarget target{
        [&](const std::vector<double>& v) {
            auto g = grid;
            std::size_t k = 0;
            for (auto& row : g)
                for (auto& s : row) s.l_pre = v[k++];
            return global_incentive_loss(g, 640.0, 1.0);
        },
        [&](const std::vector<double>& v) {
            auto g = grid;
            std::size_t k = 0;
            for (auto& row : g)
                for (auto& s : row) s.l_pre = v[k++];
            auto gg = global_incentive_loss_gradient(g, 640.0, 1.0);
            std::vector<double> flat;
            for (auto& row : gg) flat.insert(flat.end(), row.begin(), row.end());
            return flat;
        }};
    std::vector<double> point;
    for (auto& row : grid)
        for (auto& s : row) point.push_back(s.l_pre);
    CHECK(check_gradient(target, point, 1e-5) < 1e-6);
}

TEST_CASE("total_loss weights the two headers") {
    LossBreakdown b = total_loss(0.5, 0.4, 1.0, 0.25);
    CHECK(b.total == doctest::Approx(0.6));
    CHECK(total_loss(0.0, 0.0).total == doctest::Approx(0.0));

    std::mt19937_64 rng(49);
    for (int trial = 0; trial < 50; ++trial) {
        double x = oracles::uniform(rng, 0.0, 10.0);
        double alpha = oracles::uniform(rng, 0.1, 2.0);
        double beta = oracles::uniform(rng, 0.1, 2.0);
        CHECK(total_loss(x, 0.0, alpha, beta).total == doctest::Approx(alpha * x));
    }
    CHECK_THROWS_AS(total_loss(-0.1, 0.0), Error);
}

TEST_CASE("check_gradient flags a wrong-sign gradient") {
    GradientTarget broken{
        [](const std::vector<double>& v) { return v[0] * v[0]; },
        [](const std::vector<double>& v) { return std::vector<double>{-2.0 * v[0]}; }};
    CHECK(check_gradient(broken, {1.5}, 1e-5) > 0.5);
    CHECK_THROWS_AS(check_gradient(broken, {1.5}, 0.0), Error);
}

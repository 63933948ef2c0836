#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "leafvein/geometry.hpp"

namespace leafvein {

/// Probability grid in [0, 1], row-major, same layout as RasterMask.
struct ProbGrid {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ProbGrid() = default;
    ProbGrid(int w, int h) : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0) {}
};

/// One supervised length sample: predicted and ground-truth vein length.
struct LengthSample {
    double l_pre = 0.0;
    double l_gt = 0.0;
    bool supervised = true;
};

/// Per-header losses and their weighted total. per_sample carries the
/// (incentive coefficient, log-ratio loss) pair of every supervised length
/// sample when the breakdown comes from a full evaluation.
struct LossBreakdown {
    double l_mv = 0.0;
    double l_lv_tv = 0.0;
    double total = 0.0;
    std::vector<std::pair<double, double>> per_sample;
};

/// Soft Dice loss with epsilon 1: 1 - (2 * sum(p * g) + 1) / (sum(p) + |g| + 1).
double dice_loss(const ProbGrid& pred, const RasterMask& gt);

/// Gradient of dice_loss with respect to every prediction value.
std::vector<double> dice_loss_gradient(const ProbGrid& pred, const RasterMask& gt);

/// Negative log of the length ratio: -ln(min / max). Symmetric, zero iff the
/// lengths are equal, scale-invariant.
double nl_loss(double l_pre, double l_gt);

/// (d/dl_pre, d/dl_gt) of nl_loss. Zero at the (non-differentiable) equal
/// point.
std::pair<double, double> nl_loss_gradient(double l_pre, double l_gt);

/// Incentive coefficient tanh(rho * (1 - l_gt / l_s)). l_gt above l_s is
/// clamped to l_s, so the result stays in [0, 1).
double incentive_coeff(double l_gt, double l_s, double rho);

/// d/dl_gt of incentive_coeff (0 in the clamped region).
double incentive_coeff_gradient(double l_gt, double l_s, double rho);

/// Mean of lambda * nl over a T x M sample grid; unsupervised entries
/// contribute zero but still count toward the T * M normalization.
double global_incentive_loss(const std::vector<std::vector<LengthSample>>& samples, double l_s,
                             double rho);

/// Same value plus the flattened (lambda, nl) pairs of supervised entries.
double global_incentive_loss(const std::vector<std::vector<LengthSample>>& samples, double l_s,
                             double rho, std::vector<std::pair<double, double>>* per_sample);

/// Gradient of global_incentive_loss with respect to every l_pre, in the
/// grid's shape. Unsupervised entries get zero.
std::vector<std::vector<double>> global_incentive_loss_gradient(
    const std::vector<std::vector<LengthSample>>& samples, double l_s, double rho);

/// total = alpha * l_mv + beta * l_lv_tv.
LossBreakdown total_loss(double l_mv, double l_lv_tv, double alpha = 1.0, double beta = 0.25);

/// A scalar function together with its analytic gradient, for checking.
struct GradientTarget {
    std::function<double(const std::vector<double>&)> value;
    std::function<std::vector<double>(const std::vector<double>&)> gradient;
};

/// Central finite differences against the analytic gradient; returns the
/// maximum relative error over all coordinates.
double check_gradient(const GradientTarget& target, const std::vector<double>& point, double step);

}  // namespace leafvein

#include "leafvein/loss.hpp"

#include <algorithm>
#include <cmath>

namespace leafvein {

namespace {

void check_dims(const ProbGrid& pred, const RasterMask& gt) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw DimensionMismatchError("prediction grid is " + std::to_string(pred.width) + "x" +
                                     std::to_string(pred.height) + " but ground truth is " +
                                     std::to_string(gt.width) + "x" + std::to_string(gt.height));
    }
    for (double v : pred.values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error("prediction value " + std::to_string(v) + " outside [0, 1]");
        }
    }
}

void check_lengths(double l_pre, double l_gt) {
    if (!(l_pre > 0.0) || !(l_gt > 0.0)) {
        throw Error("lengths must be strictly positive, got l_pre = " + std::to_string(l_pre) +
                    ", l_gt = " + std::to_string(l_gt));
    }
}

constexpr double kEps = 1.0;

}  // namespace

double dice_loss(const ProbGrid& pred, const RasterMask& gt) {
    check_dims(pred, gt);
    double inter = 0.0, sum_p = 0.0, sum_g = 0.0;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        double g = gt.bits[i] ? 1.0 : 0.0;
        inter += pred.values[i] * g;
        sum_p += pred.values[i];
        sum_g += g;
    }
    return 1.0 - (2.0 * inter + kEps) / (sum_p + sum_g + kEps);
}

std::vector<double> dice_loss_gradient(const ProbGrid& pred, const RasterMask& gt) {
    check_dims(pred, gt);
    double inter = 0.0, sum_p = 0.0, sum_g = 0.0;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        double g = gt.bits[i] ? 1.0 : 0.0;
        inter += pred.values[i] * g;
        sum_p += pred.values[i];
        sum_g += g;
    }
    double denom = sum_p + sum_g + kEps;
    double num = 2.0 * inter + kEps;
    std::vector<double> grad(pred.values.size());
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
        double g = gt.bits[i] ? 1.0 : 0.0;
        grad[i] = -(2.0 * g * denom - num) / (denom * denom);
    }
    return grad;
}

double nl_loss(double l_pre, double l_gt) {
    check_lengths(l_pre, l_gt);
    return -std::log(std::min(l_pre, l_gt) / std::max(l_pre, l_gt));
}

std::pair<double, double> nl_loss_gradient(double l_pre, double l_gt) {
    check_lengths(l_pre, l_gt);
    if (l_pre > l_gt) return {1.0 / l_pre, -1.0 / l_gt};
    if (l_pre < l_gt) return {-1.0 / l_pre, 1.0 / l_gt};
    return {0.0, 0.0};
}

double incentive_coeff(double l_gt, double l_s, double rho) {
    if (!(l_s > 0.0)) throw Error("l_s must be > 0, got " + std::to_string(l_s));
    if (!(rho > 0.0)) throw Error("rho must be > 0, got " + std::to_string(rho));
    if (l_gt < 0.0) throw Error("l_gt must be >= 0, got " + std::to_string(l_gt));
    double clamped = std::min(l_gt, l_s);
    return std::tanh(rho * (1.0 - clamped / l_s));
}

double incentive_coeff_gradient(double l_gt, double l_s, double rho) {
    if (!(l_s > 0.0)) throw Error("l_s must be > 0");
    if (l_gt >= l_s) return 0.0;  // clamp region boundary
    double t = std::tanh(rho * (1.0 - l_gt / l_s));
    return -(rho / l_s) * (1.0 - t * t);
}

double global_incentive_loss(const std::vector<std::vector<LengthSample>>& samples, double l_s,
                             double rho) {
    return global_incentive_loss(samples, l_s, rho, nullptr);
}

double global_incentive_loss(const std::vector<std::vector<LengthSample>>& samples, double l_s,
                             double rho, std::vector<std::pair<double, double>>* per_sample) {
    if (samples.empty() || samples[0].empty()) {
        throw Error("global incentive loss needs a non-empty sample grid");
    }
    const std::size_t t_count = samples.size();
    const std::size_t m_count = samples[0].size();
    double sum = 0.0;
    for (const auto& row : samples) {
        if (row.size() != m_count) throw Error("ragged sample grid");
        for (const LengthSample& s : row) {
            if (!s.supervised) continue;
            double lam = incentive_coeff(s.l_gt, l_s, rho);
            double nl = nl_loss(s.l_pre, s.l_gt);
            if (per_sample != nullptr) per_sample->emplace_back(lam, nl);
            sum += lam * nl;
        }
    }
    return sum / (static_cast<double>(t_count) * static_cast<double>(m_count));
}

std::vector<std::vector<double>> global_incentive_loss_gradient(
    const std::vector<std::vector<LengthSample>>& samples, double l_s, double rho) {
    if (samples.empty() || samples[0].empty()) {
        throw Error("global incentive loss needs a non-empty sample grid");
    }
    const double scale =
        1.0 / (static_cast<double>(samples.size()) * static_cast<double>(samples[0].size()));
    std::vector<std::vector<double>> grad(samples.size());
    for (std::size_t t = 0; t < samples.size(); ++t) {
        grad[t].assign(samples[t].size(), 0.0);
        for (std::size_t m = 0; m < samples[t].size(); ++m) {
            const LengthSample& s = samples[t][m];
            if (!s.supervised) continue;
            double lam = incentive_coeff(s.l_gt, l_s, rho);
            grad[t][m] = scale * lam * nl_loss_gradient(s.l_pre, s.l_gt).first;
        }
    }
    return grad;
}

LossBreakdown total_loss(double l_mv, double l_lv_tv, double alpha, double beta) {
    if (l_mv < 0.0 || l_lv_tv < 0.0) {
        throw Error("loss components must be non-negative");
    }
    LossBreakdown out;
    out.l_mv = l_mv;
    out.l_lv_tv = l_lv_tv;
    out.total = alpha * l_mv + beta * l_lv_tv;
    return out;
}

double check_gradient(const GradientTarget& target, const std::vector<double>& point,
                      double step) {
    if (!(step > 0.0)) throw Error("finite-difference step must be > 0");
    std::vector<double> analytic = target.gradient(point);
    if (analytic.size() != point.size()) throw Error("gradient size does not match point size");
    double worst = 0.0;
    std::vector<double> probe = point;
    for (std::size_t i = 0; i < point.size(); ++i) {
        probe[i] = point[i] + step;
        double hi = target.value(probe);
        probe[i] = point[i] - step;
        double lo = target.value(probe);
        probe[i] = point[i];
        double fd = (hi - lo) / (2.0 * step);
        if (!std::isfinite(fd) || !std::isfinite(analytic[i])) {
            throw Error("non-finite value in gradient check");
        }
        double rel = std::abs(fd - analytic[i]) / std::max(std::abs(fd) + std::abs(analytic[i]), 1e-8);
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace leafvein

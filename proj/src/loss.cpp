#include "myo/loss.hpp"

#include "myo/errors.hpp"

namespace myo {

void LossWeights::validate() const {
    if (!(mse >= 0.0) || !(cc >= 0.0)) throw ConfigError("loss weights must be non-negative");
}

double loss_mse(const Matrix& n, const Matrix& m) {
    require_same_shape(n, m, "loss_mse");
    if (n.empty()) throw ShapeError("loss_mse: empty matrices");
    double s = 0.0;
    const auto a = n.flat(), b = m.flat();
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

double loss_cc(const Matrix& n, const Matrix& m) {
    require_same_shape(n, m, "loss_cc");
    if (n.empty()) throw ShapeError("loss_cc: empty matrices");
    double s = 0.0;
    const auto a = n.flat(), b = m.flat();
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return -s / static_cast<double>(a.size());
}

LossBreakdown combine(double mse, double cc, const LossWeights& w) {
    w.validate();
    return {mse, cc, w.mse * mse + w.cc * cc};
}

LossBreakdown loss_combined(const Matrix& n, const Matrix& m, const LossWeights& w) {
    return combine(loss_mse(n, m), loss_cc(n, m), w);
}

Matrix loss_combined_gradient(const Matrix& n, const Matrix& m, const LossWeights& w) {
    require_same_shape(n, m, "loss_combined_gradient");
    w.validate();
    Matrix g(n.rows(), n.cols());
    const double inv = 1.0 / static_cast<double>(n.size());
    const auto a = n.flat(), b = m.flat();
    auto out = g.flat();
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = inv * (2.0 * w.mse * (a[i] - b[i]) - w.cc * b[i]);
    }
    return g;
}

}  // namespace myo

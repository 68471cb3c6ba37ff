#include "myo/optim.hpp"

#include <cmath>

#include "myo/errors.hpp"

namespace myo {

AdamW::AdamW(std::size_t n, AdamWParams params) : p_(params), m_(n, 0.0), v_(n, 0.0) {
    if (!(p_.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(p_.weight_decay >= 0.0)) throw ConfigError("weight decay must be non-negative");
}

void AdamW::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw ShapeError("AdamW: parameter/gradient size mismatch");
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(p_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(p_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        m_[i] = p_.beta1 * m_[i] + (1.0 - p_.beta1) * g;
        v_[i] = p_.beta2 * v_[i] + (1.0 - p_.beta2) * g * g;
        const double m_hat = m_[i] / bc1;
        const double v_hat = v_[i] / bc2;
        params[i] -= p_.learning_rate * (m_hat / (std::sqrt(v_hat) + p_.epsilon) + p_.weight_decay * params[i]);
    }
}

double clip_by_global_norm(std::span<double> grad, double clipnorm) {
    if (!(clipnorm > 0.0)) throw ConfigError("clipnorm must be positive");
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (!(norm > clipnorm)) return 1.0;
    const double scale = clipnorm / norm;
    for (double& g : grad) g *= scale;
    return scale;
}

bool EarlyStopping::observe(double loss) {
    if (loss < best_ - min_delta_) {
        best_ = loss;
        wait_ = 0;
    } else {
        ++wait_;
    }
    return wait_ >= patience_;
}

}  // namespace myo

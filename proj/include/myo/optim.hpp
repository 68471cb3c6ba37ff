#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace myo {

struct AdamWParams {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
    double weight_decay = 1e-2;
};

/// Adam with decoupled weight decay:
///   p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + wd * p)
class AdamW {
public:
    AdamW(std::size_t n, AdamWParams params);
    void step(std::span<double> params, std::span<const double> grads);
    long steps() const { return t_; }

private:
    AdamWParams p_;
    std::vector<double> m_, v_;
    long t_ = 0;
};

/// Rescales `grad` in place so its Euclidean norm is at most `clipnorm`.
/// Returns the factor applied (1 when no clipping happened).
double clip_by_global_norm(std::span<double> grad, double clipnorm);

/// Patience counter against the running best. `observe` returns true once
/// `patience` consecutive observations failed to beat the reference by at
/// least `min_delta`.
class EarlyStopping {
public:
    EarlyStopping(int patience, double min_delta) : patience_(patience), min_delta_(min_delta) {}
    bool observe(double loss);
    double reference() const { return best_; }
    int wait() const { return wait_; }

private:
    int patience_;
    double min_delta_;
    double best_ = std::numeric_limits<double>::infinity();
    int wait_ = 0;
};

}  // namespace myo

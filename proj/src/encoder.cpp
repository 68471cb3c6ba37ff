#include "myo/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "myo/errors.hpp"
#include "myo/rng.hpp"

namespace myo {

std::string to_string(Activation a) {
    return a == Activation::relu ? "relu" : "leaky_relu";
}

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "leaky_relu") return Activation::leaky_relu;
    throw ConfigError("unknown activation '" + name + "'");
}

std::vector<int> EncoderConfig::hidden_widths() const {
    validate();
    std::vector<int> w;
    int width = 1 << (n_blocks + 2);
    for (int b = 0; b < n_blocks; ++b) {
        w.push_back(width);
        width /= 2;
    }
    return w;
}

void EncoderConfig::validate() const {
    if (n_blocks < 1 || n_blocks > 3) throw ConfigError("n_blocks must be in [1, 3]");
    if (n_params < 1) throw ConfigError("n_params must be at least 1");
    if (!(leaky_slope >= 0.0)) throw ConfigError("leaky_slope must be non-negative");
}

void EncoderState::build_layout() {
    cfg_.validate();
    if (input_size_ == 0) throw ShapeError("encoder input size must be positive");
    dense_.clear();
    norms_.clear();
    std::size_t offset = 0;
    std::size_t in = input_size_;
    for (int w : cfg_.hidden_widths()) {
        const auto width = static_cast<std::size_t>(w);
        dense_.push_back({in, width, offset, offset + in * width});
        offset += in * width + width;
        norms_.push_back({width, offset, offset + width});
        offset += 2 * width;
        in = width;
    }
    const auto q = static_cast<std::size_t>(cfg_.n_params);
    dense_.push_back({in, q, offset, offset + in * q});
    offset += in * q + q;
    theta_.assign(offset, 0.0);
}

EncoderState::EncoderState(const EncoderConfig& cfg, std::size_t input_size, std::uint64_t init_seed)
    : cfg_(cfg), input_size_(input_size) {
    build_layout();
    RngStream rng = derive_stream(init_seed, static_cast<std::uint64_t>(cfg.n_blocks), "encoder-init");
    for (const auto& d : dense_) {
        const double limit = 1.0 / std::sqrt(static_cast<double>(d.in));
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (std::size_t i = 0; i < d.in * d.out; ++i) theta_[d.weights + i] = dist(rng);
    }
    for (const auto& n : norms_) {
        for (std::size_t i = 0; i < n.width; ++i) theta_[n.gain + i] = 1.0;
    }
}

EncoderState::EncoderState(const EncoderConfig& cfg, std::size_t input_size, std::vector<double> params)
    : cfg_(cfg), input_size_(input_size) {
    build_layout();
    if (params.size() != theta_.size()) {
        throw ShapeError("stored encoder parameters do not match the architecture");
    }
    theta_ = std::move(params);
}

namespace {

void dense_forward(const EncoderState::Dense& d, std::span<const double> theta,
                   std::span<const double> x, std::vector<double>& y) {
    y.assign(d.out, 0.0);
    for (std::size_t o = 0; o < d.out; ++o) {
        const double* w = theta.data() + d.weights + o * d.in;
        double s = theta[d.bias + o];
        for (std::size_t i = 0; i < d.in; ++i) s += w[i] * x[i];
        y[o] = s;
    }
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

void EncoderState::align_output(std::span<const double> input, std::span<const double> target) {
    if (target.size() != static_cast<std::size_t>(cfg_.n_params)) throw ShapeError("target has the wrong size");
    const std::vector<double> u = forward(input);
    const Dense& last = dense_.back();
    auto logit = [](double p) {
        p = std::clamp(p, 1e-3, 1.0 - 1e-3);
        return std::log(p / (1.0 - p));
    };
    for (std::size_t k = 0; k < u.size(); ++k) theta_[last.bias + k] += logit(target[k]) - logit(u[k]);
}

std::vector<double> EncoderState::forward(std::span<const double> input) const {
    Tape tape;
    return forward(input, tape);
}

std::vector<double> EncoderState::forward(std::span<const double> input, Tape& tape) const {
    if (input.size() != input_size_) throw ShapeError("encoder input has the wrong size");
    const std::size_t blocks = norms_.size();
    tape.pre.assign(blocks, {});
    tape.xhat.assign(blocks, {});
    tape.inv_std.assign(blocks, 0.0);
    tape.out.assign(blocks, {});

    std::span<const double> x = input;
    const double slope = cfg_.activation == Activation::relu ? 0.0 : cfg_.leaky_slope;
    for (std::size_t b = 0; b < blocks; ++b) {
        dense_forward(dense_[b], theta_, x, tape.pre[b]);
        const Norm& n = norms_[b];
        std::vector<double> a(n.width);
        double mean = 0.0;
        for (std::size_t i = 0; i < n.width; ++i) {
            const double z = tape.pre[b][i];
            a[i] = z > 0.0 ? z : slope * z;
            mean += a[i];
        }
        mean /= static_cast<double>(n.width);
        double var = 0.0;
        for (double v : a) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n.width);
        const double inv_std = 1.0 / std::sqrt(var + kNormEpsilon);
        tape.inv_std[b] = inv_std;
        tape.xhat[b].resize(n.width);
        tape.out[b].resize(n.width);
        for (std::size_t i = 0; i < n.width; ++i) {
            const double xh = (a[i] - mean) * inv_std;
            tape.xhat[b][i] = xh;
            tape.out[b][i] = theta_[n.gain + i] * xh + theta_[n.bias + i];
        }
        x = tape.out[b];
    }
    std::vector<double> logits;
    dense_forward(dense_.back(), theta_, x, logits);
    tape.u.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) tape.u[i] = sigmoid(logits[i]);
    return tape.u;
}

void EncoderState::backward(std::span<const double> input, const Tape& tape,
                            std::span<const double> du, std::span<double> grad) const {
    if (grad.size() != theta_.size()) throw ShapeError("gradient buffer has the wrong size");
    if (du.size() != tape.u.size()) throw ShapeError("output gradient has the wrong size");
    const std::size_t blocks = norms_.size();
    const double slope = cfg_.activation == Activation::relu ? 0.0 : cfg_.leaky_slope;

    // Output layer.
    std::vector<double> delta(du.size());
    for (std::size_t o = 0; o < du.size(); ++o) delta[o] = du[o] * tape.u[o] * (1.0 - tape.u[o]);

    auto dense_backward = [&](const Dense& d, std::span<const double> x, const std::vector<double>& dz,
                              std::vector<double>* dx) {
        if (dx) dx->assign(d.in, 0.0);
        for (std::size_t o = 0; o < d.out; ++o) {
            const double g = dz[o];
            grad[d.bias + o] += g;
            if (g == 0.0) continue;
            double* gw = grad.data() + d.weights + o * d.in;
            const double* w = theta_.data() + d.weights + o * d.in;
            for (std::size_t i = 0; i < d.in; ++i) gw[i] += g * x[i];
            if (dx) {
                for (std::size_t i = 0; i < d.in; ++i) (*dx)[i] += w[i] * g;
            }
        }
    };

    std::vector<double> dy;
    const std::span<const double> last_in =
        blocks == 0 ? input : std::span<const double>(tape.out[blocks - 1]);
    dense_backward(dense_.back(), last_in, delta, &dy);

    for (std::size_t bb = blocks; bb-- > 0;) {
        const Norm& n = norms_[bb];
        const auto& xhat = tape.xhat[bb];
        std::vector<double> dxhat(n.width);
        double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
        for (std::size_t i = 0; i < n.width; ++i) {
            grad[n.bias + i] += dy[i];
            grad[n.gain + i] += dy[i] * xhat[i];
            dxhat[i] = dy[i] * theta_[n.gain + i];
            mean_dxhat += dxhat[i];
            mean_dxhat_xhat += dxhat[i] * xhat[i];
        }
        mean_dxhat /= static_cast<double>(n.width);
        mean_dxhat_xhat /= static_cast<double>(n.width);
        std::vector<double> dz(n.width);
        for (std::size_t i = 0; i < n.width; ++i) {
            const double da = tape.inv_std[bb] * (dxhat[i] - mean_dxhat - xhat[i] * mean_dxhat_xhat);
            dz[i] = da * (tape.pre[bb][i] > 0.0 ? 1.0 : slope);
        }
        const std::span<const double> x = bb == 0 ? input : std::span<const double>(tape.out[bb - 1]);
        dense_backward(dense_[bb], x, dz, bb == 0 ? nullptr : &dy);
    }
}

PhysicalScalerBounds PhysicalScalerBounds::for_array(const ElectrodeArray& array, Interval v) {
    array.validate();
    PhysicalScalerBounds b;
    b.iz = {array.positions.front().axial, array.positions.back().axial};
    b.v = v;
    b.validate();
    return b;
}

void PhysicalScalerBounds::validate() const {
    if (!(iz.lo < iz.hi)) throw ConfigError("iz bounds must satisfy lower < upper");
    if (!(v.lo < v.hi)) throw ConfigError("v bounds must satisfy lower < upper");
}

EstimatedParams physical_scale(std::span<const double> u, const PhysicalScalerBounds& bounds) {
    if (u.size() != 2) throw ShapeError("physical scaling expects two latent outputs (iz, v)");
    return {bounds.iz.lo + u[0] * bounds.iz.width(), bounds.v.lo + u[1] * bounds.v.width()};
}

std::vector<double> physical_unscale(const EstimatedParams& p, const PhysicalScalerBounds& bounds) {
    return {(p.iz_hat - bounds.iz.lo) / bounds.iz.width(), (p.v_hat - bounds.v.lo) / bounds.v.width()};
}

EstimatedParams encode(const EncoderState& state, const Matrix& m, const PhysicalScalerBounds& bounds) {
    return physical_scale(state.forward(m.flat()), bounds);
}

}  // namespace myo

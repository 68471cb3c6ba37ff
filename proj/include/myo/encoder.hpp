#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "myo/forward_model.hpp"
#include "myo/synth.hpp"

namespace myo {

enum class Activation { relu, leaky_relu };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

struct EncoderConfig {
    int n_blocks = 2;  ///< number of activation/normalisation blocks, 1..3
    Activation activation = Activation::relu;
    double leaky_slope = 0.01;
    int n_params = 2;
    std::uint64_t seed = 0;

    /// 2^(n_blocks+2), halved per block.
    std::vector<int> hidden_widths() const;
    void validate() const;
};

/// Feed-forward encoder: [dense -> activation -> layer norm] x n_blocks,
/// then dense -> sigmoid. All weights live in one flat vector so optimisers
/// and gradient clipping can treat them uniformly.
class EncoderState {
public:
    struct Dense {
        std::size_t in = 0, out = 0;
        std::size_t weights = 0;  ///< offset of the out x in row-major block
        std::size_t bias = 0;
    };
    struct Norm {
        std::size_t width = 0;
        std::size_t gain = 0;
        std::size_t bias = 0;
    };

    /// Intermediate values kept for the backward pass.
    struct Tape {
        std::vector<std::vector<double>> pre;     ///< dense output per block
        std::vector<std::vector<double>> xhat;    ///< normalised activations per block
        std::vector<double> inv_std;              ///< per block
        std::vector<std::vector<double>> out;     ///< block outputs
        std::vector<double> u;                    ///< sigmoid outputs
    };

    EncoderState() = default;
    /// Seeded uniform fan-in initialisation.
    EncoderState(const EncoderConfig& cfg, std::size_t input_size, std::uint64_t init_seed);
    /// Restores a state from stored parameters (checkpoint load).
    EncoderState(const EncoderConfig& cfg, std::size_t input_size, std::vector<double> params);

    const EncoderConfig& config() const { return cfg_; }
    std::size_t input_size() const { return input_size_; }
    std::size_t param_count() const { return theta_.size(); }
    std::span<double> params() { return theta_; }
    std::span<const double> params() const { return theta_; }

    std::vector<double> forward(std::span<const double> input) const;
    std::vector<double> forward(std::span<const double> input, Tape& tape) const;
    /// Shifts the output-layer bias so that forward(input) returns `target`
    /// (each entry clamped into [1e-3, 1 - 1e-3]).
    void align_output(std::span<const double> input, std::span<const double> target);

    /// Accumulates dL/dtheta into `grad` given dL/du.
    void backward(std::span<const double> input, const Tape& tape, std::span<const double> du,
                  std::span<double> grad) const;

    static constexpr double kNormEpsilon = 1e-5;

private:
    void build_layout();

    EncoderConfig cfg_;
    std::size_t input_size_ = 0;
    std::vector<Dense> dense_;  ///< n_blocks hidden layers followed by the output layer
    std::vector<Norm> norms_;
    std::vector<double> theta_;
};

struct PhysicalScalerBounds {
    Interval iz;          ///< first to last electrode axial position, m
    Interval v{3.0, 6.0}; ///< m/s

    static PhysicalScalerBounds for_array(const ElectrodeArray& array, Interval v = {3.0, 6.0});
    void validate() const;
};

/// Affine map of each sigmoid output onto its physical interval.
EstimatedParams physical_scale(std::span<const double> u, const PhysicalScalerBounds& bounds);

/// Inverse map, used to seed tests and to report latent coordinates.
std::vector<double> physical_unscale(const EstimatedParams& p, const PhysicalScalerBounds& bounds);

/// Encoder forward on a flattened preprocessed recording followed by scaling.
EstimatedParams encode(const EncoderState& state, const Matrix& m, const PhysicalScalerBounds& bounds);

}  // namespace myo

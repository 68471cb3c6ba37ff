#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "myo/decoder.hpp"
#include "myo/encoder.hpp"
#include "myo/loss.hpp"
#include "myo/optim.hpp"
#include "myo/preprocess.hpp"

namespace myo {

struct TrainConfig {
    int epochs = 10000;
    int patience = 3000;
    double min_delta = 1e-6;
    double clipnorm = 1.0;
    LossWeights weights;
    double learning_rate = 1e-6;  ///< small: the warm-started latent only needs local refinement
    double weight_decay = 1e-2;
    std::uint64_t seed = 0;
    Interval scaler_v{2.0, 6.0};  ///< m/s, must contain the population cv_mean_range
    /// Start the latent at the argmin of a coarse loss scan over the
    /// physical bounds instead of wherever the random encoder puts it.
    bool warm_start = true;
    double warm_start_iz_step = 0.002;  ///< m
    double warm_start_v_step = 0.1;     ///< m/s

    void validate() const;
    AdamWParams adamw() const;
    /// Scaler bounds: iz spans the array, v spans scaler_v.
    PhysicalScalerBounds bounds(const ElectrodeArray& array) const;
};

struct EpochRecord {
    int epoch = 0;
    LossBreakdown loss;
    EstimatedParams estimate;
    int minmax_switches = 0;  ///< channels whose extremal indices moved since the last epoch
    double grad_norm = 0.0;   ///< before clipping
};

/// Loss and gradient of a full-batch objective at one parameter vector.
struct ObjectiveValue {
    LossBreakdown loss;
    EstimatedParams estimate;
    int minmax_switches = 0;
    std::vector<double> gradient;
};

using Objective = std::function<ObjectiveValue(std::span<const double> params)>;

struct OptimizeResult {
    std::vector<double> best_params;
    int best_epoch = 0;
    LossBreakdown best_loss;
    std::vector<EpochRecord> history;
    bool stopped_early = false;
};

/// Generic full-batch loop: AdamW, global-norm clipping, early stopping on
/// the combined loss, best-parameter tracking. Throws TrainingError on a
/// non-finite loss or gradient.
OptimizeResult optimize(std::vector<double> params, const Objective& objective, const TrainConfig& cfg);

struct TrainResult {
    EncoderState best_state;
    EstimatedParams best_estimate;
    LossBreakdown best_loss;
    int best_epoch = 0;
    std::vector<EpochRecord> history;
    bool stopped_early = false;
    long total_minmax_switches = 0;
};

/// Builds the objective that maps encoder weights to the combined loss of
/// decode(scale(encoder(M))) against M, with the exact gradient.
Objective make_autoencoder_objective(const EncoderState& layout, const PreprocessedRecording& m,
                                     const TrainConfig& cfg, const DecoderContext& ctx);

/// Argmin of the combined loss over a grid spanning the physical bounds with
/// the warm-start steps (OpenMP over cells; first minimum in iz-major order).
EstimatedParams coarse_latent_search(const Matrix& m, const DecoderContext& ctx, const TrainConfig& cfg);

/// `start`, when given, overrides the warm-start scan.
TrainResult train(const PreprocessedRecording& m, const EncoderConfig& enc_cfg,
                  const TrainConfig& train_cfg, const DecoderContext& ctx,
                  std::optional<EstimatedParams> start = std::nullopt);

struct HyperoptCell {
    EncoderConfig config;
    std::optional<TrainResult> result;
    std::string error;
    bool ok() const { return result.has_value(); }
};

struct HyperoptResult {
    EncoderConfig best_config;
    TrainResult best;
    std::vector<HyperoptCell> cells;
};

/// {relu, leaky_relu} x {1, 2, 3} blocks, other fields copied from `base`.
std::vector<EncoderConfig> default_hyperopt_grid(const EncoderConfig& base);

using CellTrainer = std::function<TrainResult(const EncoderConfig&)>;

/// Trains every cell and keeps the one with the smallest best loss; ties go
/// to fewer blocks, then relu. Failed cells are skipped; throws
/// TrainingError if all fail.
HyperoptResult hyperparameter_search(const std::vector<EncoderConfig>& grid, const CellTrainer& trainer);

HyperoptResult hyperparameter_search(const PreprocessedRecording& m, const TrainConfig& train_cfg,
                                     const DecoderContext& ctx, const std::vector<EncoderConfig>& grid);

}  // namespace myo

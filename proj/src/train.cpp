#include "myo/train.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <memory>
#include <string>

#include "myo/errors.hpp"

namespace myo {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be positive");
    if (patience < 1) throw ConfigError("patience must be at least 1");
    if (!(min_delta >= 0.0)) throw ConfigError("min_delta must be non-negative");
    if (!(clipnorm > 0.0)) throw ConfigError("clipnorm must be positive");
    weights.validate();
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
    if (!(scaler_v.lo > 0.0 && scaler_v.lo < scaler_v.hi)) throw ConfigError("scaler_v must satisfy 0 < lo < hi");
    if (!(warm_start_iz_step > 0.0) || !(warm_start_v_step > 0.0)) {
        throw ConfigError("warm-start steps must be positive");
    }
}

PhysicalScalerBounds TrainConfig::bounds(const ElectrodeArray& array) const {
    return PhysicalScalerBounds::for_array(array, scaler_v);
}

AdamWParams TrainConfig::adamw() const {
    AdamWParams p;
    p.learning_rate = learning_rate;
    p.weight_decay = weight_decay;
    return p;
}

OptimizeResult optimize(std::vector<double> params, const Objective& objective, const TrainConfig& cfg) {
    cfg.validate();
    AdamW opt(params.size(), cfg.adamw());
    EarlyStopping stopper(cfg.patience, cfg.min_delta);
    OptimizeResult res;
    res.best_loss.combined = std::numeric_limits<double>::infinity();
    res.history.reserve(static_cast<std::size_t>(cfg.epochs));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        ObjectiveValue ev = objective(params);
        if (!std::isfinite(ev.loss.combined)) {
            throw TrainingError("non-finite loss at epoch " + std::to_string(epoch), epoch);
        }
        if (ev.gradient.size() != params.size()) throw ShapeError("objective returned a wrong-sized gradient");
        double sq = 0.0;
        for (double g : ev.gradient) sq += g * g;
        const double grad_norm = std::sqrt(sq);
        if (!std::isfinite(grad_norm)) {
            throw TrainingError("non-finite gradient at epoch " + std::to_string(epoch), epoch);
        }
        res.history.push_back({epoch, ev.loss, ev.estimate, ev.minmax_switches, grad_norm});
        if (ev.loss.combined < res.best_loss.combined) {
            res.best_loss = ev.loss;
            res.best_epoch = epoch;
            res.best_params = params;
        }
        if (stopper.observe(ev.loss.combined)) {
            res.stopped_early = epoch + 1 < cfg.epochs;
            break;
        }
        clip_by_global_norm(ev.gradient, cfg.clipnorm);
        opt.step(params, ev.gradient);
    }
    return res;
}

Objective make_autoencoder_objective(const EncoderState& layout, const PreprocessedRecording& m,
                                     const TrainConfig& cfg, const DecoderContext& ctx) {
    const PhysicalScalerBounds bounds = cfg.bounds(ctx.array);
    const std::size_t m_rows = ctx.array.count() - 2;
    if (m.m.rows() != m_rows || m.m.cols() != ctx.grid.size()) {
        throw ShapeError("preprocessed recording does not match the decoder geometry");
    }
    // Previous extremal indices, for the min-max switch diagnostic.
    auto prev_min = std::make_shared<std::vector<std::size_t>>();
    auto prev_max = std::make_shared<std::vector<std::size_t>>();

    return [layout, m, cfg, ctx, bounds, prev_min, prev_max](std::span<const double> params) {
        EncoderState state = layout;
        std::copy(params.begin(), params.end(), state.params().begin());

        EncoderState::Tape tape;
        const std::vector<double> u = state.forward(m.m.flat(), tape);
        const EstimatedParams p = physical_scale(u, bounds);
        const DecoderOutput dec = decode(p, ctx);

        ObjectiveValue ev;
        ev.estimate = p;
        ev.loss = loss_combined(dec.n, m.m, cfg.weights);
        const Matrix dl_dn = loss_combined_gradient(dec.n, m.m, cfg.weights);
        double dl_diz = 0.0, dl_dv = 0.0;
        const auto g = dl_dn.flat(), a = dec.dn_diz.flat(), b = dec.dn_dv.flat();
        for (std::size_t i = 0; i < g.size(); ++i) {
            dl_diz += g[i] * a[i];
            dl_dv += g[i] * b[i];
        }
        const std::vector<double> du{dl_diz * bounds.iz.width(), dl_dv * bounds.v.width()};
        ev.gradient.assign(state.param_count(), 0.0);
        state.backward(m.m.flat(), tape, du, ev.gradient);

        if (prev_min->size() == dec.argmin.size()) {
            for (std::size_t j = 0; j < dec.argmin.size(); ++j) {
                if ((*prev_min)[j] != dec.argmin[j] || (*prev_max)[j] != dec.argmax[j]) {
                    ++ev.minmax_switches;
                }
            }
        }
        *prev_min = dec.argmin;
        *prev_max = dec.argmax;
        return ev;
    };
}

namespace {

std::vector<double> axis(const Interval& range, double step) {
    const auto n = static_cast<std::size_t>(std::floor(range.width() / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = range.lo + step * static_cast<double>(i);
    return out;
}

}  // namespace

EstimatedParams coarse_latent_search(const Matrix& m, const DecoderContext& ctx, const TrainConfig& cfg) {
    cfg.validate();
    const PhysicalScalerBounds bounds = cfg.bounds(ctx.array);
    const std::vector<double> iz = axis(bounds.iz, cfg.warm_start_iz_step);
    const std::vector<double> v = axis(bounds.v, cfg.warm_start_v_step);
    const auto cells = static_cast<std::ptrdiff_t>(iz.size() * v.size());
    std::vector<double> loss(static_cast<std::size_t>(cells));
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t c = 0; c < cells; ++c) {
        const auto k = static_cast<std::size_t>(c);
        const Matrix n = decode_value({iz[k / v.size()], v[k % v.size()]}, ctx);
        loss[k] = loss_combined(n, m, cfg.weights).combined;
    }
    const auto best = static_cast<std::size_t>(std::min_element(loss.begin(), loss.end()) - loss.begin());
    return {iz[best / v.size()], v[best % v.size()]};
}

TrainResult train(const PreprocessedRecording& m, const EncoderConfig& enc_cfg,
                  const TrainConfig& train_cfg, const DecoderContext& ctx,
                  std::optional<EstimatedParams> start) {
    train_cfg.validate();
    if (enc_cfg.n_params != 2) throw ConfigError("the mean-fibre decoder estimates exactly two parameters");
    EncoderState init(enc_cfg, m.m.size(), mix64(train_cfg.seed) ^ enc_cfg.seed);
    if (!start && train_cfg.warm_start) start = coarse_latent_search(m.m, ctx, train_cfg);
    if (start) {
        const std::vector<double> u = physical_unscale(*start, train_cfg.bounds(ctx.array));
        init.align_output(m.m.flat(), u);
    }
    const Objective objective = make_autoencoder_objective(init, m, train_cfg, ctx);

    std::vector<double> theta(init.params().begin(), init.params().end());
    OptimizeResult opt = optimize(std::move(theta), objective, train_cfg);

    TrainResult res;
    res.best_state = EncoderState(enc_cfg, m.m.size(), std::move(opt.best_params));
    res.best_estimate = encode(res.best_state, m.m, train_cfg.bounds(ctx.array));
    res.best_loss = opt.best_loss;
    res.best_epoch = opt.best_epoch;
    res.stopped_early = opt.stopped_early;
    for (const auto& r : opt.history) res.total_minmax_switches += r.minmax_switches;
    res.history = std::move(opt.history);
    return res;
}

std::vector<EncoderConfig> default_hyperopt_grid(const EncoderConfig& base) {
    std::vector<EncoderConfig> grid;
    for (Activation a : {Activation::relu, Activation::leaky_relu}) {
        for (int n = 1; n <= 3; ++n) {
            EncoderConfig c = base;
            c.activation = a;
            c.n_blocks = n;
            grid.push_back(c);
        }
    }
    return grid;
}

namespace {

bool better_cell(const HyperoptCell& a, const HyperoptCell& b) {
    const double la = a.result->best_loss.combined;
    const double lb = b.result->best_loss.combined;
    if (la != lb) return la < lb;
    if (a.config.n_blocks != b.config.n_blocks) return a.config.n_blocks < b.config.n_blocks;
    return a.config.activation == Activation::relu && b.config.activation != Activation::relu;
}

}  // namespace

HyperoptResult hyperparameter_search(const std::vector<EncoderConfig>& grid, const CellTrainer& trainer) {
    if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
    HyperoptResult out;
    for (const auto& cfg : grid) {
        HyperoptCell cell{cfg, std::nullopt, {}};
        try {
            cell.result = trainer(cfg);
        } catch (const Error& e) {
            cell.error = e.what();
        }
        out.cells.push_back(std::move(cell));
    }
    const HyperoptCell* best = nullptr;
    for (const auto& c : out.cells) {
        if (c.ok() && (best == nullptr || better_cell(c, *best))) best = &c;
    }
    if (best == nullptr) throw TrainingError("every hyperparameter cell failed", 0);
    out.best_config = best->config;
    out.best = *best->result;
    return out;
}

HyperoptResult hyperparameter_search(const PreprocessedRecording& m, const TrainConfig& train_cfg,
                                     const DecoderContext& ctx, const std::vector<EncoderConfig>& grid) {
    std::optional<EstimatedParams> start;
    if (train_cfg.warm_start) start = coarse_latent_search(m.m, ctx, train_cfg);
    return hyperparameter_search(grid, [&](const EncoderConfig& cfg) { return train(m, cfg, train_cfg, ctx, start); });
}

}  // namespace myo

#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "myo/decoder.hpp"
#include "myo/encoder.hpp"
#include "myo/loss.hpp"
#include "myo/preprocess.hpp"

namespace myo {

/// Mean fibre of a motor unit: iz and v are the arithmetic means over its
/// fibres, and so is the geometry handed to the decoder.
struct PrototypeParams {
    double iz_pr = 0.0;  ///< m
    double v_pr = 0.0;   ///< m/s
    FibreGeometry geometry;

    EstimatedParams as_estimate() const { return {iz_pr, v_pr}; }
};

PrototypeParams prototype_params(const MotorUnit& mu);

struct AbsoluteErrors {
    double iz = 0.0;  ///< m
    double v = 0.0;   ///< m/s
};

AbsoluteErrors absolute_errors(const PrototypeParams& pr, const EstimatedParams& estimate);

/// Losses of the decoder evaluated at the prototype parameters against `m`.
LossBreakdown prototype_losses(const Matrix& m, const PrototypeParams& pr, const DecoderContext& ctx,
                               const LossWeights& weights);

enum class Method { clustering, informed_ae };
std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// One line of the per-motor-unit table. Optional columns are not
/// applicable to the clustering method.
struct EvalRow {
    int muscle_id = 0;
    int mu_id = 0;
    double iz_pr_mm = 0.0;
    double v_pr = 0.0;
    Method method = Method::informed_ae;
    double d_iz_mm = 0.0;
    std::optional<double> d_v;
    std::optional<double> sqrt_mse_pred;
    std::optional<double> cc_pred;
    std::optional<double> sqrt_mse_prot;
    std::optional<double> cc_prot;
};

/// Clustering row (when `clustering_iz` is given) followed by the informed
/// autoencoder row for one motor unit.
std::vector<EvalRow> evaluation_rows(int muscle_id, int mu_id, const PrototypeParams& pr, const Matrix& m,
                                     const DecoderContext& ctx, const LossWeights& weights,
                                     const EstimatedParams& ae_estimate,
                                     std::optional<double> clustering_iz);

/// Muscle-level (or grand-mean) line of the aggregated table.
struct AggregateRow {
    std::optional<int> muscle_id;  ///< empty for the grand mean
    Method method = Method::informed_ae;
    double iz_pr_mm = 0.0;
    double v_pr = 0.0;
    double d_iz_mm = 0.0;
    std::optional<double> d_v;
    std::optional<double> sqrt_mse_pred;
    std::optional<double> cc_pred;
    std::optional<double> sqrt_mse_prot;
    std::optional<double> cc_prot;
    std::size_t count = 0;
};

/// Means per muscle and method, then the mean of the muscle means per
/// method. Output order is canonical and sums run in a canonical order, so
/// the result does not depend on the order of `rows`.
std::vector<AggregateRow> aggregate_results(std::span<const EvalRow> rows);

void write_rows_csv(std::ostream& out, std::span<const EvalRow> rows);
/// Leading lines starting with # (provenance) are skipped.
std::vector<EvalRow> read_rows_csv(std::istream& in);
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);

/// Plain-text tables in the column order of the published tables, values
/// rounded to four decimals and "--" where a column does not apply.
std::string render_rows_table(std::span<const EvalRow> rows);
std::string render_aggregate_table(std::span<const AggregateRow> rows);

struct LandscapeGrid {
    Interval iz{-0.024, 0.024};
    double iz_step = 0.0005;
    Interval v{3.0, 6.0};
    double v_step = 0.1;

    std::vector<double> iz_values() const;
    std::vector<double> v_values() const;
    void validate(const PhysicalScalerBounds& bounds) const;
};

struct Landscape {
    std::vector<double> iz;
    std::vector<double> v;
    std::vector<LossBreakdown> values;  ///< iz-major: values[i * v.size() + j]
    std::size_t argmin_mse = 0;
    std::size_t argmin_combined = 0;

    const LossBreakdown& at(std::size_t i, std::size_t j) const { return values[i * v.size() + j]; }
    EstimatedParams point(std::size_t flat_index) const {
        return {iz[flat_index / v.size()], v[flat_index % v.size()]};
    }
};

/// Dense loss evaluation over the grid (OpenMP over cells).
Landscape loss_landscape(const Matrix& m, const DecoderContext& ctx, const LandscapeGrid& grid,
                         const LossWeights& weights);

namespace reference {
Landscape loss_landscape(const Matrix& m, const DecoderContext& ctx, const LandscapeGrid& grid,
                         const LossWeights& weights);
}

/// Header iz_m,v_mps,mse,cc,combined; one line per cell in iz-major order.
void write_landscape_csv(std::ostream& out, const Landscape& landscape);

}  // namespace myo

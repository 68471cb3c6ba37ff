#pragma once

// Data-parallel evaluation of the forward model over an (electrode, time)
// grid. The default entry points are OpenMP-parallel over electrodes; the
// `reference` namespace holds serial versions that run the identical per-row
// computation and therefore agree bit for bit.

#include "myo/forward_model.hpp"
#include "myo/matrix.hpp"

namespace myo {

/// Monopolar potentials of a whole motor unit, n_E x k, volts.
Matrix simulate_potentials(const MotorUnit& mu, const ElectrodeArray& array,
                           const SamplingGrid& grid, const VolumeConductorConfig& cfg);

/// Mean-fibre potentials with forward-mode sensitivities to (iz_hat, v_hat).
struct MeanFibreField {
    Matrix value;
    Matrix d_iz;
    Matrix d_v;
};

MeanFibreField mean_fibre_field(const EstimatedParams& p, const FibreGeometry& geom,
                                const ElectrodeArray& array, const SamplingGrid& grid,
                                const VolumeConductorConfig& cfg);

/// Value-only mean-fibre potentials (no tangents), n_E x k.
Matrix mean_fibre_potentials(const EstimatedParams& p, const FibreGeometry& geom,
                             const ElectrodeArray& array, const SamplingGrid& grid,
                             const VolumeConductorConfig& cfg);

/// Number of threads the parallel kernels will use (1 without OpenMP).
int kernel_threads();

namespace reference {

Matrix simulate_potentials(const MotorUnit& mu, const ElectrodeArray& array,
                           const SamplingGrid& grid, const VolumeConductorConfig& cfg);

MeanFibreField mean_fibre_field(const EstimatedParams& p, const FibreGeometry& geom,
                                const ElectrodeArray& array, const SamplingGrid& grid,
                                const VolumeConductorConfig& cfg);

Matrix mean_fibre_potentials(const EstimatedParams& p, const FibreGeometry& geom,
                             const ElectrodeArray& array, const SamplingGrid& grid,
                             const VolumeConductorConfig& cfg);

}  // namespace reference

}  // namespace myo

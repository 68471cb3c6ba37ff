#pragma once

// Line-source volume-conductor model of the skin potential generated by a
// propagating intracellular action potential.
//
// Coordinates: `axial` runs along the fibre direction with the origin at the
// electrode-array midpoint, `lateral` is the in-plane offset perpendicular to
// the fibres, and `normal` points out of the skin (skin plane at normal = 0,
// a fibre at depth d sits at normal = -d).

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "myo/dual.hpp"

namespace myo {

struct Vec3 {
    double axial = 0.0;
    double lateral = 0.0;
    double normal = 0.0;
};

struct VolumeConductorConfig {
    double conductivity = 0.3;      ///< S/m, homogeneous isotropic medium
    int quadrature_points = 80;     ///< Gauss nodes per propagating wave (8 per panel)
    double source_scale = 2.0e-9;   ///< amplitude factor on the current density
    double ap_amplitude_mv = 96.0;  ///< A in A*s^3*exp(-s) - B
    double ap_resting_mv = 90.0;    ///< B
    double spatial_scale = 1000.0;  ///< s per metre of propagated distance
    double tail_cutoff = 36.0;      ///< waveform treated as extinct for s beyond this

    void validate() const;
    int panel_count() const { return (quadrature_points + 7) / 8; }
};

struct FibreParams {
    double iz = 0.0;              ///< innervation point, m
    double v = 4.0;               ///< conduction velocity, m/s
    double length = 0.15;         ///< m
    double depth = 0.01;          ///< m below the skin, > 0
    double lateral_offset = 0.0;  ///< m
    double z_start = -0.075;      ///< axial position of the proximal end, m

    double z_end() const { return z_start + length; }
    void validate() const;
};

struct MotorUnit {
    std::vector<FibreParams> fibres;
    void validate() const;
};

/// Fibre fields that the mean fibre takes from a template rather than from the
/// estimated parameters.
struct FibreGeometry {
    double length = 0.15;
    double depth = 0.01;
    double lateral_offset = 0.0;
    double z_start = -0.075;

    FibreParams with(double iz, double v) const {
        return {iz, v, length, depth, lateral_offset, z_start};
    }
};

/// Latent-space output of the encoder after physical scaling.
struct EstimatedParams {
    double iz_hat = 0.0;  ///< m
    double v_hat = 0.0;   ///< m/s
};

struct ElectrodeArray {
    std::vector<Vec3> positions;
    bool uniform = true;

    std::size_t count() const { return positions.size(); }
    /// Collinear array along the fibre axis, centred at the origin.
    static ElectrodeArray linear(std::size_t n, double span);
    void validate() const;
};

struct SamplingGrid {
    std::vector<double> times;
    double sample_rate = 0.0;

    std::size_t size() const { return times.size(); }
    /// t_i = i / sample_rate for i = 0..k-1.
    static SamplingGrid uniform(std::size_t k, double sample_rate);
    void validate() const;
};

/// Intracellular action potential in mV at dimensionless propagated
/// coordinate s: A*s^3*exp(-s) - B for s >= 0, resting value -B otherwise.
double intracellular_action_potential(double s, const VolumeConductorConfig& cfg = {});

/// d^2/ds^2 of the intracellular action potential (mV); zero for s < 0.
template <class T>
T action_potential_curvature(const T& s, double amplitude) {
    using std::exp;
    if (value_of(s) < 0.0) return T(0.0);
    // psi = A s^3 e^{-s}  =>  psi'' = A e^{-s} (s^3 - 6 s^2 + 6 s)
    return amplitude * exp(-s) * (s * (s * (s - 6.0) + 6.0));
}

/// Line-source integrand: potential contribution (per metre of fibre) at x
/// from fibre point z at time t. Throws GeometryError if x coincides with the
/// source point and ConfigError if z lies outside the fibre.
double fibre_kernel_h(const Vec3& x, const FibreParams& p, double t, double z,
                      const VolumeConductorConfig& cfg);

struct HalfFibrePotentials {
    double proximal = 0.0;  ///< wave running from iz toward z_start
    double distal = 0.0;    ///< wave running from iz toward z_end
    double total() const { return proximal + distal; }
};

/// Potential (V) at x and time t of one fibre, by composite Gauss-Legendre
/// quadrature of the kernel over each half fibre.
double fibre_potential(const Vec3& x, const FibreParams& p, double t,
                       const VolumeConductorConfig& cfg);
HalfFibrePotentials fibre_potential_halves(const Vec3& x, const FibreParams& p, double t,
                                           const VolumeConductorConfig& cfg);

/// Superposition over all fibres of the motor unit (pairwise summation).
double motor_unit_potential(const Vec3& x, const MotorUnit& mu, double t,
                            const VolumeConductorConfig& cfg);

struct ValueGrad {
    double value = 0.0;
    std::array<double, 2> grad{};  ///< d/d iz_hat, d/d v_hat
};

/// Mean-fibre potential and its exact forward-mode derivative with respect to
/// (iz_hat, v_hat). A half fibre whose length would be negative (iz outside
/// the template fibre) contributes nothing.
ValueGrad mean_fibre_potential_with_gradient(const Vec3& x, const EstimatedParams& p,
                                             const FibreGeometry& geom, double t,
                                             const VolumeConductorConfig& cfg);

/// Pairwise (cascade) summation; result does not depend on how the caller
/// partitions work, only on the order of `values`.
double pairwise_sum(std::span<const double> values);

}  // namespace myo

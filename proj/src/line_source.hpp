#pragma once

// Internal: templated line-source quadrature shared by the scalar entry points
// in forward_model.cpp and the matrix kernels.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "myo/dual.hpp"
#include "myo/errors.hpp"
#include "myo/forward_model.hpp"

namespace myo::detail {

inline constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

/// Factor turning integral(psi''(s) / r du) in mV/m into volts.
inline double kernel_coefficient(const VolumeConductorConfig& cfg) {
    return 1e-3 * cfg.spatial_scale * cfg.spatial_scale * cfg.source_scale /
           (4.0 * std::numbers::pi * cfg.conductivity);
}

/// psi'' at the Gauss nodes of the full active support s in [0, tail_cutoff].
struct CurvatureTable {
    int panels = 0;
    double cutoff = 0.0;
    double amplitude = 0.0;
    std::vector<double> values;  ///< panels * 8, node-major within each panel
};

inline const CurvatureTable& curvature_table(const VolumeConductorConfig& cfg) {
    thread_local CurvatureTable table;
    const int panels = cfg.panel_count();
    if (table.panels != panels || table.cutoff != cfg.tail_cutoff || table.amplitude != cfg.ap_amplitude_mv) {
        table.panels = panels;
        table.cutoff = cfg.tail_cutoff;
        table.amplitude = cfg.ap_amplitude_mv;
        table.values.resize(static_cast<std::size_t>(panels) * kGaussNodes.size());
        const double width = cfg.tail_cutoff / static_cast<double>(panels);
        for (int p = 0; p < panels; ++p) {
            const double mid = width * (static_cast<double>(p) + 0.5);
            for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
                table.values[static_cast<std::size_t>(p) * kGaussNodes.size() + k] =
                    action_potential_curvature(mid + 0.5 * width * kGaussNodes[k], cfg.ap_amplitude_mv);
            }
        }
    }
    return table;
}

/// Integral over one half fibre of psi''(s(u)) / r(u) du, where u >= 0 is the
/// distance from the innervation point in direction `dir` (+1 distal, -1
/// proximal) and s = lambda (v t - u). Only the stretch between the wavefront
/// and the extinct tail is integrated; outside it the integrand vanishes (to
/// within exp(-tail_cutoff)). Quadrature runs in s over fixed panels of
/// [0, tail_cutoff]; panels cut by the active support are remapped.
template <class T>
T half_fibre_integral(const Vec3& x, const T& iz, const T& v, double t, double dir,
                      const T& half_length, double depth, double lateral,
                      const VolumeConductorConfig& cfg) {
    if (t <= 0.0 || value_of(half_length) <= 0.0) return T(0.0);
    const double lam = cfg.spatial_scale;
    const T reach = v * t;
    const T lam_reach = lam * reach;
    const T s_hi = value_of(lam_reach) >= cfg.tail_cutoff ? T(cfg.tail_cutoff) : lam_reach;
    const T s_lo = value_of(half_length) >= value_of(reach) ? T(0.0) : lam * (reach - half_length);
    if (value_of(s_hi) <= value_of(s_lo)) return T(0.0);

    const int panels = cfg.panel_count();
    const double width = cfg.tail_cutoff / static_cast<double>(panels);
    const double dy = x.lateral - lateral;
    const double dn = x.normal + depth;
    const double perp2 = dy * dy + dn * dn;
    const T offset = (x.axial - iz) - dir * reach;  // dz = offset + dir * s / lam
    const double dir_over_lam = dir / lam;
    const double* tabulated = curvature_table(cfg).values.data();

    const int p_first = std::max(0, static_cast<int>(std::floor(value_of(s_lo) / width)));
    const int p_last = std::min(panels, static_cast<int>(std::ceil(value_of(s_hi) / width)));

    auto check = [](const T& r2) {
        if (value_of(r2) == 0.0) throw GeometryError("observation point coincides with a fibre source point");
    };

    T acc(0.0);
    for (int p = p_first; p < p_last; ++p) {
        const double a = width * static_cast<double>(p);
        const double b = width * static_cast<double>(p + 1);
        const bool cut_lo = value_of(s_lo) > a;
        const bool cut_hi = value_of(s_hi) < b;
        if (!cut_lo && !cut_hi) {
            const double mid = 0.5 * (a + b);
            const double* row = tabulated + static_cast<std::size_t>(p) * kGaussNodes.size();
            T panel(0.0);
            for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
                const double s = mid + 0.5 * width * kGaussNodes[k];
                const T dz = offset + dir_over_lam * s;
                const T r2 = dz * dz + perp2;
                check(r2);
                panel += (kGaussWeights[k] * row[k]) * rsqrt(r2);
            }
            acc += panel * (0.5 * width);
            continue;
        }
        const T lo = cut_lo ? s_lo : T(a);
        const T hi = cut_hi ? s_hi : T(b);
        if (value_of(hi) <= value_of(lo)) continue;
        const T mid = (lo + hi) * 0.5;
        const T half = (hi - lo) * 0.5;
        T panel(0.0);
        for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
            const T s = mid + half * kGaussNodes[k];
            const T dz = offset + dir_over_lam * s;
            const T r2 = dz * dz + perp2;
            check(r2);
            panel += kGaussWeights[k] * action_potential_curvature(s, cfg.ap_amplitude_mv) * rsqrt(r2);
        }
        acc += panel * half;
    }
    return acc * (1.0 / lam);
}

}  // namespace myo::detail

#include "myo/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "line_source.hpp"

namespace myo {

void VolumeConductorConfig::validate() const {
    if (!(conductivity > 0.0)) throw ConfigError("conductivity must be positive");
    if (quadrature_points < 8) throw ConfigError("quadrature_points must be at least 8");
    if (!(spatial_scale > 0.0)) throw ConfigError("spatial_scale must be positive");
    if (!(tail_cutoff > 3.0)) throw ConfigError("tail_cutoff must exceed the action-potential peak (s = 3)");
}

void FibreParams::validate() const {
    if (!(v > 0.0)) throw ConfigError("fibre conduction velocity must be positive");
    if (!(length > 0.0)) throw ConfigError("fibre length must be positive");
    if (!(depth > 0.0)) throw ConfigError("fibre depth must be positive");
    if (iz < z_start || iz > z_end()) {
        throw ConfigError("innervation point lies outside the fibre");
    }
}

void MotorUnit::validate() const {
    if (fibres.empty()) throw ConfigError("motor unit has no fibres");
    for (const auto& f : fibres) f.validate();
}

ElectrodeArray ElectrodeArray::linear(std::size_t n, double span) {
    if (n < 3) throw ConfigError("an electrode array needs at least 3 electrodes");
    ElectrodeArray arr;
    arr.positions.reserve(n);
    const double ied = span / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        arr.positions.push_back({-0.5 * span + ied * static_cast<double>(j), 0.0, 0.0});
    }
    arr.uniform = true;
    return arr;
}

void ElectrodeArray::validate() const {
    if (positions.size() < 3) throw ConfigError("an electrode array needs at least 3 electrodes");
    for (std::size_t j = 1; j < positions.size(); ++j) {
        if (!(positions[j].axial > positions[j - 1].axial)) {
            throw ConfigError("electrode axial coordinates must be strictly increasing");
        }
    }
    if (uniform) {
        const double ied = positions[1].axial - positions[0].axial;
        for (std::size_t j = 2; j < positions.size(); ++j) {
            const double gap = positions[j].axial - positions[j - 1].axial;
            if (std::abs(gap - ied) > 1e-12) {
                throw ConfigError("electrode array declared uniform but spacing varies");
            }
        }
    }
}

SamplingGrid SamplingGrid::uniform(std::size_t k, double sample_rate) {
    if (k < 2) throw ConfigError("a sampling grid needs at least 2 samples");
    if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
    SamplingGrid g;
    g.sample_rate = sample_rate;
    g.times.resize(k);
    for (std::size_t i = 0; i < k; ++i) g.times[i] = static_cast<double>(i) / sample_rate;
    return g;
}

void SamplingGrid::validate() const {
    if (times.size() < 2) throw ConfigError("a sampling grid needs at least 2 samples");
    if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
    const double dt = 1.0 / sample_rate;
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw ConfigError("sample times must increase");
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-12) {
            throw ConfigError("sample spacing does not match the sample rate");
        }
    }
}

double intracellular_action_potential(double s, const VolumeConductorConfig& cfg) {
    if (s < 0.0) return -cfg.ap_resting_mv;
    return cfg.ap_amplitude_mv * s * s * s * std::exp(-s) - cfg.ap_resting_mv;
}

double fibre_kernel_h(const Vec3& x, const FibreParams& p, double t, double z,
                      const VolumeConductorConfig& cfg) {
    if (z < p.z_start || z > p.z_end()) throw ConfigError("kernel evaluated off the fibre");
    const double s = cfg.spatial_scale * (p.v * t - std::abs(z - p.iz));
    const double dz = x.axial - z;
    const double dy = x.lateral - p.lateral_offset;
    const double dn = x.normal + p.depth;
    const double r = std::sqrt(dz * dz + dy * dy + dn * dn);
    if (r == 0.0) throw GeometryError("observation point coincides with the source point");
    return detail::kernel_coefficient(cfg) * action_potential_curvature(s, cfg.ap_amplitude_mv) / r;
}

namespace {

void require_off_fibre(const Vec3& x, double z_start, double z_end, double depth, double lateral) {
    const double dy = x.lateral - lateral;
    const double dn = x.normal + depth;
    if (dy == 0.0 && dn == 0.0 && x.axial >= z_start && x.axial <= z_end) {
        throw GeometryError("observation point lies on the fibre");
    }
}

}  // namespace

HalfFibrePotentials fibre_potential_halves(const Vec3& x, const FibreParams& p, double t,
                                           const VolumeConductorConfig& cfg) {
    require_off_fibre(x, p.z_start, p.z_end(), p.depth, p.lateral_offset);
    const double c = detail::kernel_coefficient(cfg);
    HalfFibrePotentials out;
    out.proximal = c * detail::half_fibre_integral<double>(x, p.iz, p.v, t, -1.0, p.iz - p.z_start,
                                                           p.depth, p.lateral_offset, cfg);
    out.distal = c * detail::half_fibre_integral<double>(x, p.iz, p.v, t, +1.0, p.z_end() - p.iz,
                                                         p.depth, p.lateral_offset, cfg);
    return out;
}

double fibre_potential(const Vec3& x, const FibreParams& p, double t,
                       const VolumeConductorConfig& cfg) {
    return fibre_potential_halves(x, p, t, cfg).total();
}

double motor_unit_potential(const Vec3& x, const MotorUnit& mu, double t,
                            const VolumeConductorConfig& cfg) {
    std::vector<double> values;
    values.reserve(mu.fibres.size());
    for (const auto& f : mu.fibres) values.push_back(fibre_potential(x, f, t, cfg));
    return pairwise_sum(values);
}

ValueGrad mean_fibre_potential_with_gradient(const Vec3& x, const EstimatedParams& p,
                                             const FibreGeometry& geom, double t,
                                             const VolumeConductorConfig& cfg) {
    using D = Dual<2>;
    const D iz = D::variable(p.iz_hat, 0);
    const D v = D::variable(p.v_hat, 1);
    const double z_end = geom.z_start + geom.length;
    require_off_fibre(x, geom.z_start, z_end, geom.depth, geom.lateral_offset);

    const D prox = detail::half_fibre_integral<D>(x, iz, v, t, -1.0, iz - geom.z_start, geom.depth,
                                                  geom.lateral_offset, cfg);
    const D dist = detail::half_fibre_integral<D>(x, iz, v, t, +1.0, z_end - iz, geom.depth,
                                                  geom.lateral_offset, cfg);
    const D total = (prox + dist) * detail::kernel_coefficient(cfg);
    return {total.v, total.d};
}

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kBlock = 8;
    if (values.size() <= kBlock) {
        double s = 0.0;
        for (double x : values) s += x;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace myo

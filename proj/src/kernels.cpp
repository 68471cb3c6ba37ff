#include "myo/kernels.hpp"

#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "line_source.hpp"

namespace myo {

namespace {

void check_inputs(const ElectrodeArray& array, const SamplingGrid& grid,
                  const VolumeConductorConfig& cfg) {
    array.validate();
    grid.validate();
    cfg.validate();
}

// One electrode row of a motor-unit simulation. `scratch` holds k * n values
// so that each time sample can be summed pairwise across fibres.
void simulate_row(std::size_t j, const MotorUnit& mu, const ElectrodeArray& array,
                  const SamplingGrid& grid, const VolumeConductorConfig& cfg,
                  std::vector<double>& scratch, Matrix& out) {
    const std::size_t n = mu.fibres.size();
    const std::size_t k = grid.size();
    scratch.assign(k * n, 0.0);
    const Vec3& x = array.positions[j];
    for (std::size_t f = 0; f < n; ++f) {
        for (std::size_t i = 0; i < k; ++i) {
            scratch[i * n + f] = fibre_potential(x, mu.fibres[f], grid.times[i], cfg);
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        out(j, i) = pairwise_sum(std::span<const double>(scratch.data() + i * n, n));
    }
}

void mean_fibre_row(std::size_t j, const EstimatedParams& p, const FibreGeometry& geom,
                    const ElectrodeArray& array, const SamplingGrid& grid,
                    const VolumeConductorConfig& cfg, MeanFibreField& out) {
    const Vec3& x = array.positions[j];
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const ValueGrad vg = mean_fibre_potential_with_gradient(x, p, geom, grid.times[i], cfg);
        out.value(j, i) = vg.value;
        out.d_iz(j, i) = vg.grad[0];
        out.d_v(j, i) = vg.grad[1];
    }
}

void mean_fibre_value_row(std::size_t j, const EstimatedParams& p, const FibreGeometry& geom,
                          const ElectrodeArray& array, const SamplingGrid& grid,
                          const VolumeConductorConfig& cfg, Matrix& out) {
    const FibreParams f = geom.with(p.iz_hat, p.v_hat);
    const Vec3& x = array.positions[j];
    const double c = detail::kernel_coefficient(cfg);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // Same arithmetic as fibre_potential without the off-fibre check, so
        // iz outside the template fibre is tolerated as in the gradient path.
        const double t = grid.times[i];
        const double prox = detail::half_fibre_integral<double>(
            x, f.iz, f.v, t, -1.0, f.iz - f.z_start, f.depth, f.lateral_offset, cfg);
        const double dist = detail::half_fibre_integral<double>(
            x, f.iz, f.v, t, +1.0, f.z_end() - f.iz, f.depth, f.lateral_offset, cfg);
        out(j, i) = (prox + dist) * c;
    }
}

MeanFibreField make_field(std::size_t rows, std::size_t cols) {
    return {Matrix(rows, cols), Matrix(rows, cols), Matrix(rows, cols)};
}

}  // namespace

int kernel_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

Matrix simulate_potentials(const MotorUnit& mu, const ElectrodeArray& array,
                           const SamplingGrid& grid, const VolumeConductorConfig& cfg) {
    check_inputs(array, grid, cfg);
    mu.validate();
    const auto n_e = static_cast<std::ptrdiff_t>(array.count());
    Matrix out(array.count(), grid.size());
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(dynamic, 1)
        for (std::ptrdiff_t j = 0; j < n_e; ++j) {
            simulate_row(static_cast<std::size_t>(j), mu, array, grid, cfg, scratch, out);
        }
    }
    return out;
}

MeanFibreField mean_fibre_field(const EstimatedParams& p, const FibreGeometry& geom,
                                const ElectrodeArray& array, const SamplingGrid& grid,
                                const VolumeConductorConfig& cfg) {
    check_inputs(array, grid, cfg);
    const auto n_e = static_cast<std::ptrdiff_t>(array.count());
    MeanFibreField out = make_field(array.count(), grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n_e; ++j) {
        mean_fibre_row(static_cast<std::size_t>(j), p, geom, array, grid, cfg, out);
    }
    return out;
}

Matrix mean_fibre_potentials(const EstimatedParams& p, const FibreGeometry& geom,
                             const ElectrodeArray& array, const SamplingGrid& grid,
                             const VolumeConductorConfig& cfg) {
    check_inputs(array, grid, cfg);
    const auto n_e = static_cast<std::ptrdiff_t>(array.count());
    Matrix out(array.count(), grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n_e; ++j) {
        mean_fibre_value_row(static_cast<std::size_t>(j), p, geom, array, grid, cfg, out);
    }
    return out;
}

namespace reference {

Matrix simulate_potentials(const MotorUnit& mu, const ElectrodeArray& array,
                           const SamplingGrid& grid, const VolumeConductorConfig& cfg) {
    check_inputs(array, grid, cfg);
    mu.validate();
    Matrix out(array.count(), grid.size());
    std::vector<double> scratch;
    for (std::size_t j = 0; j < array.count(); ++j) {
        simulate_row(j, mu, array, grid, cfg, scratch, out);
    }
    return out;
}

MeanFibreField mean_fibre_field(const EstimatedParams& p, const FibreGeometry& geom,
                                const ElectrodeArray& array, const SamplingGrid& grid,
                                const VolumeConductorConfig& cfg) {
    check_inputs(array, grid, cfg);
    MeanFibreField out = make_field(array.count(), grid.size());
    for (std::size_t j = 0; j < array.count(); ++j) {
        mean_fibre_row(j, p, geom, array, grid, cfg, out);
    }
    return out;
}

Matrix mean_fibre_potentials(const EstimatedParams& p, const FibreGeometry& geom,
                             const ElectrodeArray& array, const SamplingGrid& grid,
                             const VolumeConductorConfig& cfg) {
    check_inputs(array, grid, cfg);
    Matrix out(array.count(), grid.size());
    for (std::size_t j = 0; j < array.count(); ++j) {
        mean_fibre_value_row(j, p, geom, array, grid, cfg, out);
    }
    return out;
}

}  // namespace reference

}  // namespace myo

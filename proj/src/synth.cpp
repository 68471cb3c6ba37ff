#include "myo/synth.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "myo/errors.hpp"
#include "myo/kernels.hpp"

namespace myo {

namespace {

constexpr int kMaxRetries = 100;

std::uint64_t stream_index(const SynthConfig& cfg, int mu_index) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cfg.muscle_id)) << 32) |
           static_cast<std::uint32_t>(mu_index);
}

double sample_normal(RngStream& rng, double mean, double stddev) {
    if (stddev == 0.0) return mean;
    std::normal_distribution<double> dist(mean, stddev);
    return dist(rng);
}

}  // namespace

void SynthConfig::validate() const {
    if (n_motor_units_total < 1) throw ConfigError("n_motor_units_total must be positive");
    if (fibres_per_mu.lo < 1 || fibres_per_mu.hi < fibres_per_mu.lo) {
        throw ConfigError("fibres_per_mu range is empty");
    }
    if (!(cv_mean_range.hi >= cv_mean_range.lo) || !(cv_mean_range.lo > 0.0)) {
        throw ConfigError("cv_mean_range must be a non-empty positive interval");
    }
    if (!(cv_std >= 0.0)) throw ConfigError("cv_std must be non-negative");
    for (const auto& r : length_ranges) {
        if (!(r.hi > r.lo) || !(r.lo > 0.0)) throw ConfigError("length range is empty");
    }
    if (length_range_index < 0 || length_range_index > 1) {
        throw ConfigError("length_range_index must be 0 or 1");
    }
    if (!(cross_section_area > 0.0)) throw ConfigError("cross_section_area must be positive");
    if (!(muscle_depth_offset > 0.0)) throw ConfigError("muscle_depth_offset must be positive");
    if (!(iz_centre_window.hi >= iz_centre_window.lo)) throw ConfigError("iz_centre_window is empty");
    if (!(iz_spread_std >= 0.0)) throw ConfigError("iz_spread_std must be non-negative");
}

double SynthConfig::muscle_radius() const {
    return std::sqrt(cross_section_area / std::numbers::pi);
}

ElectrodeArray ArrayConfig::electrodes() const {
    validate();
    return ElectrodeArray::linear(static_cast<std::size_t>(n_electrodes), span);
}

SamplingGrid ArrayConfig::grid() const {
    validate();
    return SamplingGrid::uniform(static_cast<std::size_t>(n_samples), sample_rate);
}

void ArrayConfig::validate() const {
    if (n_electrodes < 3) throw ConfigError("n_electrodes must be at least 3");
    if (!(span > 0.0)) throw ConfigError("array span must be positive");
    if (n_samples < 2) throw ConfigError("n_samples must be at least 2");
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
}

void Recording::validate() const {
    array.validate();
    grid.validate();
    if (voltages.rows() != array.count() || voltages.cols() != grid.size()) {
        throw ShapeError("recording matrix does not match the electrode array and sampling grid");
    }
    if (ground_truth) ground_truth->validate();
}

double motor_unit_cv_mean(const SynthConfig& cfg, int mu_index) {
    if (mu_index < 0 || mu_index >= cfg.n_motor_units_total) {
        throw ConfigError("motor unit index out of range");
    }
    if (cfg.n_motor_units_total == 1) return cfg.cv_mean_range.mid();
    const double frac = static_cast<double>(mu_index) / static_cast<double>(cfg.n_motor_units_total - 1);
    return cfg.cv_mean_range.lo + frac * cfg.cv_mean_range.width();
}

std::vector<int> extracted_motor_unit_indices(const SynthConfig& cfg, int count) {
    if (count < 1 || count > cfg.n_motor_units_total) throw ConfigError("invalid extraction count");
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(count));
    if (count == 1) {
        idx.push_back(cfg.n_motor_units_total / 2);
        return idx;
    }
    const double step = static_cast<double>(cfg.n_motor_units_total - 1) / static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) {
        idx.push_back(static_cast<int>(std::lround(step * i)));
    }
    return idx;
}

MotorUnit generate_motor_unit(const SynthConfig& cfg, int mu_index) {
    cfg.validate();
    const double cv_mean = motor_unit_cv_mean(cfg, mu_index);
    const std::uint64_t key = stream_index(cfg, mu_index);

    RngStream count_rng = derive_stream(cfg.seed, key, "fibre-count");
    std::uniform_int_distribution<int> count_dist(cfg.fibres_per_mu.lo, cfg.fibres_per_mu.hi);
    const int n = count_dist(count_rng);

    RngStream centre_rng = derive_stream(cfg.seed, key, "iz-centre");
    std::uniform_real_distribution<double> centre_dist(cfg.iz_centre_window.lo, cfg.iz_centre_window.hi);
    const double iz_centre = cfg.iz_centre_window.width() > 0.0 ? centre_dist(centre_rng)
                                                                 : cfg.iz_centre_window.lo;

    RngStream cv_rng = derive_stream(cfg.seed, key, "cv");
    RngStream length_rng = derive_stream(cfg.seed, key, "length");
    RngStream iz_rng = derive_stream(cfg.seed, key, "iz");
    RngStream place_rng = derive_stream(cfg.seed, key, "placement");

    const Interval lr = cfg.length_ranges[static_cast<std::size_t>(cfg.length_range_index)];
    const std::array<double, 3> tri_x{lr.lo, lr.mid(), lr.hi};
    const std::array<double, 3> tri_w{0.0, 1.0, 0.0};
    std::piecewise_linear_distribution<double> length_dist(tri_x.begin(), tri_x.end(), tri_w.begin());
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const double radius = cfg.muscle_radius();
    const double centre_depth = cfg.muscle_depth_offset + radius;

    MotorUnit mu;
    mu.fibres.reserve(static_cast<std::size_t>(n));
    for (int f = 0; f < n; ++f) {
        FibreParams p;
        int tries = 0;
        do {
            p.v = sample_normal(cv_rng, cv_mean, cfg.cv_std);
        } while (!(p.v > 0.0) && ++tries < kMaxRetries);
        if (!(p.v > 0.0)) {
            throw ConfigError("could not sample a positive conduction velocity; check cv_mean_range/cv_std");
        }

        p.length = length_dist(length_rng);
        p.z_start = -0.5 * p.length;

        tries = 0;
        do {
            p.iz = sample_normal(iz_rng, iz_centre, cfg.iz_spread_std);
        } while ((p.iz < p.z_start || p.iz > p.z_end()) && ++tries < kMaxRetries);
        if (p.iz < p.z_start || p.iz > p.z_end()) {
            throw ConfigError("could not place the innervation point on the fibre");
        }

        const double r = radius * std::sqrt(unit(place_rng));
        const double theta = 2.0 * std::numbers::pi * unit(place_rng);
        p.depth = centre_depth + r * std::sin(theta);
        p.lateral_offset = r * std::cos(theta);
        mu.fibres.push_back(p);
    }
    return mu;
}

Recording simulate_recording(const MotorUnit& mu, const ArrayConfig& arr,
                             const VolumeConductorConfig& vc) {
    Recording rec{Matrix{}, arr.electrodes(), arr.grid(), mu};
    rec.voltages = simulate_potentials(mu, rec.array, rec.grid, vc);
    return rec;
}

namespace reference {
Recording simulate_recording(const MotorUnit& mu, const ArrayConfig& arr,
                             const VolumeConductorConfig& vc) {
    Recording rec{Matrix{}, arr.electrodes(), arr.grid(), mu};
    rec.voltages = ::myo::reference::simulate_potentials(mu, rec.array, rec.grid, vc);
    return rec;
}
}  // namespace reference

Matrix add_noise_after_dd(const Matrix& dd, double snr_db, RngStream& rng) {
    if (dd.empty()) throw ShapeError("noise requested for an empty matrix");
    if (std::isinf(snr_db) && snr_db > 0.0) return dd;
    if (std::isnan(snr_db)) throw ConfigError("snr_db is NaN");
    Matrix out = dd;
    const double ratio = std::pow(10.0, snr_db / 10.0);
    for (std::size_t j = 0; j < dd.rows(); ++j) {
        double power = 0.0;
        for (double x : dd.row(j)) power += x * x;
        power /= static_cast<double>(dd.cols());
        if (power == 0.0) {
            throw DegenerateInputError("channel " + std::to_string(j) + " is identically zero; SNR undefined");
        }
        std::normal_distribution<double> noise(0.0, std::sqrt(power / ratio));
        for (double& x : out.row(j)) x += noise(rng);
    }
    return out;
}

}  // namespace myo

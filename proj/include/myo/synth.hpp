#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "myo/forward_model.hpp"
#include "myo/matrix.hpp"
#include "myo/rng.hpp"

namespace myo {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct IntRange {
    int lo = 0;
    int hi = 0;
};

struct SynthConfig {
    int n_motor_units_total = 774;
    IntRange fibres_per_mu{315, 3367};
    Interval cv_mean_range{2.5, 5.4};
    double cv_std = 0.22;
    std::array<Interval, 2> length_ranges{{{0.145, 0.155}, {0.185, 0.195}}};
    /// Which of `length_ranges` this muscle uses.
    int length_range_index = 0;
    double cross_section_area = 0.001;
    /// Skin/fat thickness above the muscle cross-section, m.
    double muscle_depth_offset = 0.005;
    /// Window for the per-unit innervation-zone centre, m.
    Interval iz_centre_window{-0.015, 0.015};
    double iz_spread_std = 0.002;
    int muscle_id = 0;
    std::uint64_t seed = 0;

    void validate() const;
    double muscle_radius() const;
};

struct ArrayConfig {
    int n_electrodes = 40;
    double span = 0.195;
    int n_samples = 195;
    double sample_rate = 5000.0;

    double ied() const { return span / static_cast<double>(n_electrodes - 1); }
    double duration() const { return static_cast<double>(n_samples) / sample_rate; }
    ElectrodeArray electrodes() const;
    SamplingGrid grid() const;
    void validate() const;
};

struct Recording {
    Matrix voltages;  ///< n_E x k
    ElectrodeArray array;
    SamplingGrid grid;
    std::optional<MotorUnit> ground_truth;

    void validate() const;
};

/// Mean conduction velocity assigned to unit `mu_index` of the muscle
/// (linear over cv_mean_range across all units).
double motor_unit_cv_mean(const SynthConfig& cfg, int mu_index);

/// Indices of `count` units whose mean conduction velocities are evenly
/// spaced over cv_mean_range.
std::vector<int> extracted_motor_unit_indices(const SynthConfig& cfg, int count = 8);

/// Samples one motor unit. Deterministic in (cfg.seed, cfg.muscle_id, mu_index).
MotorUnit generate_motor_unit(const SynthConfig& cfg, int mu_index);

/// Noiseless monopolar recording of `mu` (OpenMP kernel).
Recording simulate_recording(const MotorUnit& mu, const ArrayConfig& arr,
                             const VolumeConductorConfig& vc);

namespace reference {
Recording simulate_recording(const MotorUnit& mu, const ArrayConfig& arr,
                             const VolumeConductorConfig& vc);
}

/// Sentinel SNR meaning "no noise".
inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Adds zero-mean Gaussian noise to each channel of a double-difference
/// matrix so that channel power / noise variance equals 10^(snr_db/10).
Matrix add_noise_after_dd(const Matrix& dd, double snr_db, RngStream& rng);

}  // namespace myo

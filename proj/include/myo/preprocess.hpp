#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "myo/matrix.hpp"
#include "myo/rng.hpp"

namespace myo {

/// Second spatial difference along the electrode axis:
/// row j = psi[j+2] - 2 psi[j+1] + psi[j]. Output has n_E - 2 rows.
Matrix double_differences(const Matrix& psi);

struct BandpassConfig {
    int order = 8;          ///< total band-pass order (even); prototype order is order/2
    double low_hz = 4.0;
    double high_hz = 400.0;
};

/// Transposed direct-form II biquad.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

/// Digital Butterworth band-pass as a cascade of second-order sections,
/// designed by bilinear transform with pre-warped band edges.
class ButterworthBandpass {
public:
    ButterworthBandpass(const BandpassConfig& cfg, double sample_rate);

    const std::vector<Biquad>& sections() const { return sections_; }
    int order() const { return order_; }
    std::complex<double> response(double hz) const;

    /// Single causal pass with steady-state initial conditions scaled by x[0].
    std::vector<double> filter(std::span<const double> x) const;
    /// Forward-backward (zero-phase) pass with even padding of 3*order samples.
    std::vector<double> filtfilt(std::span<const double> x) const;

private:
    std::vector<Biquad> sections_;
    int order_;
    double sample_rate_;
};

/// Zero-phase band-pass applied per channel (rows).
Matrix bandpass_filter(const Matrix& signal, double sample_rate, const BandpassConfig& cfg = {});

inline constexpr double kMinMaxEpsilon = 1e-15;

struct PreprocessedRecording {
    Matrix m;  ///< (n_E - 2) x k, values in [0, 1]
    std::vector<double> channel_min;
    std::vector<double> channel_max;
};

/// Per-channel (x - min) / (max - min); channels with range below
/// kMinMaxEpsilon map to 0.5.
PreprocessedRecording minmax_scale(const Matrix& signal);

struct PreprocessConfig {
    BandpassConfig filter;
    bool apply_filter = true;
    double snr_db = std::numeric_limits<double>::infinity();  ///< noise added after DD
};

/// Double differences, optional noise, band-pass, min-max, in that order.
/// `noise_rng` is required when cfg.snr_db is finite.
PreprocessedRecording preprocess(const Matrix& monopolar, double sample_rate,
                                 const PreprocessConfig& cfg = {}, RngStream* noise_rng = nullptr);

}  // namespace myo

#include "myo/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "myo/errors.hpp"
#include "myo/synth.hpp"

namespace myo {

Matrix double_differences(const Matrix& psi) {
    if (psi.rows() < 3) throw ShapeError("double differences need at least 3 channels");
    Matrix out(psi.rows() - 2, psi.cols());
    for (std::size_t j = 0; j < out.rows(); ++j) {
        const auto a = psi.row(j);
        const auto b = psi.row(j + 1);
        const auto c = psi.row(j + 2);
        auto o = out.row(j);
        for (std::size_t i = 0; i < psi.cols(); ++i) o[i] = c[i] - 2.0 * b[i] + a[i];
    }
    return out;
}

namespace {

using cplx = std::complex<double>;

std::complex<double> biquad_response(const Biquad& s, double omega) {
    const cplx z1 = std::polar(1.0, -omega);
    const cplx z2 = z1 * z1;
    return (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
}

}  // namespace

ButterworthBandpass::ButterworthBandpass(const BandpassConfig& cfg, double sample_rate)
    : order_(cfg.order), sample_rate_(sample_rate) {
    if (cfg.order < 2 || cfg.order % 2 != 0) throw ConfigError("band-pass order must be even and >= 2");
    if (!(cfg.low_hz > 0.0) || !(cfg.high_hz > cfg.low_hz)) {
        throw ConfigError("band-pass edges must satisfy 0 < low < high");
    }
    if (!(sample_rate > 2.0 * cfg.high_hz)) {
        throw ConfigError("sample rate must exceed twice the upper band edge");
    }
    const int n = cfg.order / 2;
    const double fs2 = 2.0 * sample_rate;
    const double w1 = fs2 * std::tan(std::numbers::pi * cfg.low_hz / sample_rate);
    const double w2 = fs2 * std::tan(std::numbers::pi * cfg.high_hz / sample_rate);
    const double bw = w2 - w1;
    const double w0sq = w1 * w2;

    std::vector<cplx> upper;  // digital poles with positive imaginary part
    std::vector<double> real_poles;
    for (int k = 0; k < n; ++k) {
        const double theta = std::numbers::pi * (2.0 * k + 1.0 + n) / (2.0 * n);
        const cplx proto = std::polar(1.0, theta);
        const cplx a = proto * (0.5 * bw);
        const cplx d = std::sqrt(a * a - w0sq);
        for (const cplx s : {a + d, a - d}) {
            const cplx z = (fs2 + s) / (fs2 - s);
            if (std::abs(z.imag()) <= 1e-14 * std::abs(z)) {
                real_poles.push_back(z.real());
            } else if (z.imag() > 0.0) {
                upper.push_back(z);
            }
        }
    }
    std::sort(real_poles.begin(), real_poles.end());
    for (const cplx& z : upper) sections_.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
    for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
        const double p = real_poles[i], q = real_poles[i + 1];
        sections_.push_back({1.0, 0.0, -1.0, -(p + q), p * q});
    }
    if (static_cast<int>(sections_.size()) != n) {
        throw ConfigError("band-pass design produced an unexpected number of sections");
    }

    // Unit gain per section at the centre frequency, where the analog
    // Butterworth response is exactly 1.
    const double omega0 = 2.0 * std::atan(std::sqrt(w0sq) / fs2);
    for (auto& s : sections_) {
        const double g = std::abs(biquad_response(s, omega0));
        s.b0 /= g;
        s.b1 /= g;
        s.b2 /= g;
    }
}

std::complex<double> ButterworthBandpass::response(double hz) const {
    const double omega = 2.0 * std::numbers::pi * hz / sample_rate_;
    cplx h = 1.0;
    for (const auto& s : sections_) h *= biquad_response(s, omega);
    return h;
}

std::vector<double> ButterworthBandpass::filter(std::span<const double> x) const {
    std::vector<double> y(x.begin(), x.end());
    if (y.empty()) return y;
    double level = x.front();
    for (const auto& s : sections_) {
        const double dc = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
        double z2 = (s.b2 - s.a2 * dc) * level;
        double z1 = (s.b1 - s.a1 * dc) * level + z2;
        level *= dc;
        for (double& v : y) {
            const double in = v;
            const double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
    }
    return y;
}

std::vector<double> ButterworthBandpass::filtfilt(std::span<const double> x) const {
    const std::size_t n = x.size();
    if (n < 2) throw ShapeError("zero-phase filtering needs at least 2 samples");
    const std::size_t pad = std::min<std::size_t>(3 * static_cast<std::size_t>(order_), n - 1);

    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(x[n - 1 - i]);

    std::vector<double> y = filter(ext);
    std::reverse(y.begin(), y.end());
    y = filter(y);
    std::reverse(y.begin(), y.end());
    return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

Matrix bandpass_filter(const Matrix& signal, double sample_rate, const BandpassConfig& cfg) {
    const ButterworthBandpass bp(cfg, sample_rate);
    Matrix out(signal.rows(), signal.cols());
    const auto rows = static_cast<std::ptrdiff_t>(signal.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < rows; ++j) {
        const auto filtered = bp.filtfilt(signal.row(static_cast<std::size_t>(j)));
        std::copy(filtered.begin(), filtered.end(), out.row(static_cast<std::size_t>(j)).begin());
    }
    return out;
}

PreprocessedRecording minmax_scale(const Matrix& signal) {
    PreprocessedRecording out{Matrix(signal.rows(), signal.cols()), {}, {}};
    out.channel_min.resize(signal.rows());
    out.channel_max.resize(signal.rows());
    for (std::size_t j = 0; j < signal.rows(); ++j) {
        const auto row = signal.row(j);
        const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
        const double mn = row.empty() ? 0.0 : *lo;
        const double mx = row.empty() ? 0.0 : *hi;
        out.channel_min[j] = mn;
        out.channel_max[j] = mx;
        auto o = out.m.row(j);
        const double range = mx - mn;
        if (range < kMinMaxEpsilon) {
            std::fill(o.begin(), o.end(), 0.5);
            continue;
        }
        for (std::size_t i = 0; i < row.size(); ++i) o[i] = (row[i] - mn) / range;
    }
    return out;
}

PreprocessedRecording preprocess(const Matrix& monopolar, double sample_rate,
                                 const PreprocessConfig& cfg, RngStream* noise_rng) {
    Matrix dd = double_differences(monopolar);
    if (!(std::isinf(cfg.snr_db) && cfg.snr_db > 0.0)) {
        if (noise_rng == nullptr) throw ConfigError("noise requested without a random stream");
        dd = add_noise_after_dd(dd, cfg.snr_db, *noise_rng);
    }
    if (cfg.apply_filter) dd = bandpass_filter(dd, sample_rate, cfg.filter);
    return minmax_scale(dd);
}

}  // namespace myo

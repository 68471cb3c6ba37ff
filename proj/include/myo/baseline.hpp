#pragma once

// Clustering-based innervation-zone estimator used as the comparison method:
// per-channel arrival times from a Mexican-hat wavelet ridge, propagation
// lines traced back on either side of the earliest channel, their
// intersections as candidate innervation points, and DBSCAN over candidates.

#include <cstddef>
#include <span>
#include <vector>

#include "myo/matrix.hpp"
#include "myo/synth.hpp"

namespace myo {

struct BaselineConfig {
    /// Signed wavelet scale in seconds; the magnitude sets the Mexican-hat
    /// width, the sign is carried through unchanged for provenance.
    double wavelet_width = -0.00391667;
    double dbscan_eps = 1.10083333;  ///< in mm after time is scaled by ref_cv
    int dbscan_min_points = 3;       ///< neighbourhood size including the point itself
    double ref_cv = 5.0;             ///< m/s, converts ms to mm before clustering
    /// Channels whose ridge magnitude is below this fraction of the strongest
    /// channel are treated as having no confident arrival.
    double ridge_threshold = 0.1;
    int window = 3;  ///< channels per local propagation line
    /// Arrivals off the robust per-side line by more than max(3 robust sigmas,
    /// this many seconds) are dropped before fitting.
    double arrival_tolerance = 0.4e-3;

    void validate() const;
};

struct Arrival {
    std::size_t channel = 0;
    double time = 0.0;  ///< s
};

/// Line t = intercept + slope * z in (position m, time s) space.
struct Line {
    double intercept = 0.0;
    double slope = 0.0;
};

struct LinePair {
    Line left;
    Line right;
};

struct Candidate {
    double z = 0.0;  ///< m
    double t = 0.0;  ///< s
};

struct CandidateSet {
    std::vector<Candidate> points;
    std::size_t skipped_parallel = 0;
};

struct ClusterResult {
    double iz = 0.0;  ///< m, centroid of the largest cluster
    std::size_t n_clustered = 0;
    std::vector<int> labels;  ///< canonical labels per input point, -1 = noise
};

struct BaselineResult {
    double iz_estimate = 0.0;  ///< m
    std::size_t n_candidates = 0;
    std::size_t n_clustered = 0;
};

/// Mexican-hat response of one channel at scale `scale_samples`.
std::vector<double> mexican_hat_cwt(std::span<const double> x, double scale_samples);

std::vector<Arrival> detect_arrival_times(const Matrix& channels, double sample_rate,
                                          const BaselineConfig& cfg);

/// Least-squares lines through (position, arrival) on each side of the
/// earliest-arrival channel (which itself is excluded). The apex is the
/// minimum of a 3-point running median over channels; off-track arrivals on
/// each side are dropped against a Theil-Sen line first.
LinePair fit_propagation_lines(std::span<const Arrival> arrivals, std::span<const double> positions,
                               const BaselineConfig& cfg = {});

CandidateSet intersect_candidates(std::span<const LinePair> pairs);

/// Line pairs from sliding windows of `cfg.window` channels on each side of
/// the earliest channel, pairing windows at equal or adjacent offsets.
std::vector<LinePair> windowed_line_pairs(std::span<const Arrival> arrivals,
                                          std::span<const double> positions, const BaselineConfig& cfg);

/// DBSCAN in (z mm, t ms * ref_cv) space; labels are canonical (clusters
/// ordered by size, then leftmost member) and independent of input order.
ClusterResult cluster_centre(std::span<const Candidate> candidates, const BaselineConfig& cfg);

/// Full pipeline on a double-difference (or preprocessed) matrix whose
/// channel j sits at positions[j].
BaselineResult estimate_iz_baseline(const Matrix& channels, std::span<const double> positions,
                                    double sample_rate, const BaselineConfig& cfg);

/// Convenience: double differences of a monopolar recording, then the above.
BaselineResult estimate_iz_baseline(const Recording& rec, const BaselineConfig& cfg);

/// Axial positions of double-difference channels (centre electrode of each triple).
std::vector<double> dd_channel_positions(const ElectrodeArray& array);

}  // namespace myo

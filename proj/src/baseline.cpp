#include "myo/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "myo/errors.hpp"
#include "myo/preprocess.hpp"

namespace myo {

void BaselineConfig::validate() const {
    if (!(wavelet_width != 0.0) || !std::isfinite(wavelet_width)) {
        throw ConfigError("wavelet_width must be finite and non-zero");
    }
    if (!(dbscan_eps > 0.0)) throw ConfigError("dbscan_eps must be positive");
    if (dbscan_min_points < 1) throw ConfigError("dbscan_min_points must be at least 1");
    if (!(ref_cv > 0.0)) throw ConfigError("ref_cv must be positive");
    if (!(ridge_threshold >= 0.0 && ridge_threshold < 1.0)) {
        throw ConfigError("ridge_threshold must be in [0, 1)");
    }
    if (window < 2) throw ConfigError("window must be at least 2 channels");
    if (!(arrival_tolerance >= 0.0)) throw ConfigError("arrival_tolerance must be non-negative");
}

std::vector<double> mexican_hat_cwt(std::span<const double> x, double scale_samples) {
    if (!(scale_samples > 0.0)) throw ConfigError("wavelet scale must be positive");
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const auto half = static_cast<std::ptrdiff_t>(std::ceil(5.0 * scale_samples));
    std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
        const double u = static_cast<double>(k) / scale_samples;
        kernel[static_cast<std::size_t>(k + half)] = (1.0 - u * u) * std::exp(-0.5 * u * u);
    }
    const double norm = 1.0 / std::sqrt(scale_samples);
    std::vector<double> out(x.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double s = 0.0;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
        for (std::ptrdiff_t k = lo; k <= hi; ++k) {
            s += x[static_cast<std::size_t>(k)] * kernel[static_cast<std::size_t>(k - i + half)];
        }
        out[static_cast<std::size_t>(i)] = s * norm;
    }
    return out;
}

namespace {

double median_of(std::span<const double> x) {
    std::vector<double> v(x.begin(), x.end());
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

Line least_squares(std::span<const double> z, std::span<const double> t) {
    const double n = static_cast<double>(z.size());
    const double zm = std::accumulate(z.begin(), z.end(), 0.0) / n;
    const double tm = std::accumulate(t.begin(), t.end(), 0.0) / n;
    double szz = 0.0, szt = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        szz += (z[i] - zm) * (z[i] - zm);
        szt += (z[i] - zm) * (t[i] - tm);
    }
    const double slope = szt / szz;
    return {tm - slope * zm, slope};
}

struct Sides {
    std::vector<Arrival> left;   ///< nearest to the earliest channel first
    std::vector<Arrival> right;
};

// Earliest channel after a 3-point running median over the arrival sequence,
// so an isolated spurious early ridge cannot become the apex.
std::size_t apex_index(std::span<const Arrival> arrivals) {
    const std::size_t n = arrivals.size();
    std::size_t best = 0;
    double best_t = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        double t = arrivals[i].time;
        if (i > 0 && i + 1 < n) {
            double w[3] = {arrivals[i - 1].time, arrivals[i].time, arrivals[i + 1].time};
            std::sort(w, w + 3);
            t = w[1];
        }
        if (t < best_t || (t == best_t && arrivals[i].time < arrivals[best].time)) {
            best_t = t;
            best = i;
        }
    }
    return best;
}

// Drops arrivals inconsistent with a Theil-Sen line through the side:
// residual above 3 robust sigmas, floored at `floor_s`.
void reject_outliers(std::vector<Arrival>& side, std::span<const double> positions, double floor_s) {
    if (side.size() < 3) return;
    std::vector<double> slopes;
    for (std::size_t i = 0; i < side.size(); ++i) {
        for (std::size_t k = i + 1; k < side.size(); ++k) {
            const double dz = positions[side[k].channel] - positions[side[i].channel];
            if (dz != 0.0) slopes.push_back((side[k].time - side[i].time) / dz);
        }
    }
    if (slopes.empty()) return;
    const double b = median_of(slopes);
    std::vector<double> icpt;
    for (const auto& a : side) icpt.push_back(a.time - b * positions[a.channel]);
    const double a0 = median_of(icpt);
    std::vector<double> res;
    for (const auto& a : side) res.push_back(std::abs(a.time - a0 - b * positions[a.channel]));
    const double tol = std::max(3.0 * 1.4826 * median_of(res), floor_s);
    std::vector<Arrival> kept;
    for (std::size_t i = 0; i < side.size(); ++i) {
        if (res[i] <= tol) kept.push_back(side[i]);
    }
    side = std::move(kept);
}

Sides split_at_earliest(std::span<const Arrival> arrivals, std::span<const double> positions,
                        double floor_s) {
    if (arrivals.empty()) throw BaselineError(BaselineError::Kind::insufficient_signal, "no arrivals");
    for (const auto& a : arrivals) {
        if (a.channel >= positions.size()) throw ShapeError("arrival channel has no position");
    }
    std::vector<Arrival> sorted(arrivals.begin(), arrivals.end());
    std::sort(sorted.begin(), sorted.end(), [](const Arrival& a, const Arrival& b) { return a.channel < b.channel; });
    const std::size_t apex = sorted[apex_index(sorted)].channel;
    Sides s;
    for (const auto& a : sorted) {
        if (a.channel < apex) s.left.push_back(a);
        if (a.channel > apex) s.right.push_back(a);
    }
    std::reverse(s.left.begin(), s.left.end());
    reject_outliers(s.left, positions, floor_s);
    reject_outliers(s.right, positions, floor_s);
    return s;
}

Line fit(std::span<const Arrival> pts, std::span<const double> positions) {
    std::vector<double> z, t;
    for (const auto& a : pts) {
        if (a.channel >= positions.size()) throw ShapeError("arrival channel has no position");
        z.push_back(positions[a.channel]);
        t.push_back(a.time);
    }
    return least_squares(z, t);
}

}  // namespace

std::vector<Arrival> detect_arrival_times(const Matrix& channels, double sample_rate,
                                          const BaselineConfig& cfg) {
    cfg.validate();
    if (channels.rows() < 3) throw ShapeError("arrival detection needs at least 3 channels");
    const double scale = std::abs(cfg.wavelet_width) * sample_rate;

    std::vector<double> peak_mag(channels.rows(), 0.0);
    std::vector<double> peak_pos(channels.rows(), 0.0);
    for (std::size_t j = 0; j < channels.rows(); ++j) {
        const auto row = channels.row(j);
        const double base = median_of(row);
        std::vector<double> centred(row.begin(), row.end());
        for (double& v : centred) v -= base;
        const std::vector<double> w = mexican_hat_cwt(centred, scale);
        std::size_t best = 0;
        for (std::size_t i = 1; i < w.size(); ++i) {
            if (std::abs(w[i]) > std::abs(w[best])) best = i;
        }
        double pos = static_cast<double>(best);
        if (best > 0 && best + 1 < w.size()) {
            const double a = std::abs(w[best - 1]), b = std::abs(w[best]), c = std::abs(w[best + 1]);
            const double denom = a - 2.0 * b + c;
            if (denom < 0.0) pos += 0.5 * (a - c) / denom;
        }
        peak_mag[j] = std::abs(w[best]);
        peak_pos[j] = pos;
    }
    const double strongest = *std::max_element(peak_mag.begin(), peak_mag.end());
    std::vector<Arrival> out;
    if (strongest > 0.0) {
        for (std::size_t j = 0; j < channels.rows(); ++j) {
            if (peak_mag[j] > 0.0 && peak_mag[j] >= cfg.ridge_threshold * strongest) {
                out.push_back({j, peak_pos[j] / sample_rate});
            }
        }
    }
    if (out.size() < 3) {
        throw BaselineError(BaselineError::Kind::insufficient_signal,
                            "fewer than 3 channels show a confident wavelet ridge");
    }
    return out;
}

LinePair fit_propagation_lines(std::span<const Arrival> arrivals, std::span<const double> positions,
                               const BaselineConfig& cfg) {
    cfg.validate();
    const Sides s = split_at_earliest(arrivals, positions, cfg.arrival_tolerance);
    if (s.left.size() < 2 || s.right.size() < 2) {
        throw BaselineError(BaselineError::Kind::one_sided_data,
                            "need at least two arrivals on each side of the earliest channel");
    }
    LinePair p{fit(s.left, positions), fit(s.right, positions)};
    if (!(p.left.slope < 0.0 && p.right.slope > 0.0)) {
        throw BaselineError(BaselineError::Kind::non_propagating,
                            "fitted propagation lines do not diverge from the earliest channel");
    }
    return p;
}

CandidateSet intersect_candidates(std::span<const LinePair> pairs) {
    CandidateSet out;
    for (const auto& p : pairs) {
        const double ds = p.right.slope - p.left.slope;
        const double scale = std::max(std::abs(p.left.slope), std::abs(p.right.slope));
        if (!(std::abs(ds) > 1e-12 * scale)) {
            ++out.skipped_parallel;
            continue;
        }
        const double z = (p.left.intercept - p.right.intercept) / ds;
        out.points.push_back({z, p.left.intercept + p.left.slope * z});
    }
    return out;
}

std::vector<LinePair> windowed_line_pairs(std::span<const Arrival> arrivals,
                                          std::span<const double> positions, const BaselineConfig& cfg) {
    cfg.validate();
    const Sides s = split_at_earliest(arrivals, positions, cfg.arrival_tolerance);
    const auto w = static_cast<std::size_t>(cfg.window);
    std::vector<Line> left, right;
    for (std::size_t o = 0; o + w <= s.left.size(); ++o) {
        left.push_back(fit(std::span<const Arrival>(s.left).subspan(o, w), positions));
    }
    for (std::size_t o = 0; o + w <= s.right.size(); ++o) {
        right.push_back(fit(std::span<const Arrival>(s.right).subspan(o, w), positions));
    }
    std::vector<LinePair> pairs;
    for (std::size_t a = 0; a < left.size(); ++a) {
        for (std::size_t b = 0; b < right.size(); ++b) {
            const std::size_t gap = a > b ? a - b : b - a;
            if (gap > 1) continue;
            if (left[a].slope < 0.0 && right[b].slope > 0.0) pairs.push_back({left[a], right[b]});
        }
    }
    return pairs;
}

ClusterResult cluster_centre(std::span<const Candidate> candidates, const BaselineConfig& cfg) {
    cfg.validate();
    const std::size_t n = candidates.size();
    const auto min_pts = static_cast<std::size_t>(cfg.dbscan_min_points);
    if (n < min_pts) {
        throw BaselineError(BaselineError::Kind::no_cluster, "fewer candidates than dbscan_min_points");
    }
    // Both axes in mm: z directly, t via ms * ref_cv.
    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
        px[i] = candidates[i].z * 1e3;
        py[i] = candidates[i].t * 1e3 * cfg.ref_cv;
    }
    auto dist = [&](std::size_t a, std::size_t b) { return std::hypot(px[a] - px[b], py[a] - py[b]); };

    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        for (std::size_t k = 0; k < n; ++k) count += dist(i, k) <= cfg.dbscan_eps ? 1 : 0;
        core[i] = count >= min_pts;
    }

    // Connected components of core points.
    std::vector<int> comp(n, -1);
    int n_comp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i] || comp[i] >= 0) continue;
        std::vector<std::size_t> stack{i};
        comp[i] = n_comp;
        while (!stack.empty()) {
            const std::size_t a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < n; ++b) {
                if (core[b] && comp[b] < 0 && dist(a, b) <= cfg.dbscan_eps) {
                    comp[b] = n_comp;
                    stack.push_back(b);
                }
            }
        }
        ++n_comp;
    }
    if (n_comp == 0) throw BaselineError(BaselineError::Kind::no_cluster, "every candidate is noise");

    // Border points join the component of their nearest core point.
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        double best = cfg.dbscan_eps;
        int label = -1;
        for (std::size_t k = 0; k < n; ++k) {
            if (!core[k]) continue;
            const double d = dist(i, k);
            if (d < best || (d == best && label >= 0 && comp[k] < label)) {
                best = d;
                label = comp[k];
            } else if (d == best && label < 0) {
                label = comp[k];
            }
        }
        comp[i] = label;
    }

    struct Key {
        std::size_t size = 0;
        double min_z = 0.0, min_t = 0.0;
    };
    std::vector<Key> keys(static_cast<std::size_t>(n_comp), Key{0, INFINITY, INFINITY});
    for (std::size_t i = 0; i < n; ++i) {
        if (comp[i] < 0) continue;
        Key& k = keys[static_cast<std::size_t>(comp[i])];
        ++k.size;
        if (px[i] < k.min_z || (px[i] == k.min_z && py[i] < k.min_t)) {
            k.min_z = px[i];
            k.min_t = py[i];
        }
    }
    std::vector<int> order(static_cast<std::size_t>(n_comp));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Key& ka = keys[static_cast<std::size_t>(a)];
        const Key& kb = keys[static_cast<std::size_t>(b)];
        return std::tie(kb.size, ka.min_z, ka.min_t) < std::tie(ka.size, kb.min_z, kb.min_t);
    });
    std::vector<int> canonical(static_cast<std::size_t>(n_comp));
    for (std::size_t r = 0; r < order.size(); ++r) canonical[static_cast<std::size_t>(order[r])] = static_cast<int>(r);

    ClusterResult res;
    res.labels.resize(n);
    double sum_z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        res.labels[i] = comp[i] < 0 ? -1 : canonical[static_cast<std::size_t>(comp[i])];
        if (res.labels[i] == 0) {
            sum_z += candidates[i].z;
            ++res.n_clustered;
        }
    }
    res.iz = sum_z / static_cast<double>(res.n_clustered);
    return res;
}

BaselineResult estimate_iz_baseline(const Matrix& channels, std::span<const double> positions,
                                    double sample_rate, const BaselineConfig& cfg) {
    if (positions.size() != channels.rows()) throw ShapeError("one position per channel required");
    const std::vector<Arrival> arrivals = detect_arrival_times(channels, sample_rate, cfg);
    std::vector<LinePair> pairs = windowed_line_pairs(arrivals, positions, cfg);
    pairs.push_back(fit_propagation_lines(arrivals, positions, cfg));
    const CandidateSet cands = intersect_candidates(pairs);
    const ClusterResult cl = cluster_centre(cands.points, cfg);
    return {cl.iz, cands.points.size(), cl.n_clustered};
}

BaselineResult estimate_iz_baseline(const Recording& rec, const BaselineConfig& cfg) {
    rec.validate();
    const Matrix dd = double_differences(rec.voltages);
    const std::vector<double> pos = dd_channel_positions(rec.array);
    return estimate_iz_baseline(dd, pos, rec.grid.sample_rate, cfg);
}

std::vector<double> dd_channel_positions(const ElectrodeArray& array) {
    if (array.count() < 3) throw ShapeError("double differences need at least 3 electrodes");
    std::vector<double> pos;
    for (std::size_t j = 1; j + 1 < array.count(); ++j) pos.push_back(array.positions[j].axial);
    return pos;
}

}  // namespace myo

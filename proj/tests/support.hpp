#pragma once

// Helpers shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>

#include "myo/decoder.hpp"
#include "myo/forward_model.hpp"
#include "myo/matrix.hpp"
#include "myo/synth.hpp"

namespace myo::test {

/// |a - b| / max(|a|, |b|, floor).
inline double rel_err(double a, double b, double floor = 1e-300) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double max_abs(const Matrix& m) {
    double r = 0.0;
    for (double v : m.flat()) r = std::max(r, std::abs(v));
    return r;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a.flat()[i] - b.flat()[i]));
    return r;
}

/// Fibre spanning the array centre with its innervation point at `iz`.
inline FibreParams centred_fibre(double iz, double v, double depth = 0.01) {
    return {iz, v, 0.15, depth, 0.0, -0.075};
}

inline DecoderContext default_context(const FibreGeometry& geom = {}) {
    const ArrayConfig arr;
    return {arr.electrodes(), arr.grid(), geom, VolumeConductorConfig{}};
}

}  // namespace myo::test

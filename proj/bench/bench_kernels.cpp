// Wall-clock comparison of the OpenMP kernels against their serial references.
// Both paths must agree bitwise; a mismatch exits non-zero.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include <omp.h>

#include "myo/decoder.hpp"
#include "myo/evaluation.hpp"
#include "myo/preprocess.hpp"
#include "myo/synth.hpp"

using namespace myo;

namespace {

/// Mean over `reps` runs after one warm-up, in milliseconds.
double time_ms(const std::function<void()>& f, int reps) {
    f();
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
    return dt.count() / reps;
}

bool same(const Matrix& a, const Matrix& b) { return std::ranges::equal(a.flat(), b.flat()); }

void report(const char* name, double parallel, double serial, bool identical) {
    std::printf("%-22s openmp %10.3f ms   serial %10.3f ms   speedup %5.2fx   %s\n", name, parallel, serial,
                serial / parallel, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::stoi(argv[1]) : 3;
    std::printf("threads: %d, repetitions: %d\n", omp_get_max_threads(), reps);

    SynthConfig synth;
    synth.seed = 7;
    const MotorUnit mu = generate_motor_unit(synth, 400);
    const ArrayConfig arr;
    const VolumeConductorConfig vc;
    bool ok = true;

    {
        Recording a, b;
        const double p = time_ms([&] { a = simulate_recording(mu, arr, vc); }, reps);
        const double s = time_ms([&] { b = reference::simulate_recording(mu, arr, vc); }, reps);
        const bool id = same(a.voltages, b.voltages);
        ok = ok && id;
        report("simulate_recording", p, s, id);
    }

    const DecoderContext ctx{arr.electrodes(), arr.grid(), FibreGeometry{}, vc};
    const EstimatedParams est{0.003, 4.2};
    {
        DecoderOutput a, b;
        const double p = time_ms([&] { a = decode(est, ctx); }, reps * 20);
        const double s = time_ms([&] { b = reference::decode(est, ctx); }, reps * 20);
        const bool id = same(a.n, b.n) && same(a.dn_diz, b.dn_diz) && same(a.dn_dv, b.dn_dv);
        ok = ok && id;
        report("decode", p, s, id);
    }

    {
        const Matrix m = minmax_scale(decode_value(est, ctx)).m;
        LandscapeGrid grid;
        grid.iz = {-0.01, 0.01};
        grid.iz_step = 0.001;
        grid.v = {3.5, 5.0};
        grid.v_step = 0.1;
        Landscape a, b;
        const double p = time_ms([&] { a = loss_landscape(m, ctx, grid, LossWeights{}); }, reps);
        const double s = time_ms([&] { b = reference::loss_landscape(m, ctx, grid, LossWeights{}); }, reps);
        bool id = a.values.size() == b.values.size() && a.argmin_combined == b.argmin_combined;
        for (std::size_t i = 0; id && i < a.values.size(); ++i) id = a.values[i].combined == b.values[i].combined;
        ok = ok && id;
        report("loss_landscape", p, s, id);
    }
    return ok ? 0 : 1;
}

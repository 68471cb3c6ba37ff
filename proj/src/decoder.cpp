#include "myo/decoder.hpp"

#include "myo/kernels.hpp"
#include "myo/preprocess.hpp"

namespace myo {

namespace {

DecoderOutput scale_with_sensitivities(const MeanFibreField& field) {
    const Matrix dd = double_differences(field.value);
    const Matrix dd_iz = double_differences(field.d_iz);
    const Matrix dd_v = double_differences(field.d_v);

    DecoderOutput out{Matrix(dd.rows(), dd.cols()), Matrix(dd.rows(), dd.cols()),
                      Matrix(dd.rows(), dd.cols()), std::vector<std::size_t>(dd.rows()),
                      std::vector<std::size_t>(dd.rows())};
    for (std::size_t j = 0; j < dd.rows(); ++j) {
        const auto x = dd.row(j);
        std::size_t lo = 0, hi = 0;
        for (std::size_t i = 1; i < x.size(); ++i) {
            if (x[i] < x[lo]) lo = i;
            if (x[i] > x[hi]) hi = i;
        }
        out.argmin[j] = lo;
        out.argmax[j] = hi;
        const double range = x[hi] - x[lo];
        auto n = out.n.row(j);
        auto g_iz = out.dn_diz.row(j);
        auto g_v = out.dn_dv.row(j);
        if (range < kMinMaxEpsilon) {
            std::fill(n.begin(), n.end(), 0.5);
            continue;  // sensitivities stay zero
        }
        const double inv = 1.0 / range;
        const auto xi = dd_iz.row(j);
        const auto xv = dd_v.row(j);
        const double dr_iz = xi[hi] - xi[lo];
        const double dr_v = xv[hi] - xv[lo];
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double y = (x[i] - x[lo]) * inv;
            n[i] = y;
            g_iz[i] = ((xi[i] - xi[lo]) - y * dr_iz) * inv;
            g_v[i] = ((xv[i] - xv[lo]) - y * dr_v) * inv;
        }
    }
    return out;
}

}  // namespace

DecoderOutput decode(const EstimatedParams& p, const DecoderContext& ctx) {
    return scale_with_sensitivities(
        mean_fibre_field(p, ctx.geometry, ctx.array, ctx.grid, ctx.conductor));
}

Matrix decode_value(const EstimatedParams& p, const DecoderContext& ctx) {
    return minmax_scale(double_differences(
                            mean_fibre_potentials(p, ctx.geometry, ctx.array, ctx.grid, ctx.conductor)))
        .m;
}

namespace reference {

DecoderOutput decode(const EstimatedParams& p, const DecoderContext& ctx) {
    return scale_with_sensitivities(
        ::myo::reference::mean_fibre_field(p, ctx.geometry, ctx.array, ctx.grid, ctx.conductor));
}

Matrix decode_value(const EstimatedParams& p, const DecoderContext& ctx) {
    return minmax_scale(double_differences(::myo::reference::mean_fibre_potentials(
                            p, ctx.geometry, ctx.array, ctx.grid, ctx.conductor)))
        .m;
}

}  // namespace reference

}  // namespace myo

#pragma once

#include <vector>

#include "myo/forward_model.hpp"
#include "myo/matrix.hpp"

namespace myo {

/// Everything the decoder needs besides the estimated parameters.
struct DecoderContext {
    ElectrodeArray array;
    SamplingGrid grid;
    FibreGeometry geometry;
    VolumeConductorConfig conductor;
};

struct DecoderOutput {
    Matrix n;       ///< scaled double differences, (n_E - 2) x k, in [0, 1]
    Matrix dn_diz;  ///< dN/d iz_hat
    Matrix dn_dv;   ///< dN/d v_hat
    std::vector<std::size_t> argmin;  ///< per-channel sample index of the minimum
    std::vector<std::size_t> argmax;
};

/// Mean-fibre forward model, double differences and per-channel min-max
/// scaling, with sensitivities propagated through all three steps. The
/// min-max step treats the extremal sample indices as fixed.
DecoderOutput decode(const EstimatedParams& p, const DecoderContext& ctx);

/// Value-only decode (no sensitivities).
Matrix decode_value(const EstimatedParams& p, const DecoderContext& ctx);

namespace reference {
DecoderOutput decode(const EstimatedParams& p, const DecoderContext& ctx);
Matrix decode_value(const EstimatedParams& p, const DecoderContext& ctx);
}  // namespace reference

}  // namespace myo

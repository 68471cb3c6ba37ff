#pragma once

#include "myo/matrix.hpp"

namespace myo {

struct LossWeights {
    double mse = 0.875;  ///< lambda_1
    double cc = 0.125;   ///< lambda_2
    void validate() const;
};

struct LossBreakdown {
    double mse = 0.0;
    double cc = 0.0;
    double combined = 0.0;
};

/// (1/(k m)) * sum (N - M)^2
double loss_mse(const Matrix& n, const Matrix& m);
/// -(1/(k m)) * sum N * M
double loss_cc(const Matrix& n, const Matrix& m);
/// lambda_1 * mse + lambda_2 * cc
LossBreakdown loss_combined(const Matrix& n, const Matrix& m, const LossWeights& w);
LossBreakdown combine(double mse, double cc, const LossWeights& w);

/// dL_comb / dN.
Matrix loss_combined_gradient(const Matrix& n, const Matrix& m, const LossWeights& w);

}  // namespace myo

// Barron-norm computation for functions with known Fourier modulus, the
// norm monotonicity under the Levy semigroup, and two-layer network fits
// exercising the m^{-1/2} law.
#pragma once

#include <functional>
#include <optional>

#include "levynet/levy_models.hpp"
#include "levynet/relu_net.hpp"

namespace levynet {

struct BarronFunction {
    int d = 1;
    // |fhat| as a function of xi (d = 1) or of the radius (radial, d > 1).
    std::function<double(double)> fhatAbs;
    bool radial = false;
    std::optional<double> analyticNorm;
    // Real-space values, used by the fitting routines.
    std::function<double(double)> f;

    // f(x) = exp(-x^2/2) in one dimension; norm 2.
    static BarronFunction gaussian_1d();
};

// ||f||_B = int |xi| |fhat(xi)| dxi, by panel quadrature with doubling
// truncation. Throws Diverges if no convergence by a large radius.
double barron_norm(const BarronFunction& f);

// Norm of xi -> e^{-tau Re psi(xi)} |fhat(xi)| (d = 1); at most barron_norm(f).
double evolved_norm(const BarronFunction& f, const LevyModel1D& model, double tau);

enum class FitMethod { RandomFeatures, Greedy };

struct TwoLayerFit {
    ReluNetwork net;      // depth 2, at most m(d+2) nonzero weights
    double l2piError = 0.0;  // estimated on quasi-random points under uniform pi
    int unitsUsed = 0;
    bool regularized = false;  // ridge fallback applied (RandomFeatures)
};

// Fits f on [-R, R] under the uniform measure with a two-layer ReLU network
// (1/m) sum a_i relu(w_i x + b_i). Greedy = orthogonal matching pursuit over
// breakpoint candidates with local refinement; RandomFeatures = random
// (w, b) plus least squares.
TwoLayerFit fit_two_layer(const std::function<double(double)>& f, double R, int m,
                          FitMethod method, std::uint64_t seed);

}  // namespace levynet

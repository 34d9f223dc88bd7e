#pragma once

#include <complex>
#include <vector>

#include "lattice.hpp"
#include "regime.hpp"

namespace dlab {

// Immutable per-run tables tied to one lattice; shareable across threads.
struct nonlinear_context {
    model_kind model = model_kind::inls;
    lattice lat;
    double b = 0;
    double q = 2;
    double alpha = 0;
    std::vector<double> weight_b;      // |x|^-b at cell centers
    std::vector<double> weight_b_frac; // |x|^(-b/(1+q)), second quadrature route
    spectral_multiplier riesz;         // |k|^-alpha, Hartree model only
};

nonlinear_context make_context(const lattice& lat, model_kind model, double b, double q,
                               double alpha = 0.0);

// Normalization making C * |x|^(alpha - dim) the kernel whose Fourier symbol
// is |k|^-alpha.
double riesz_constant(int dim, double alpha);

// Quadrature-weighted norms and pairings; r may be infinity (max norm).
double lebesgue_norm(const field& f, double r);
std::complex<double> inner_product(const field& f, const field& g);

// exp(i t Laplacian): multiply the transform by exp(-i t |k|^2).
field free_propagate(const field& f, double t);

// Real pointwise potential W(f) with nonlinearity W(f) .* f. For the
// power-law model W = |x|^-b |f|^(q-1); for the Hartree model
// W = (J_alpha * |x|^-b |f|^q) |x|^-b |f|^(q-2). Where the exponent on |f|
// is negative the whole term is defined as 0 at f = 0.
std::vector<double> phase_potential(const field& f, const nonlinear_context& ctx);

field inls_rhs(const field& f, const nonlinear_context& ctx);
field hartree_potential(const field& f, const nonlinear_context& ctx);
field inlh_rhs(const field& f, const nonlinear_context& ctx);

// The identical zero-mode-removed convolution operator recomputed by dense
// direct summation (kernel table from an explicit frequency sum, then an
// O(points^2) convolution); no transform code shared with the spectral
// route. Cost guard: at most 2^16 points.
field riesz_convolve_oracle(const field& f, double alpha);

// ||exp(i t Laplacian) f||_r * t^(dim (1/2 - 1/r)) / ||f||_r', r >= 2.
double dispersive_ratio(const field& f, double t, double r);

// ||J_alpha * g||_s / ||g||_r under the scaling relation 1/r = 1/s + alpha/dim.
double hls_ratio(const field& g, double alpha, double s, double r);

} // namespace dlab

#pragma once

#include <utility>
#include <vector>

#include "integrator.hpp"

namespace dlab {

// Quadratic functionals of a single state.
double mass(const field& f);              // integral of |f|^2
double grad_norm_squared(const field& f); // integral of |grad f|^2, spectral
double variance(const field& f);          // integral of |x|^2 |f|^2

struct energy_parts {
    double kinetic = 0;
    double potential = 0;
    double total() const { return kinetic + potential; }
};
energy_parts energy(const field& f, const nonlinear_context& ctx);

// The weighted potential integral shared by the energy, the dilation
// identity and the decay diagnostics. Power-law model: integral of
// |x|^{-b} |f|^{1+q}. Convolution model: the pairing of w = |x|^{-b} |f|^q
// against its own Riesz potential.
double weighted_potential(const field& f, const nonlinear_context& ctx);

// Right-hand side of the second time derivative of the variance:
//   power-law:   8 |grad f|^2 + 4 (N(q-1) + 2b) / (1+q) * weighted_potential
//   convolution: 8 |grad f|^2 + 4 (N(q-1) + 2b - alpha) / q * weighted_potential
double virial_rhs(const field& f, const nonlinear_context& ctx);

// Max over interior snapshots of the relative mismatch between the central
// second difference of the variance series and virial_rhs at the same time.
// Needs at least three equispaced snapshots.
double virial_residual(const trajectory& tr, const nonlinear_context& ctx);

// Interaction functional Im integral of conj(u) v and the two pieces of its
// time derivative when u solves the nonlinear flow and v the free flow:
// `main` keeps only v in the nonlinearity (sign-definite for the power-law
// model), `cross` collects the u-v difference terms.
double upsilon(const field& u, const field& v);

struct rate_terms {
    double main = 0;
    double cross = 0;
};
rate_terms upsilon_rate_terms(const field& u, const field& v, const nonlinear_context& ctx);

// Mass restricted to the closed centered ball of the given radius.
double lightcone_mass(const field& f, double radius);

// Least-squares fit of log(value) against log(t).
struct slope_fit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};
slope_fit decay_fit(const std::vector<std::pair<double, double>>& series);

// Fit the weighted potential along a trajectory against the decay rate that
// spatially uniform spreading predicts:
//   power-law:   -(N(q-1) + 2b) / 2
//   convolution: -(N(q-1) - alpha) - 2b
// A fitted slope at or above `theoretical` is the quantitative sign that the
// nonlinearity still sees the solution, i.e. the lower-bound mechanism that
// rules out scattering in the slow-dispersion regime.
struct decay_check {
    slope_fit fit;
    double theoretical = 0;
};
decay_check weighted_potential_lower_bound_check(const trajectory& tr,
                                                 const nonlinear_context& ctx);

// Exact numerator 4(N(q-1) + 2b - 4) of the weighted-potential coefficient
// when the dilation identity is written against 8 E(u0); vanishes exactly at
// the power-law mass-critical exponent q = 1 + 2(2-b)/N.
rational virial_energy_gap_coefficient(int dim, const rational& q, const rational& b);

} // namespace dlab

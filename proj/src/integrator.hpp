#pragma once

#include <utility>
#include <vector>

#include "operators.hpp"

namespace dlab {

enum class coefficient_kind { unit, power_law, zero };

// Fixed-step split-step evolution plan. The power-law coefficient multiplies
// the nonlinearity by t^rho, which is how the time-rescaled equations
// produced by the pseudoconformal change of frame enter the integrator.
struct evolution_spec {
    nonlinear_context ctx;
    double t0 = 0;
    double t1 = 1;
    double dt = 1e-2;
    coefficient_kind coeff = coefficient_kind::unit;
    double coeff_exponent = 0;
    std::vector<double> snapshot_times; // strictly increasing, within [t0, t1]
};

void validate_spec(const evolution_spec& spec);
double coefficient_value(const evolution_spec& spec, double t);

struct step_stat {
    double t = 0;
    double dt = 0;
    double mass = 0;
    double energy = 0;
    double grad_norm = 0;
};

struct trajectory {
    evolution_spec spec;
    std::vector<std::pair<double, field>> snapshots; // first entry is the t0 state
    std::vector<step_stat> stats;                    // one record per step
};

// Half kinetic step, exact nonlinear phase rotation by the real potential
// evaluated at the half-step state and the coefficient sampled at t + dt/2,
// half kinetic step. Every substep is an isometry, so mass is conserved to
// roundoff.
field strang_step(const field& f, double t, double dt, const evolution_spec& spec);

// March from t0 to t1, landing exactly on each requested snapshot time by
// shortening the final step of a segment. Captures the t0 and t1 states
// unconditionally.
trajectory evolve(const evolution_spec& spec, const field& initial);

// Max over snapshot times of the relative defect in the integral form
// u(t) = e^{i(t-t0) Laplacian} u(t0) - i int_{t0}^t e^{i(t-s) Laplacian}
// c(s) N(u(s)) ds, with trapezoidal quadrature over the snapshots.
double duhamel_residual(const trajectory& tr);

} // namespace dlab

#pragma once

#include "diagnostics.hpp"

namespace dlab {

// Change of frame that compresses the tail of a run into a unit interval:
// the state at time 1/t maps to a chirped, conjugated, dilated profile at
// time t. The dilation is pure re-labeling: sample j keeps its value while
// its coordinate moves from x to t x, so the target lattice is the source
// lattice with extent scaled by t and nothing is ever interpolated.
struct pc_frame {
    double t = 1.0;
    lattice source;
    lattice target;
};

pc_frame make_frame(const lattice& source, double t);
void validate_frame(const pc_frame& frame);

// v(x) = (it)^{-N/2} e^{i|x|^2/4t} conj(u)(x/t) sampled on frame.target. The
// prefactor modulus t^{-N/2} offsets the dilation Jacobian, so the map is a
// mass isometry up to roundoff.
field pc_transform(const field& u_at_inv_t, const pc_frame& frame);

// Exact algebraic inverse of pc_transform over the same frame; returns the
// state on frame.source.
field pc_inverse_transform(const field& v_at_t, const pc_frame& frame);

// Exponent of the time power multiplying the nonlinearity after the change
// of frame: N(q-1)/2 + b - 2 for the power-law model and
// N(q-1) + 2b - alpha - 2 for the convolution model. Negative throughout
// the parameter ranges treated here.
double pc_coefficient_exponent(const nonlinear_context& ctx);

// Evolution plan for the transformed equation on [tau0, 1]: power-law
// coefficient t^m with m = pc_coefficient_exponent. Requires m > -1, so the
// coefficient is integrable at t = 0, and tau0 >= 0.05 to stay clear of the
// blow-up of t^m near zero.
evolution_spec make_rescaled_spec(const nonlinear_context& ctx, double tau0, double dt);

// Max over interior snapshot times of the relative defect
// ||i dv/dt (central difference) + Laplacian v - t^m W(v) v|| / ||v||.
// Accepts either a trajectory on one common lattice or a transform-built one
// whose snapshot j lives on a lattice of extent t_j times a fixed base; in
// the dilation-linked case sample k tracks the ray x = t y_k, so the fixed-
// position time derivative is the aligned difference minus (x/t) . grad v.
double pc_equation_residual(const trajectory& tr, const nonlinear_context& ctx);

// t^{-m} ||grad v||^2 plus the potential part of the energy; nondecreasing
// in t along solutions of the transformed equation while m < 0.
double monotone_quantity(const field& v, double t, const nonlinear_context& ctx);

// Max over snapshots of t^{-m} ||grad v||^2, the a-priori statistic the
// monotone quantity keeps bounded on (0, 1].
double rescaled_gradient_sup(const trajectory& tr, const nonlinear_context& ctx);

// psi(t) = exp(-i t Laplacian) u(t): undoes the free flow, so the profile is
// constant along linear solutions and converges along scattering ones.
field back_propagated_profile(const field& u, double t);

// ||psi(t_{j+1}) - psi(t_j)|| over consecutive pairs of the given times,
// each of which must match a snapshot time of the trajectory.
std::vector<double> cauchy_increments(const trajectory& tr, const std::vector<double>& times);

// Back-propagated final state together with the profile increment over the
// last snapshot pair as its accuracy proxy.
struct scattering_result {
    field state;
    double error_proxy = 0;
};
scattering_result scattering_state(const trajectory& tr);

// First-order extrapolation of the start-time-to-zero limit profile from
// samples at tau0 and tau0/2; the correction norm is the uncertainty.
struct limit_profile {
    field profile;
    double uncertainty = 0;
};
limit_profile extrapolate_limit_profile(const field& at_tau0, const field& at_half_tau0);

} // namespace dlab

#include "conformal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "errors.hpp"

namespace dlab {

namespace {

using cplx = std::complex<double>;

double cell_volume(const lattice& lat) { return std::pow(lat.step(), lat.dim); }

double l2_norm(const cvec& a, const lattice& lat) {
    double s = 0;
    for (const cplx& z : a) s += std::norm(z);
    return std::sqrt(s * cell_volume(lat));
}

double l2_diff(const field& a, const field& b) {
    require(a.lat == b.lat, errc::lattice_mismatch, "fields live on different lattices");
    double s = 0;
    for (size_t j = 0; j < a.a.size(); ++j) s += std::norm(a.a[j] - b.a[j]);
    return std::sqrt(s * cell_volume(a.lat));
}

// Chirp sample pref * e^{i|x|^2/4t} at target cell j.
cvec chirp_table(const pc_frame& frame) {
    const cplx pref = std::pow(cplx(0.0, frame.t), -0.5 * frame.source.dim);
    const std::vector<double> r2 = radius_squared(frame.target);
    cvec c(r2.size());
    for (size_t j = 0; j < c.size(); ++j)
        c[j] = pref * std::polar(1.0, r2[j] / (4.0 * frame.t));
    return c;
}

} // namespace

pc_frame make_frame(const lattice& source, double t) {
    require(std::isfinite(t) && t > 0, errc::frame_mismatch, "frame time must be positive");
    pc_frame frame;
    frame.t = t;
    frame.source = source;
    frame.target = source;
    frame.target.extent = t * source.extent;
    validate_frame(frame);
    return frame;
}

void validate_frame(const pc_frame& frame) {
    require(std::isfinite(frame.t) && frame.t > 0, errc::frame_mismatch,
            "frame time must be positive");
    require(frame.target.dim == frame.source.dim && frame.target.n == frame.source.n &&
                frame.target.offset == frame.source.offset,
            errc::frame_mismatch, "frame lattices must share shape and sampling");
    require(frame.target.extent == frame.t * frame.source.extent, errc::frame_mismatch,
            "target extent must equal t times the source extent");
}

field pc_transform(const field& u_at_inv_t, const pc_frame& frame) {
    validate_frame(frame);
    require(u_at_inv_t.lat == frame.source, errc::frame_mismatch,
            "field is not sampled on the frame source lattice");
    const cvec c = chirp_table(frame);
    field v = make_field(frame.target);
    for (size_t j = 0; j < v.a.size(); ++j) v.a[j] = c[j] * std::conj(u_at_inv_t.a[j]);
    return v;
}

field pc_inverse_transform(const field& v_at_t, const pc_frame& frame) {
    validate_frame(frame);
    require(v_at_t.lat == frame.target, errc::frame_mismatch,
            "field is not sampled on the frame target lattice");
    const cvec c = chirp_table(frame);
    field u = make_field(frame.source);
    for (size_t j = 0; j < u.a.size(); ++j) u.a[j] = std::conj(v_at_t.a[j] / c[j]);
    return u;
}

double pc_coefficient_exponent(const nonlinear_context& ctx) {
    const double n = ctx.lat.dim;
    if (ctx.model == model_kind::inls) return 0.5 * n * (ctx.q - 1.0) + ctx.b - 2.0;
    return n * (ctx.q - 1.0) + 2.0 * ctx.b - ctx.alpha - 2.0;
}

evolution_spec make_rescaled_spec(const nonlinear_context& ctx, double tau0, double dt) {
    const double m = pc_coefficient_exponent(ctx);
    require(m > -1.0, errc::coefficient_singularity,
            "coefficient exponent " + std::to_string(m) + " is not integrable at t = 0");
    require(std::isfinite(tau0) && tau0 >= 0.05, errc::coefficient_singularity,
            "start time below the 0.05 floor of the rescaled interval");
    require(tau0 < 1.0, errc::invalid_params, "rescaled runs end at t = 1");
    evolution_spec spec;
    spec.ctx = ctx;
    spec.t0 = tau0;
    spec.t1 = 1.0;
    spec.dt = dt;
    spec.coeff = coefficient_kind::power_law;
    spec.coeff_exponent = m;
    return spec;
}

double pc_equation_residual(const trajectory& tr, const nonlinear_context& ctx) {
    const auto& snaps = tr.snapshots;
    require(snaps.size() >= 3, errc::insufficient_snapshots,
            "equation residual needs at least three snapshots");
    const double spacing = snaps[1].first - snaps[0].first;
    require(spacing > 0, errc::bad_order, "snapshot times must increase");
    for (size_t j = 1; j < snaps.size(); ++j)
        require(std::abs(snaps[j].first - snaps[j - 1].first - spacing) <= 1e-9 * spacing,
                errc::invalid_params, "snapshots must be equispaced");

    bool common = true;
    for (const auto& s : snaps)
        common = common && s.second.lat == snaps.front().second.lat;
    if (common) {
        require(snaps.front().second.lat == ctx.lat, errc::lattice_mismatch,
                "snapshot lattice differs from context");
    } else {
        const lattice& l0 = snaps.front().second.lat;
        require(snaps.front().first > 0, errc::frame_mismatch,
                "dilation-linked snapshots need positive times");
        const double base = l0.extent / snaps.front().first;
        for (const auto& s : snaps) {
            const lattice& l = s.second.lat;
            const bool shape_ok =
                l.dim == l0.dim && l.n == l0.n && l.offset == l0.offset && s.first > 0;
            require(shape_ok && std::abs(l.extent - s.first * base) <= 1e-12 * l.extent,
                    errc::frame_mismatch,
                    "snapshot lattices are neither common nor dilation-linked");
        }
    }

    const double m = pc_coefficient_exponent(ctx);
    double worst = 0;
    for (size_t j = 1; j + 1 < snaps.size(); ++j) {
        const double t = snaps[j].first;
        const field& v0 = snaps[j].second;
        const lattice& lat = v0.lat;

        nonlinear_context local;
        const nonlinear_context* use = &ctx;
        if (!common) {
            local = make_context(lat, ctx.model, ctx.b, ctx.q, ctx.alpha);
            use = &local;
        }

        const field F = forward_transform(v0);
        const std::vector<double> k2 = frequency_squared(lat);
        field lap = F;
        for (size_t k = 0; k < lap.a.size(); ++k) lap.a[k] *= -k2[k];
        lap = inverse_transform(lap);

        cvec dv(v0.a.size());
        for (size_t k = 0; k < dv.size(); ++k)
            dv[k] = (snaps[j + 1].second.a[k] - snaps[j - 1].second.a[k]) / (2.0 * spacing);
        if (!common) {
            // Sample k of the linked snapshots rides the dilation ray
            // x = t y_k, so subtract the drift (x/t) . grad v to recover the
            // fixed-position derivative.
            int idx[3];
            cvec ray(v0.a.size(), 0.0);
            for (int d = 0; d < lat.dim; ++d) {
                field g = F;
                for (size_t k = 0; k < g.a.size(); ++k) {
                    unravel(lat, k, idx);
                    g.a[k] *= cplx(0.0, axis_frequency(lat, idx[d]));
                }
                g = inverse_transform(g);
                for (size_t k = 0; k < g.a.size(); ++k) {
                    unravel(lat, k, idx);
                    ray[k] += axis_coordinate(lat, idx[d]) * g.a[k];
                }
            }
            for (size_t k = 0; k < dv.size(); ++k) dv[k] -= ray[k] / t;
        }

        const std::vector<double> w = phase_potential(v0, *use);
        const double c = std::pow(t, m);
        double num = 0, den = 0;
        for (size_t k = 0; k < v0.a.size(); ++k) {
            const cplx r = cplx(0.0, 1.0) * dv[k] + lap.a[k] - c * w[k] * v0.a[k];
            num += std::norm(r);
            den += std::norm(v0.a[k]);
        }
        require(den > 0, errc::non_finite, "residual of a vanishing state");
        worst = std::max(worst, std::sqrt(num / den));
    }
    return worst;
}

double monotone_quantity(const field& v, double t, const nonlinear_context& ctx) {
    const energy_parts e = energy(v, ctx);
    return std::pow(t, -pc_coefficient_exponent(ctx)) * e.kinetic + e.potential;
}

double rescaled_gradient_sup(const trajectory& tr, const nonlinear_context& ctx) {
    require(!tr.snapshots.empty(), errc::insufficient_snapshots, "trajectory has no snapshots");
    const double m = pc_coefficient_exponent(ctx);
    double sup = 0;
    for (const auto& [t, f] : tr.snapshots)
        sup = std::max(sup, std::pow(t, -m) * grad_norm_squared(f));
    return sup;
}

field back_propagated_profile(const field& u, double t) { return free_propagate(u, -t); }

std::vector<double> cauchy_increments(const trajectory& tr, const std::vector<double>& times) {
    require(times.size() >= 2, errc::invalid_params,
            "profile increments need at least two times");
    std::vector<field> profiles;
    profiles.reserve(times.size());
    double prev = 0;
    for (double t : times) {
        require(std::isfinite(t), errc::invalid_params, "profile times must be finite");
        require(profiles.empty() || t > prev, errc::bad_order, "profile times must increase");
        const std::pair<double, field>* hit = nullptr;
        for (const auto& s : tr.snapshots)
            if (std::abs(s.first - t) <= 1e-9 * std::max(1.0, std::abs(t))) {
                hit = &s;
                break;
            }
        require(hit != nullptr, errc::missing_snapshot,
                "no snapshot at t = " + std::to_string(t));
        profiles.push_back(back_propagated_profile(hit->second, hit->first));
        prev = t;
    }
    std::vector<double> inc;
    inc.reserve(profiles.size() - 1);
    for (size_t j = 0; j + 1 < profiles.size(); ++j)
        inc.push_back(l2_diff(profiles[j + 1], profiles[j]));
    return inc;
}

scattering_result scattering_state(const trajectory& tr) {
    require(tr.snapshots.size() >= 2, errc::insufficient_snapshots,
            "scattering state needs at least two snapshots");
    const auto& last = tr.snapshots.back();
    const auto& before = tr.snapshots[tr.snapshots.size() - 2];
    scattering_result out;
    out.state = back_propagated_profile(last.second, last.first);
    out.error_proxy = l2_diff(out.state, back_propagated_profile(before.second, before.first));
    return out;
}

limit_profile extrapolate_limit_profile(const field& at_tau0, const field& at_half_tau0) {
    require(at_tau0.lat == at_half_tau0.lat, errc::lattice_mismatch,
            "limit extrapolation needs a common lattice");
    limit_profile out;
    out.profile = make_field(at_tau0.lat);
    cvec corr(at_tau0.a.size());
    for (size_t j = 0; j < corr.size(); ++j) {
        corr[j] = at_half_tau0.a[j] - at_tau0.a[j];
        out.profile.a[j] = at_half_tau0.a[j] + corr[j];
    }
    out.uncertainty = l2_norm(corr, at_tau0.lat);
    return out;
}

} // namespace dlab

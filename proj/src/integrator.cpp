#include "integrator.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "diagnostics.hpp"
#include "errors.hpp"

namespace dlab {

namespace {

using cplx = std::complex<double>;

void record_stat(trajectory& tr, double t, double dt, const field& u) {
    step_stat st;
    st.t = t;
    st.dt = dt;
    st.mass = mass(u);
    require(std::isfinite(st.mass), errc::non_finite,
            "state left the finite range at t = " + std::to_string(t));
    const energy_parts e = energy(u, tr.spec.ctx);
    st.energy = e.total();
    require(std::isfinite(st.energy), errc::non_finite,
            "energy left the finite range at t = " + std::to_string(t));
    st.grad_norm = std::sqrt(grad_norm_squared(u));
    tr.stats.push_back(st);
}

} // namespace

void validate_spec(const evolution_spec& spec) {
    require(std::isfinite(spec.t0) && std::isfinite(spec.t1) && std::isfinite(spec.dt),
            errc::invalid_params, "times must be finite");
    require(spec.t0 >= 0, errc::invalid_params, "t0 must be nonnegative");
    require(spec.t1 > spec.t0, errc::invalid_params, "t1 must exceed t0");
    require(spec.dt > 0, errc::invalid_params, "dt must be positive");
    require(spec.ctx.weight_b.size() == spec.ctx.lat.size(), errc::invalid_params,
            "context tables not initialized");
    if (spec.coeff == coefficient_kind::power_law) {
        require(std::isfinite(spec.coeff_exponent), errc::invalid_params,
                "coefficient exponent must be finite");
        if (spec.coeff_exponent < 0)
            require(spec.t0 > 0, errc::coefficient_singularity,
                    "negative-exponent coefficient needs t0 > 0");
    }
    double prev = spec.t0;
    bool first = true;
    for (double s : spec.snapshot_times) {
        require(std::isfinite(s) && s >= spec.t0 && s <= spec.t1, errc::invalid_params,
                "snapshot time outside the run interval");
        require(first || s > prev, errc::bad_order, "snapshot times must increase");
        first = false;
        prev = s;
    }
}

double coefficient_value(const evolution_spec& spec, double t) {
    if (spec.coeff == coefficient_kind::unit) return 1.0;
    if (spec.coeff == coefficient_kind::zero) return 0.0;
    require(std::isfinite(t) && t >= 0, errc::coefficient_singularity,
            "power-law coefficient needs t >= 0");
    if (spec.coeff_exponent < 0)
        require(t > 0, errc::coefficient_singularity, "power-law coefficient singular at t = 0");
    return std::pow(t, spec.coeff_exponent);
}

field strang_step(const field& f, double t, double dt, const evolution_spec& spec) {
    require(std::isfinite(t) && std::isfinite(dt) && dt > 0, errc::invalid_params,
            "step needs finite t and dt > 0");
    require(f.lat == spec.ctx.lat, errc::lattice_mismatch, "state lattice differs from context");
    field half = free_propagate(f, 0.5 * dt);
    const double c = coefficient_value(spec, t + 0.5 * dt);
    if (c != 0.0) {
        const std::vector<double> w = phase_potential(half, spec.ctx);
        for (size_t j = 0; j < half.a.size(); ++j) half.a[j] *= std::polar(1.0, -dt * c * w[j]);
    }
    return free_propagate(half, 0.5 * dt);
}

trajectory evolve(const evolution_spec& spec, const field& initial) {
    validate_spec(spec);
    require(initial.lat == spec.ctx.lat, errc::lattice_mismatch,
            "initial state lattice differs from context");

    trajectory tr;
    tr.spec = spec;

    std::vector<double> targets;
    for (double s : spec.snapshot_times)
        if (s > spec.t0) targets.push_back(s);
    if (targets.empty() || targets.back() < spec.t1) targets.push_back(spec.t1);

    field u = initial;
    tr.snapshots.emplace_back(spec.t0, u);
    double t = spec.t0;
    for (double goal : targets) {
        // Full steps measured from the segment start avoid accumulated drift;
        // the remainder step lands exactly on the capture time.
        const double span = goal - t;
        const long full = std::max(0L, static_cast<long>(std::floor(span / spec.dt - 1e-9)));
        for (long i = 0; i < full; ++i) {
            const double start = t + static_cast<double>(i) * spec.dt;
            u = strang_step(u, start, spec.dt, spec);
            record_stat(tr, start + spec.dt, spec.dt, u);
        }
        const double done = t + static_cast<double>(full) * spec.dt;
        const double rem = goal - done;
        if (rem > 1e-12 * spec.dt) {
            u = strang_step(u, done, rem, spec);
            record_stat(tr, goal, rem, u);
        }
        t = goal;
        tr.snapshots.emplace_back(goal, u);
    }
    return tr;
}

double duhamel_residual(const trajectory& tr) {
    const auto& snaps = tr.snapshots;
    require(snaps.size() >= 3, errc::insufficient_snapshots, "need at least three snapshots");
    const evolution_spec& spec = tr.spec;

    std::vector<field> theta;
    theta.reserve(snaps.size());
    for (const auto& [s, us] : snaps) {
        field r = spec.ctx.model == model_kind::inls ? inls_rhs(us, spec.ctx)
                                                     : inlh_rhs(us, spec.ctx);
        const double c = coefficient_value(spec, s);
        for (cplx& z : r.a) z *= c;
        theta.push_back(std::move(r));
    }

    const field& u0 = snaps.front().second;
    const double t0 = snaps.front().first;
    double worst = 0;
    for (size_t k = 1; k < snaps.size(); ++k) {
        const double t = snaps[k].first;
        field acc = make_field(spec.ctx.lat);
        for (size_t j = 0; j <= k; ++j) {
            const double lo = j == 0 ? snaps[0].first : snaps[j - 1].first;
            const double hi = j == k ? snaps[k].first : snaps[j + 1].first;
            const double w = 0.5 * (hi - lo);
            const field prop = free_propagate(theta[j], t - snaps[j].first);
            for (size_t m = 0; m < acc.a.size(); ++m) acc.a[m] += w * prop.a[m];
        }
        const field model = free_propagate(u0, t - t0);
        double num = 0, den = 0;
        for (size_t m = 0; m < acc.a.size(); ++m) {
            const cplx r = snaps[k].second.a[m] - model.a[m] + cplx(0, 1) * acc.a[m];
            num += std::norm(r);
            den += std::norm(snaps[k].second.a[m]);
        }
        worst = std::max(worst, den == 0.0 ? std::sqrt(num) : std::sqrt(num / den));
    }
    return worst;
}

} // namespace dlab

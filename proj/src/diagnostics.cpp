#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "errors.hpp"

namespace dlab {

namespace {

using cplx = std::complex<double>;

double cell_volume(const lattice& lat) { return std::pow(lat.step(), lat.dim); }

} // namespace

double mass(const field& f) {
    double s = 0;
    for (const cplx& z : f.a) s += std::norm(z);
    return s * cell_volume(f.lat);
}

double grad_norm_squared(const field& f) {
    const field F = forward_transform(f);
    const std::vector<double> k2 = frequency_squared(f.lat);
    double s = 0;
    for (size_t j = 0; j < F.a.size(); ++j) s += k2[j] * std::norm(F.a[j]);
    return s / std::pow(f.lat.extent, f.lat.dim);
}

double variance(const field& f) {
    const std::vector<double> r2 = radius_squared(f.lat);
    double s = 0;
    for (size_t j = 0; j < f.a.size(); ++j) s += r2[j] * std::norm(f.a[j]);
    return s * cell_volume(f.lat);
}

double weighted_potential(const field& f, const nonlinear_context& ctx) {
    require(f.lat == ctx.lat, errc::lattice_mismatch, "state lattice differs from context");
    double s = 0;
    if (ctx.model == model_kind::inls) {
        for (size_t j = 0; j < f.a.size(); ++j)
            s += ctx.weight_b[j] * std::pow(std::abs(f.a[j]), 1.0 + ctx.q);
    } else {
        const field pot = hartree_potential(f, ctx);
        for (size_t j = 0; j < f.a.size(); ++j)
            s += pot.a[j].real() * ctx.weight_b[j] * std::pow(std::abs(f.a[j]), ctx.q);
    }
    return s * cell_volume(f.lat);
}

energy_parts energy(const field& f, const nonlinear_context& ctx) {
    energy_parts e;
    e.kinetic = grad_norm_squared(f);
    const double p = weighted_potential(f, ctx);
    e.potential = ctx.model == model_kind::inls ? 2.0 * p / (1.0 + ctx.q) : p / ctx.q;
    return e;
}

double virial_rhs(const field& f, const nonlinear_context& ctx) {
    const double n = ctx.lat.dim;
    const double coeff = ctx.model == model_kind::inls
                             ? 4.0 * (n * (ctx.q - 1.0) + 2.0 * ctx.b) / (1.0 + ctx.q)
                             : 4.0 * (n * (ctx.q - 1.0) + 2.0 * ctx.b - ctx.alpha) / ctx.q;
    return 8.0 * grad_norm_squared(f) + coeff * weighted_potential(f, ctx);
}

double virial_residual(const trajectory& tr, const nonlinear_context& ctx) {
    const auto& snaps = tr.snapshots;
    require(snaps.size() >= 3, errc::insufficient_snapshots, "need at least three snapshots");
    const double spacing = snaps[1].first - snaps[0].first;
    require(spacing > 0, errc::bad_order, "snapshot times must increase");
    for (size_t k = 1; k + 1 < snaps.size(); ++k)
        require(std::abs(snaps[k + 1].first - snaps[k].first - spacing) <= 1e-9 * spacing,
                errc::invalid_params, "snapshots must be equispaced");

    std::vector<double> var(snaps.size()), rhs(snaps.size());
    for (size_t k = 0; k < snaps.size(); ++k) {
        var[k] = variance(snaps[k].second);
        rhs[k] = virial_rhs(snaps[k].second, ctx);
    }
    double scale = 0;
    for (double r : rhs) scale = std::max(scale, std::abs(r));
    double worst = 0;
    for (size_t k = 1; k + 1 < snaps.size(); ++k) {
        const double d2 = (var[k + 1] - 2.0 * var[k] + var[k - 1]) / (spacing * spacing);
        const double denom = std::abs(rhs[k]) + 1e-12 * scale + 1e-300;
        worst = std::max(worst, std::abs(d2 - rhs[k]) / denom);
    }
    return worst;
}

double upsilon(const field& u, const field& v) { return inner_product(u, v).imag(); }

rate_terms upsilon_rate_terms(const field& u, const field& v, const nonlinear_context& ctx) {
    require(u.lat == ctx.lat && v.lat == ctx.lat, errc::lattice_mismatch,
            "states must live on the context lattice");
    const double vol = cell_volume(ctx.lat);
    rate_terms out;
    if (ctx.model == model_kind::inls) {
        // d/dt Im<u, v> = Re int w_b |u|^{q-1} conj(u) v split at |v|^{q-1} v.
        const double e = ctx.q - 1.0;
        double main = 0, cross = 0;
        for (size_t j = 0; j < u.a.size(); ++j) {
            const double w = ctx.weight_b[j];
            if (w == 0.0) continue;
            const double mu = std::abs(u.a[j]);
            const double mv = std::abs(v.a[j]);
            main += w * std::pow(mv, 1.0 + ctx.q);
            const cplx diff = std::pow(mu, e) * u.a[j] - std::pow(mv, e) * v.a[j];
            cross += w * (diff * std::conj(v.a[j])).real();
        }
        out.main = main * vol;
        out.cross = cross * vol;
        return out;
    }
    // Convolution model: main pairs the all-v potential against the v density;
    // cross collects the kernel-difference and density-difference remainders.
    const field pot_u = hartree_potential(u, ctx);
    const field pot_v = hartree_potential(v, ctx);
    const double e = ctx.q - 2.0;
    double a_term = 0, b_term = 0, c_term = 0;
    for (size_t j = 0; j < u.a.size(); ++j) {
        const double w = ctx.weight_b[j];
        if (w == 0.0) continue;
        const double mu = std::abs(u.a[j]);
        const double mv = std::abs(v.a[j]);
        const double gv = w * std::pow(mv, ctx.q);
        a_term += pot_v.a[j].real() * gv;
        b_term += (pot_u.a[j].real() - pot_v.a[j].real()) * gv;
        const cplx pu = (mu == 0.0 && e < 0) ? cplx(0) : std::pow(mu, e) * u.a[j];
        const cplx pv = (mv == 0.0 && e < 0) ? cplx(0) : std::pow(mv, e) * v.a[j];
        c_term += pot_u.a[j].real() * w * ((pu - pv) * std::conj(v.a[j])).real();
    }
    out.main = a_term * vol;
    out.cross = (b_term + c_term) * vol;
    return out;
}

double lightcone_mass(const field& f, double radius) {
    require(std::isfinite(radius) && radius > 0, errc::invalid_params, "radius must be positive");
    const std::vector<double> m = ball_mask(f.lat, radius);
    double s = 0;
    for (size_t j = 0; j < f.a.size(); ++j) s += m[j] * std::norm(f.a[j]);
    return s * cell_volume(f.lat);
}

slope_fit decay_fit(const std::vector<std::pair<double, double>>& series) {
    require(series.size() >= 4, errc::insufficient_snapshots, "need at least four samples");
    double prev = 0;
    for (const auto& [t, y] : series) {
        require(std::isfinite(t) && std::isfinite(y) && t > 0 && y > 0, errc::nonpositive_sample,
                "samples must be finite and positive");
        require(t > prev, errc::bad_order, "sample times must increase");
        prev = t;
    }
    const double n = static_cast<double>(series.size());
    double mx = 0, my = 0;
    for (const auto& [t, y] : series) {
        mx += std::log(t);
        my += std::log(y);
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [t, y] : series) {
        const double dx = std::log(t) - mx;
        const double dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    slope_fit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

decay_check weighted_potential_lower_bound_check(const trajectory& tr,
                                                 const nonlinear_context& ctx) {
    std::vector<std::pair<double, double>> series;
    for (const auto& [t, f] : tr.snapshots)
        if (t > 0) series.emplace_back(t, weighted_potential(f, ctx));
    decay_check out;
    out.fit = decay_fit(series);
    const double n = ctx.lat.dim;
    out.theoretical = ctx.model == model_kind::inls
                          ? -0.5 * (n * (ctx.q - 1.0) + 2.0 * ctx.b)
                          : -(n * (ctx.q - 1.0) - ctx.alpha) - 2.0 * ctx.b;
    return out;
}

rational virial_energy_gap_coefficient(int dim, const rational& q, const rational& b) {
    return rational(4 * (dim * (q - 1) + 2 * b - 4));
}

} // namespace dlab

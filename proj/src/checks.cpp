#include "checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "conformal.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "harness.hpp"

namespace dlab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void add(suite_result& out, const std::string& name, double measured, double lo, double hi) {
    check_line line;
    line.name = name;
    line.measured = measured;
    line.lo = lo;
    line.hi = hi;
    line.passed = measured >= lo && measured <= hi;
    out.lines.push_back(line);
}

field noise_field(const lattice& lat, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    field f = make_field(lat);
    for (auto& z : f.a) z = {gauss(rng), gauss(rng)};
    return f;
}

field gaussian_state(const lattice& lat, double sigma, double amplitude) {
    datum_spec d;
    d.sigma = sigma;
    d.amplitude = amplitude;
    return make_datum(d, lat);
}

// Odd profile: vanishing at the origin keeps the singular weight from
// imprinting a lattice-scale kink, so order measurements stay clean.
field dipole_state(const lattice& lat, double amplitude, double width) {
    field f = make_field(lat);
    for (int j = 0; j < lat.n; ++j) {
        const double x = axis_coordinate(lat, j);
        f.a[j] = amplitude * x * std::exp(-0.5 * x * x / (width * width));
    }
    return f;
}

double rel_gap(const field& got, const field& want) {
    double num = 0, den = 0;
    for (size_t j = 0; j < got.a.size(); ++j) {
        num += std::norm(got.a[j] - want.a[j]);
        den += std::norm(want.a[j]);
    }
    return std::sqrt(num / den);
}

evolution_spec basic_spec(const nonlinear_context& ctx, double t0, double t1, double dt) {
    evolution_spec spec;
    spec.ctx = ctx;
    spec.t0 = t0;
    spec.t1 = t1;
    spec.dt = dt;
    return spec;
}

// --- transform ----------------------------------------------------------------

void suite_transform(suite_result& out) {
    const lattice lats[] = {make_lattice(1, 80.0, 1024), make_lattice(2, 20.0, 128),
                            make_lattice(3, 16.0, 32)};
    unsigned seed = 11;
    for (const lattice& lat : lats) {
        const field f = noise_field(lat, seed++);
        const field F = forward_transform(f);
        const field back = inverse_transform(F);

        double max_err = 0, max_val = 0;
        for (size_t j = 0; j < f.a.size(); ++j) {
            max_err = std::max(max_err, std::abs(back.a[j] - f.a[j]));
            max_val = std::max(max_val, std::abs(f.a[j]));
        }
        const std::string tag = std::to_string(lat.dim) + "d";
        add(out, "round trip " + tag + " relative", max_err / max_val, 0.0, 1e-12);

        double side_x = 0, side_k = 0;
        for (const auto& z : f.a) side_x += std::norm(z);
        for (const auto& z : F.a) side_k += std::norm(z);
        side_x *= std::pow(lat.step(), lat.dim);
        side_k /= std::pow(lat.extent, lat.dim);
        add(out, "Plancherel " + tag + " relative", std::abs(side_x - side_k) / side_x, 0.0,
            1e-12);
    }
}

// --- propagator ---------------------------------------------------------------

void suite_propagator(suite_result& out) {
    const lattice lat = make_lattice(1, 80.0, 1024);
    const field u0 = gaussian_state(lat, 1.0, 1.0);
    const double m0 = mass(u0);
    for (double t : {1.0, 2.0, 4.0}) {
        const field got = free_propagate(u0, t);
        // The boxed flow sees the periodized datum, so the reference is the
        // image sum of the closed-form solution sqrt(1+2it)^-1
        // exp(-x^2/(2(1+2it))); by t = 4 the nearest image contributes at
        // the 1e-6 level and a bare single-image comparison would floor there.
        field want = make_field(lat);
        const std::complex<double> s(1.0, 2.0 * t);
        for (int j = 0; j < lat.n; ++j) {
            const double x = axis_coordinate(lat, j);
            for (int m = -2; m <= 2; ++m) {
                const double xm = x + m * lat.extent;
                want.a[j] += std::exp(-0.5 * xm * xm / s) / std::sqrt(s);
            }
        }
        const std::string tag = "t=" + std::to_string(static_cast<int>(t));
        add(out, "free Gaussian " + tag + " relative L2", rel_gap(got, want), 0.0, 1e-8);
        add(out, "unitarity " + tag + " relative", std::abs(mass(got) - m0) / m0, 0.0,
            1e-12);
    }
}

// --- riesz ---------------------------------------------------------------------

field spectral_convolve(const field& f, double alpha) {
    field F = forward_transform(f);
    const auto k2 = frequency_squared(f.lat);
    for (size_t j = 0; j < F.a.size(); ++j)
        F.a[j] *= k2[j] == 0 ? 0.0 : std::pow(k2[j], -alpha / 2);
    return inverse_transform(F);
}

void suite_riesz(suite_result& out) {
    const lattice plane = make_lattice(2, 10.0, 32);
    const field g2 = noise_field(plane, 31);
    const field a = spectral_convolve(g2, 1.0);
    const field b = riesz_convolve_oracle(g2, 1.0);
    double max_err = 0, max_val = 0;
    for (size_t j = 0; j < a.a.size(); ++j) {
        max_err = std::max(max_err, std::abs(a.a[j] - b.a[j]));
        max_val = std::max(max_val, std::abs(a.a[j]));
    }
    add(out, "2d alpha=1 spectral vs direct summation", max_err / max_val, 0.0, 1e-10);

    // Coulomb potential of a unit Gaussian: phi(r) = sqrt(2 pi)/2
    // erf(r/sqrt 2)/r. The zero-mode-removed periodic answer differs from the
    // free-space potential by a lattice constant of order 0.57/L (images plus
    // the neutralizing background fix a different zero of potential) and by
    // tidal terms of order r^2/L^3, so the comparison matches means over the
    // ball and bounds the remaining shape error.
    const lattice cube = make_lattice(3, 32.0, 64);
    const field g3 = gaussian_state(cube, 1.0, 1.0);
    const field pot = spectral_convolve(g3, 2.0);
    const std::vector<double> r2 = radius_squared(cube);
    const double ball = 4.0;
    std::vector<double> phi(r2.size());
    double mean_pot = 0, mean_phi = 0;
    long cells = 0;
    for (size_t j = 0; j < r2.size(); ++j) {
        const double r = std::sqrt(r2[j]);
        phi[j] = std::sqrt(2.0 * M_PI) / 2.0 * std::erf(r / std::sqrt(2.0)) / r;
        if (r2[j] > ball * ball) continue;
        mean_pot += pot.a[j].real();
        mean_phi += phi[j];
        ++cells;
    }
    mean_pot /= static_cast<double>(cells);
    mean_phi /= static_cast<double>(cells);
    double worst = 0, scale = 0;
    for (size_t j = 0; j < phi.size(); ++j) {
        if (r2[j] > ball * ball) continue;
        worst = std::max(worst,
                         std::abs((pot.a[j].real() - mean_pot) - (phi[j] - mean_phi)));
        scale = std::max(scale, std::abs(phi[j] - mean_phi));
    }
    add(out, "3d alpha=2 vs Coulomb of Gaussian, ball r<=4", worst / scale, 0.0, 1e-2);
}

// --- mass -----------------------------------------------------------------------

double mass_drift(const trajectory& tr) {
    const double m0 = tr.stats.front().mass;
    double drift = 0;
    for (const step_stat& s : tr.stats) drift = std::max(drift, std::abs(s.mass - m0));
    return drift / m0;
}

void suite_mass(suite_result& out) {
    const lattice line = make_lattice(1, 40.0, 256);
    const auto inls_ctx = make_context(line, model_kind::inls, 0.25, 3.0);
    const trajectory a =
        evolve(basic_spec(inls_ctx, 0.0, 1.0, 1e-3), gaussian_state(line, 1.0, 1.0));
    add(out, "power-law drift over 1000 steps", mass_drift(a), 0.0, 1e-10);

    const lattice plane = make_lattice(2, 24.0, 64);
    const auto inlh_ctx = make_context(plane, model_kind::inlh, 0.25, 2.0, 1.0);
    const trajectory b =
        evolve(basic_spec(inlh_ctx, 0.0, 1.0, 1e-3), gaussian_state(plane, 1.0, 1.0));
    add(out, "convolution drift over 1000 steps", mass_drift(b), 0.0, 1e-10);
}

// --- energy-order ---------------------------------------------------------------

double energy_drift(const nonlinear_context& ctx, const field& u0, double dt) {
    const trajectory tr = evolve(basic_spec(ctx, 0.0, 1.0, dt), u0);
    const double e0 = tr.stats.front().energy;
    double drift = 0;
    for (const step_stat& s : tr.stats) drift = std::max(drift, std::abs(s.energy - e0));
    return drift;
}

void suite_energy_order(suite_result& out) {
    const lattice line = make_lattice(1, 40.0, 256);
    const auto inls_ctx = make_context(line, model_kind::inls, 0.25, 3.0);
    const field u1 = dipole_state(line, 1.0, 1.0);
    const double a1 = energy_drift(inls_ctx, u1, 4e-3);
    const double a2 = energy_drift(inls_ctx, u1, 2e-3);
    const double a3 = energy_drift(inls_ctx, u1, 1e-3);
    add(out, "power-law drift ratio 4ms/2ms", a1 / a2, 3.2, 4.8);
    add(out, "power-law drift ratio 2ms/1ms", a2 / a3, 3.2, 4.8);

    const lattice plane = make_lattice(2, 24.0, 64);
    const auto inlh_ctx = make_context(plane, model_kind::inlh, 0.25, 2.0, 1.0);
    const field u2 = gaussian_state(plane, 1.0, 1.0);
    const double b1 = energy_drift(inlh_ctx, u2, 4e-3);
    const double b2 = energy_drift(inlh_ctx, u2, 2e-3);
    const double b3 = energy_drift(inlh_ctx, u2, 1e-3);
    add(out, "convolution drift ratio 4ms/2ms", b1 / b2, 3.2, 4.8);
    add(out, "convolution drift ratio 2ms/1ms", b2 / b3, 3.2, 4.8);
}

// --- virial ---------------------------------------------------------------------

double windowed_virial_residual(const nonlinear_context& ctx, const field& u0, double dt,
                                double start, double end, double spacing) {
    evolution_spec spec = basic_spec(ctx, 0.0, end, dt);
    const int count = static_cast<int>(std::lround((end - start) / spacing));
    for (int k = 0; k <= count; ++k) spec.snapshot_times.push_back(start + spacing * k);
    trajectory tr = evolve(spec, u0);
    tr.snapshots.erase(tr.snapshots.begin()); // keep only the equispaced window
    return virial_residual(tr, ctx);
}

void suite_virial(suite_result& out) {
    const lattice line = make_lattice(1, 40.0, 1024);
    const auto inls_ctx = make_context(line, model_kind::inls, 0.25, 3.0);
    const field u1 = dipole_state(line, 1.0, 1.0);
    const double r1 = windowed_virial_residual(inls_ctx, u1, 2.5e-4, 0.0, 0.2, 0.01);
    const double r2 = windowed_virial_residual(inls_ctx, u1, 2.5e-4, 0.0, 0.2, 0.005);
    add(out, "power-law residual at spacing 1e-2", r1, 0.0, 1e-2);
    add(out, "power-law residual halving ratio", r1 / r2, 3.2, 4.8);

    const lattice wide = make_lattice(1, 1280.0, 65536);
    const auto inlh_ctx = make_context(wide, model_kind::inlh, 0.25, 2.0, 0.05);
    const field u2 = dipole_state(wide, 5.0, 0.2);
    const double h1 = windowed_virial_residual(inlh_ctx, u2, 2.5e-4, 0.015, 0.055, 0.01);
    const double h2 = windowed_virial_residual(inlh_ctx, u2, 2.5e-4, 0.015, 0.055, 0.005);
    add(out, "convolution residual at spacing 1e-2", h1, 0.0, 1e-2);
    add(out, "convolution residual halving ratio", h1 / h2, 3.0, 6.4);

    // At the mass-critical exponent q = 1 + 2(2-b)/N the weighted-potential
    // coefficient of the dilation identity written against 8 E vanishes as an
    // exact rational, not approximately.
    int nonzero = 0;
    const std::pair<int, rational> tuples[] = {{1, rational(1) / 4},
                                               {2, rational(1) / 2},
                                               {3, rational(3) / 4}};
    for (const auto& [dim, b] : tuples) {
        const rational qc = 1 + rational(2) * (2 - b) / dim;
        if (virial_energy_gap_coefficient(dim, qc, b) != 0) ++nonzero;
    }
    add(out, "mass-critical coefficient exactly zero (3 tuples)", nonzero, 0.0, 0.0);
}

// --- pair -----------------------------------------------------------------------

void suite_pair(suite_result& out, const std::string& fixture_dir) {
    const run_config fwd = load_config(fixture_dir + "/pc_forward.cfg");
    const run_config ctr = load_config(fixture_dir + "/pc_contracted.cfg");
    const pair_report rep = pair_check(fwd, ctr);
    add(out, "transform mass isometry", rep.mass_isometry_error, 0.0, 1e-12);
    add(out, "matched-time gap at t=1", rep.meet_error, 0.0, 1e-3);
    add(out, "monotone quantity worst relative dip", rep.monotone_dip, -1e-4, inf);
    const double ratio = rep.residual_native > 0 ? rep.residual_linked / rep.residual_native
                                                 : inf;
    add(out, "linked/native residual ratio", ratio, 0.1, 10.0);
}

// --- regime ---------------------------------------------------------------------

struct oracle_verdict {
    bool valid = false;
    theorem_label label = theorem_label::out_of_range;
};

oracle_verdict oracle_inls(int dim, const rational& b, const rational& q) {
    oracle_verdict v;
    if (!(q > 1 && b > 0 && b < 1 && b < dim)) return v;
    v.valid = true;
    if (q < 1 + rational(2 - 2 * b) / dim)
        v.label = theorem_label::non_scattering;
    else if (q < 1 + rational(2) * (2 - b) / dim)
        v.label = theorem_label::scattering;
    return v;
}

oracle_verdict oracle_inlh(int dim, const rational& b, const rational& q,
                           const rational& alpha, bool n1_extra) {
    oracle_verdict v;
    if (!(q > 1 && b > 0 && alpha > 0 && alpha < dim && b < dim &&
          1 - 2 * b + alpha > 0))
        return v;
    v.valid = true;
    const rational split = 1 + rational(1 + alpha - 2 * b) / dim;
    const rational upper = 1 + rational(2 - 2 * b + alpha) / dim;
    rational ns_lo = 1 + rational(alpha - 2 * b) / dim;
    if (ns_lo < 1) ns_lo = 1;
    bool ns = ns_lo < q && q < split;
    if (dim == 1)
        ns = n1_extra ? (ns && q < rational(3, 2) + (alpha - 2 * b)) : false;
    if (ns)
        v.label = theorem_label::non_scattering;
    else if (split < q && q < upper)
        v.label = theorem_label::scattering;
    return v;
}

void suite_regime(suite_result& out) {
    long tuples = 0, mismatches = 0;
    long seen_inls_ns = 0, seen_inls_s = 0, seen_inlh_ns = 0, seen_inlh_s = 0;

    const auto q_grid = [](std::vector<rational> anchors) {
        std::vector<rational> qs;
        for (int k = 5; k <= 30; ++k) qs.push_back(rational(k) / 6);
        for (const rational& a : anchors) {
            qs.push_back(a);
            qs.push_back(a - rational(1) / 97);
            qs.push_back(a + rational(1) / 97);
        }
        return qs;
    };

    for (int dim = 1; dim <= 3; ++dim) {
        for (int num = -1; num <= 12; ++num) {
            const rational b = rational(num) / 8;
            for (const rational& q :
                 q_grid({1 + rational(2 - 2 * b) / dim, 1 + rational(2) * (2 - b) / dim,
                         rational(1)})) {
                model_params p;
                p.model = model_kind::inls;
                p.dim = dim;
                p.b = b;
                p.q = q;
                ++tuples;
                const oracle_verdict want = oracle_inls(dim, b, q);
                std::vector<std::string> reasons;
                const bool valid = validate_constraints(p, reasons);
                if (valid != want.valid) {
                    ++mismatches;
                    continue;
                }
                if (!valid) continue;
                const theorem_label got = classify(p).label;
                if (got != want.label) ++mismatches;
                if (got == theorem_label::non_scattering) ++seen_inls_ns;
                if (got == theorem_label::scattering) ++seen_inls_s;
            }
        }
    }

    for (int dim = 1; dim <= 3; ++dim) {
        for (int bn = 0; bn <= 6; ++bn) {
            const rational b = rational(bn) / 8;
            for (int an = -1; an <= 9; ++an) {
                const rational alpha = rational(an) / 4;
                const rational split = 1 + rational(1 + alpha - 2 * b) / dim;
                const rational upper = 1 + rational(2 - 2 * b + alpha) / dim;
                const rational ns_lo = 1 + rational(alpha - 2 * b) / dim;
                const rational extra = rational(3, 2) + (alpha - 2 * b);
                for (const rational& q : q_grid({split, upper, ns_lo, extra})) {
                    for (const bool n1_extra : {false, true}) {
                        model_params p;
                        p.model = model_kind::inlh;
                        p.dim = dim;
                        p.b = b;
                        p.q = q;
                        p.alpha = alpha;
                        ++tuples;
                        const oracle_verdict want = oracle_inlh(dim, b, q, alpha, n1_extra);
                        std::vector<std::string> reasons;
                        const bool valid = validate_constraints(p, reasons);
                        if (valid != want.valid) {
                            ++mismatches;
                            continue;
                        }
                        if (!valid) continue;
                        classify_options opts;
                        opts.hartree_n1_extra = n1_extra;
                        const theorem_label got = classify(p, opts).label;
                        if (got != want.label) ++mismatches;
                        if (got == theorem_label::non_scattering) ++seen_inlh_ns;
                        if (got == theorem_label::scattering) ++seen_inlh_s;
                    }
                }
            }
        }
    }

    add(out, "rational tuples compared", static_cast<double>(tuples), 1e4, inf);
    add(out, "label or validity mismatches", static_cast<double>(mismatches), 0.0, 0.0);
    add(out, "power-law non-scattering tuples seen", static_cast<double>(seen_inls_ns), 1.0,
        inf);
    add(out, "power-law scattering tuples seen", static_cast<double>(seen_inls_s), 1.0, inf);
    add(out, "convolution non-scattering tuples seen", static_cast<double>(seen_inlh_ns),
        1.0, inf);
    add(out, "convolution scattering tuples seen", static_cast<double>(seen_inlh_s), 1.0,
        inf);
}

// --- lightcone ------------------------------------------------------------------

void suite_lightcone(suite_result& out) {
    const lattice lat = make_lattice(1, 512.0, 4096);
    const field u0 = gaussian_state(lat, 1.0, 1.0);
    const double total = mass(u0);

    // Radius holding 99% of the initial mass, and the frequency radius
    // holding 99% of the spectral mass; the cone grows at group velocity 2k.
    const auto radius_for = [](const std::vector<double>& weights,
                               const std::vector<double>& radii2, double share) {
        std::vector<std::pair<double, double>> cells(weights.size());
        for (size_t j = 0; j < weights.size(); ++j)
            cells[j] = {radii2[j], weights[j]};
        std::sort(cells.begin(), cells.end());
        double acc = 0, total = 0;
        for (const auto& [r2, w] : cells) total += w;
        for (const auto& [r2, w] : cells) {
            acc += w;
            if (acc >= share * total) return std::sqrt(r2);
        }
        return std::sqrt(cells.back().first);
    };

    std::vector<double> wx(u0.a.size());
    for (size_t j = 0; j < wx.size(); ++j) wx[j] = std::norm(u0.a[j]);
    const double r0 = radius_for(wx, radius_squared(lat), 0.99);

    const field F = forward_transform(u0);
    std::vector<double> wk(F.a.size());
    for (size_t j = 0; j < wk.size(); ++j) wk[j] = std::norm(F.a[j]);
    const double kappa = radius_for(wk, frequency_squared(lat), 0.99);

    double worst = 1.0;
    for (double t : {20.0, 30.0, 40.0}) {
        const field u = free_propagate(u0, t);
        const double ratio = lightcone_mass(u, r0 + 2.0 * kappa * t) / total;
        worst = std::min(worst, ratio);
    }
    add(out, "cone mass share, worst of t in {20,30,40}", worst, 0.95, 1.0 + 1e-12);
}

// --- decay ----------------------------------------------------------------------

void suite_decay(suite_result& out) {
    const lattice lat = make_lattice(1, 1024.0, 4096);
    const auto ctx = make_context(lat, model_kind::inls, 0.25, 1.5);
    evolution_spec spec = basic_spec(ctx, 0.0, 64.0, 0.02);
    spec.snapshot_times = {8.0, 16.0, 32.0, 64.0};
    const trajectory tr = evolve(spec, gaussian_state(lat, 1.0, 0.5));
    const decay_check chk = weighted_potential_lower_bound_check(tr, ctx);
    add(out, "fitted slope minus predicted (-1/2)", chk.fit.slope - chk.theoretical, -0.1,
        0.1);
    add(out, "log-log fit r squared", chk.fit.r_squared, 0.99, 1.0);
}

// --- upsilon --------------------------------------------------------------------

void suite_upsilon(suite_result& out) {
    const lattice lat = make_lattice(1, 64.0, 512);
    const auto ctx = make_context(lat, model_kind::inls, 0.25, 3.0);
    const field u0 = gaussian_state(lat, 1.0, 0.5);
    evolution_spec spec = basic_spec(ctx, 0.0, 4.0, 0.01);
    spec.snapshot_times = {1.0, 2.0, 3.0, 4.0};
    const trajectory tr = evolve(spec, u0);
    double min_main = inf, max_main = 0;
    for (const auto& [t, u] : tr.snapshots) {
        const rate_terms rt = upsilon_rate_terms(u, free_propagate(u0, t), ctx);
        min_main = std::min(min_main, rt.main);
        max_main = std::max(max_main, std::abs(rt.main));
    }
    add(out, "main rate term, min over snapshots (normalized)", min_main / max_main, -1e-9,
        inf);
}

// --- dichotomy ------------------------------------------------------------------

std::vector<double> dyadic_increments(double q, double amplitude) {
    const lattice lat = make_lattice(1, 1024.0, 8192);
    const auto ctx = make_context(lat, model_kind::inls, 0.25, q);
    evolution_spec spec = basic_spec(ctx, 0.0, 64.0, 0.01);
    spec.snapshot_times = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0};
    const trajectory tr = evolve(spec, gaussian_state(lat, 1.0, amplitude));
    return cauchy_increments(tr, spec.snapshot_times);
}

void suite_dichotomy(suite_result& out) {
    const std::vector<double> fast = dyadic_increments(3.0, 2.0);
    int increases = 0;
    for (size_t j = 0; j + 1 < fast.size(); ++j)
        if (fast[j + 1] > fast[j]) ++increases;
    add(out, "fast-dispersion dyadic increments, increases", increases, 0.0, 0.0);
    add(out, "fast-dispersion last/first increment", fast.back() / fast.front(), 0.0, 0.2);

    const std::vector<double> slow = dyadic_increments(1.5, 2.0);
    add(out, "slow-dispersion last/first increment", slow.back() / slow.front(), 0.5, inf);
}

} // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "transform", "propagator", "riesz",     "mass",  "energy-order", "virial",
        "pair",      "regime",     "lightcone", "decay", "upsilon",      "dichotomy"};
    return names;
}

suite_result run_suite(const std::string& name, const std::string& fixture_dir) {
    suite_result out;
    out.suite = name;
    const auto started = std::chrono::steady_clock::now();
    if (name == "transform")
        suite_transform(out);
    else if (name == "propagator")
        suite_propagator(out);
    else if (name == "riesz")
        suite_riesz(out);
    else if (name == "mass")
        suite_mass(out);
    else if (name == "energy-order")
        suite_energy_order(out);
    else if (name == "virial")
        suite_virial(out);
    else if (name == "pair")
        suite_pair(out, fixture_dir);
    else if (name == "regime")
        suite_regime(out);
    else if (name == "lightcone")
        suite_lightcone(out);
    else if (name == "decay")
        suite_decay(out);
    else if (name == "upsilon")
        suite_upsilon(out);
    else if (name == "dichotomy")
        suite_dichotomy(out);
    else
        fail(errc::unknown_system, "no verification suite named '" + name + "'");
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.passed = !out.lines.empty();
    for (const check_line& line : out.lines) out.passed = out.passed && line.passed;
    return out;
}

} // namespace dlab

#include "operators.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace dlab {

namespace {
using std::numbers::pi;
}

nonlinear_context make_context(const lattice& lat, model_kind model, double b, double q,
                               double alpha) {
    require(std::isfinite(b) && b >= 0, errc::invalid_params, "weight exponent b must be >= 0");
    require(std::isfinite(q) && q >= 1, errc::invalid_params, "nonlinearity power q must be >= 1");
    nonlinear_context ctx{model,    lat, b, q, alpha, weight_field(lat, b),
                          weight_field(lat, b / (1 + q)), {}};
    if (model == model_kind::inlh)
        ctx.riesz = riesz_multiplier(lat, alpha);
    else
        ctx.alpha = 0;
    return ctx;
}

double riesz_constant(int dim, double alpha) {
    require(dim >= 1 && std::isfinite(alpha) && alpha > 0 && alpha < dim, errc::bad_order,
            "kernel order must satisfy 0 < alpha < dim");
    return std::tgamma((dim - alpha) / 2) /
           (std::tgamma(alpha / 2) * std::pow(pi, dim / 2.0) * std::pow(2.0, alpha));
}

double lebesgue_norm(const field& f, double r) {
    require(r >= 1, errc::invalid_params, "Lebesgue exponent must be >= 1");
    if (std::isinf(r)) {
        double m = 0;
        for (const auto& z : f.a) m = std::max(m, std::abs(z));
        return m;
    }
    double s = 0;
    for (const auto& z : f.a) s += std::pow(std::abs(z), r);
    return std::pow(std::pow(f.lat.step(), f.lat.dim) * s, 1.0 / r);
}

std::complex<double> inner_product(const field& f, const field& g) {
    require(f.lat == g.lat, errc::lattice_mismatch, "inner product needs a shared lattice");
    std::complex<double> s = 0;
    for (size_t j = 0; j < f.a.size(); ++j) s += std::conj(f.a[j]) * g.a[j];
    return std::pow(f.lat.step(), f.lat.dim) * s;
}

field free_propagate(const field& f, double t) {
    field F = forward_transform(f);
    const auto k2 = frequency_squared(F.lat);
    for (size_t j = 0; j < k2.size(); ++j) F.a[j] *= std::polar(1.0, -k2[j] * t);
    return inverse_transform(F);
}

std::vector<double> phase_potential(const field& f, const nonlinear_context& ctx) {
    require(f.lat == ctx.lat, errc::lattice_mismatch, "field and context lattices differ");
    std::vector<double> w(f.a.size());
    if (ctx.model == model_kind::inls) {
        const double e = ctx.q - 1;
        for (size_t j = 0; j < w.size(); ++j) {
            const double m = std::abs(f.a[j]);
            w[j] = e == 0 ? ctx.weight_b[j]
                          : (m == 0 ? 0.0 : ctx.weight_b[j] * std::pow(m, e));
        }
    } else {
        const field pot = hartree_potential(f, ctx);
        const double e = ctx.q - 2;
        for (size_t j = 0; j < w.size(); ++j) {
            const double m = std::abs(f.a[j]);
            w[j] = e == 0 ? pot.a[j].real() * ctx.weight_b[j]
                          : (m == 0 ? 0.0
                                    : pot.a[j].real() * ctx.weight_b[j] * std::pow(m, e));
        }
    }
    return w;
}

field inls_rhs(const field& f, const nonlinear_context& ctx) {
    require(ctx.model == model_kind::inls, errc::model_mismatch,
            "power-law right-hand side needs a power-law context");
    const auto w = phase_potential(f, ctx);
    field out = f;
    for (size_t j = 0; j < out.a.size(); ++j) out.a[j] *= w[j];
    return out;
}

field hartree_potential(const field& f, const nonlinear_context& ctx) {
    require(ctx.model == model_kind::inlh, errc::model_mismatch,
            "convolution potential needs a Hartree context");
    require(f.lat == ctx.lat, errc::lattice_mismatch, "field and context lattices differ");
    field dens = make_field(f.lat);
    for (size_t j = 0; j < dens.a.size(); ++j)
        dens.a[j] = ctx.weight_b[j] * std::pow(std::abs(f.a[j]), ctx.q);
    field D = forward_transform(dens);
    for (size_t j = 0; j < D.a.size(); ++j) D.a[j] *= ctx.riesz.v[j];
    return inverse_transform(D);
}

field inlh_rhs(const field& f, const nonlinear_context& ctx) {
    require(ctx.model == model_kind::inlh, errc::model_mismatch,
            "Hartree right-hand side needs a Hartree context");
    const auto w = phase_potential(f, ctx);
    field out = f;
    for (size_t j = 0; j < out.a.size(); ++j) out.a[j] *= w[j];
    return out;
}

field riesz_convolve_oracle(const field& f, double alpha) {
    const lattice& lat = f.lat;
    require(lat.size() <= (size_t(1) << 16), errc::too_large,
            "direct-summation oracle is limited to 2^16 points");
    require(std::isfinite(alpha) && alpha > 0 && alpha < lat.dim, errc::bad_order,
            "convolution order must satisfy 0 < alpha < dim");

    const size_t total = lat.size();
    const int n = lat.n;
    std::vector<double> kax(static_cast<size_t>(n));
    for (int m = 0; m < n; ++m) kax[static_cast<size_t>(m)] = axis_frequency(lat, m);

    // Kernel on the difference lattice: (1/L^dim) sum over nonzero lattice
    // frequencies of |k|^-alpha exp(i k . delta). The frequency set is
    // conjugation-symmetric up to the Nyquist row, whose phase is real on
    // lattice differences, so the sum is real to roundoff. Omitting the zero
    // mode makes constants map to zero, matching the spectral convention.
    std::vector<double> kern(total);
    const double vol = std::pow(lat.extent, lat.dim);
    for (size_t d = 0; d < total; ++d) {
        int di[3];
        unravel(lat, d, di);
        std::complex<double> acc = 0;
        for (size_t m = 0; m < total; ++m) {
            int mi[3];
            unravel(lat, m, mi);
            double k2 = 0, phase = 0;
            for (int a = 0; a < lat.dim; ++a) {
                const double k = kax[static_cast<size_t>(mi[a])];
                k2 += k * k;
                phase += k * (di[a] * lat.step());
            }
            if (k2 == 0) continue;
            acc += std::pow(k2, -alpha / 2) * std::polar(1.0, phase);
        }
        kern[d] = acc.real() / vol;
    }

    field out = make_field(lat);
    const double hd = std::pow(lat.step(), lat.dim);
    for (size_t i = 0; i < total; ++i) {
        int ii[3];
        unravel(lat, i, ii);
        std::complex<double> acc = 0;
        for (size_t j = 0; j < total; ++j) {
            int jj[3];
            unravel(lat, j, jj);
            size_t kidx = 0;
            for (int a = 0; a < lat.dim; ++a) {
                int d = ii[a] - jj[a];
                if (d < 0) d += n;
                kidx = kidx * static_cast<size_t>(n) + static_cast<size_t>(d);
            }
            acc += kern[kidx] * f.a[j];
        }
        out.a[i] = hd * acc;
    }
    return out;
}

double dispersive_ratio(const field& f, double t, double r) {
    require(t > 0, errc::invalid_params, "dispersive ratio needs t > 0");
    require(r >= 2, errc::invalid_params, "dispersive ratio needs r >= 2");
    const double rp = std::isinf(r) ? 1.0 : r / (r - 1);
    const field u = free_propagate(f, t);
    const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
    return lebesgue_norm(u, r) * std::pow(t, f.lat.dim * (0.5 - inv_r)) / lebesgue_norm(f, rp);
}

double hls_ratio(const field& g, double alpha, double s, double r) {
    require(s > 1 && r > 1, errc::invalid_params, "norm exponents must exceed 1");
    require(std::abs(1 / r - 1 / s - alpha / g.lat.dim) <= 1e-12, errc::exponent_mismatch,
            "need 1/r = 1/s + alpha/dim");
    const double den = lebesgue_norm(g, r);
    if (den == 0) return 0;
    const spectral_multiplier mult = riesz_multiplier(g.lat, alpha);
    field G = forward_transform(g);
    for (size_t j = 0; j < G.a.size(); ++j) G.a[j] *= mult.v[j];
    return lebesgue_norm(inverse_transform(G), s) / den;
}

} // namespace dlab

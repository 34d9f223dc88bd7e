#include "regime.hpp"

#include "errors.hpp"

namespace dlab {

namespace {

// Closed or open interval endpoint over the rationals.
struct bound {
    rational value;
    bool open = true;
};

// Starts unconstrained; cuts only tighten. Every interval we take a
// midpoint of has been bounded on both sides by then.
struct interval {
    std::optional<bound> lo, hi;

    void cut_lo(const rational& v, bool open) {
        if (!lo || v > lo->value || (v == lo->value && open && !lo->open)) lo = bound{v, open};
    }
    void cut_hi(const rational& v, bool open) {
        if (!hi || v < hi->value || (v == hi->value && open && !hi->open)) hi = bound{v, open};
    }
    bool empty() const {
        if (!lo || !hi) return false;
        if (lo->value > hi->value) return true;
        if (lo->value == hi->value) return lo->open || hi->open;
        return false;
    }
    rational midpoint() const { return (lo->value + hi->value) / 2; }
};

using witness_map = std::vector<std::pair<std::string, rational>>;

// Splits a fixed sum S into two reciprocal exponents, the first confined to
// [lo1, hi1] (openness per flags), the second to [lo2, hi2]; takes the
// midpoint of the induced interval for the first slot.
std::optional<std::pair<rational, rational>> split_pair(const rational& S, interval first,
                                                        const interval& second) {
    first.cut_lo(S - second.hi->value, second.hi->open);
    first.cut_hi(S - second.lo->value, second.lo->open);
    if (first.empty()) return std::nullopt;
    rational x = first.midpoint();
    return std::make_pair(x, S - x);
}

interval ball_exponent(const rational& bn) {
    // |x|^-b integrable over the unit ball: 1/e in (b/N, 1].
    interval iv;
    iv.cut_lo(bn, true);
    iv.cut_hi(rational(1), false);
    return iv;
}

interval exterior_exponent(const rational& bn) {
    // |x|^-b integrable outside the unit ball: 1/e in [0, b/N).
    interval iv;
    iv.cut_lo(rational(0), false);
    iv.cut_hi(bn, true);
    return iv;
}

exponent_certificate inls_inner_cert(const model_params& p) {
    exponent_certificate cert{exponent_system::inls_inner, false, {}};
    const rational bn = p.b / p.dim;
    // 1/a = 1 - q/2 - 1/gamma with 1/a in (b/N, 1], 1/gamma in (0, 1].
    interval g;
    g.cut_lo(rational(0), true);
    g.cut_hi(rational(1), false);
    const rational cap = 1 - p.q / 2;
    g.cut_hi(cap - bn, true);   // 1/a > b/N
    g.cut_lo(cap - 1, false);   // 1/a <= 1
    if (g.empty()) return cert;
    rational ig = g.midpoint();
    cert.feasible = true;
    cert.witness = {{"1/gamma", ig}, {"1/a", cap - ig}};
    return cert;
}

exponent_certificate inls_outer_cert(const model_params& p) {
    exponent_certificate cert{exponent_system::inls_outer, false, {}};
    const rational bn = p.b / p.dim;
    // 1/d = 1 - q/2 - 1/beta with 1/d in [0, b/N), 1/beta in [0, 1/2].
    interval y;
    y.cut_lo(rational(0), false);
    y.cut_hi(rational(1, 2), false);
    const rational cap = 1 - p.q / 2;
    y.cut_lo(cap - bn, true);   // 1/d < b/N
    y.cut_lo(-p.q / 2 - bn, true);
    y.cut_hi(cap, false);       // 1/d >= 0
    if (y.empty()) return cert;
    rational ib = y.midpoint();
    cert.feasible = true;
    cert.witness = {{"1/beta", ib}, {"1/d", cap - ib}};
    return cert;
}

// Shared skeleton of the four Hartree systems: a free reciprocal exponent v
// (1/r or 2q/r) fixes the pair sum S = base - v, and S is split twice, once
// per Hoelder pair. pair1/pair2 give each slot's standalone interval.
struct pair_spec {
    interval slot1, slot2;
    const char* name1;
    const char* name2;
};

std::optional<witness_map> solve_hartree(const rational& base, interval free_iv,
                                         const char* free_name, const pair_spec& p1,
                                         const pair_spec& p2) {
    // Admissible S values for each pair, intersected, pulled back to the
    // free variable (S decreases as the free variable grows).
    auto s_window = [](const pair_spec& ps) {
        interval w;
        w.lo = bound{ps.slot1.lo->value + ps.slot2.lo->value,
                     ps.slot1.lo->open || ps.slot2.lo->open};
        w.hi = bound{ps.slot1.hi->value + ps.slot2.hi->value,
                     ps.slot1.hi->open || ps.slot2.hi->open};
        return w;
    };
    interval w1 = s_window(p1), w2 = s_window(p2);
    free_iv.cut_lo(base - w1.hi->value, w1.hi->open);
    free_iv.cut_hi(base - w1.lo->value, w1.lo->open);
    free_iv.cut_lo(base - w2.hi->value, w2.hi->open);
    free_iv.cut_hi(base - w2.lo->value, w2.lo->open);
    if (free_iv.empty()) return std::nullopt;

    const rational v = free_iv.midpoint();
    const rational S = base - v;
    auto s1 = split_pair(S, p1.slot1, p1.slot2);
    auto s2 = split_pair(S, p2.slot1, p2.slot2);
    if (!s1 || !s2) return std::nullopt;

    witness_map w;
    w.emplace_back(free_name, v);
    w.emplace_back(p1.name1, s1->first);
    w.emplace_back(p1.name2, s1->second);
    w.emplace_back(p2.name1, s2->first);
    w.emplace_back(p2.name2, s2->second);
    return w;
}

interval half_open_positive() {
    // r > 2 with r finite: 1/r in (0, 1/2).
    interval iv;
    iv.cut_lo(rational(0), true);
    iv.cut_hi(rational(1, 2), true);
    return iv;
}

exponent_certificate inlh_c1_cert(const model_params& p) {
    exponent_certificate cert{exponent_system::inlh_c1, false, {}};
    const rational bn = p.b / p.dim;
    const rational base = rational(3, 2) + p.alpha / p.dim - p.q; // S = base - 1/r
    pair_spec ball_ball{ball_exponent(bn), ball_exponent(bn), "1/e1", "1/f1"};
    pair_spec ball_ext{ball_exponent(bn), exterior_exponent(bn), "1/e2", "1/f2"};
    auto w = solve_hartree(base, half_open_positive(), "1/r", ball_ball, ball_ext);
    if (!w) return cert;
    cert.feasible = true;
    cert.witness = std::move(*w);
    return cert;
}

exponent_certificate inlh_c2_cert(const model_params& p) {
    exponent_certificate cert{exponent_system::inlh_c2, false, {}};
    const rational bn = p.b / p.dim;
    const rational base = rational(3, 2) + p.alpha / p.dim - p.q;
    pair_spec ball_ext{ball_exponent(bn), exterior_exponent(bn), "1/g1", "1/h1"};
    pair_spec ext_ext{exterior_exponent(bn), exterior_exponent(bn), "1/g2", "1/h2"};
    auto w = solve_hartree(base, half_open_positive(), "1/r2", ball_ext, ext_ext);
    if (!w) return cert;
    cert.feasible = true;
    cert.witness = std::move(*w);
    return cert;
}

// The two decay-estimate systems work in z = 2q/r so the pair sum is
// S = 1 + alpha/N - z. The admissible z window additionally encodes
// 0 < nu = N(1/2 - 1/r) < 1/q, i.e. q - 2/N < z < q.
interval decay_free_interval(const model_params& p) {
    interval z;
    z.cut_lo(rational(0), true);
    z.cut_hi(p.q, true);                       // r > 2
    z.cut_lo(p.q - rational(2, p.dim), true);  // nu < 1/q
    return z;
}

exponent_certificate inlh_e1_cert(const model_params& p) {
    exponent_certificate cert{exponent_system::inlh_e1, false, {}};
    const rational bn = p.b / p.dim;
    const rational base = 1 + p.alpha / p.dim;
    pair_spec ball_ball{ball_exponent(bn), ball_exponent(bn), "1/a1", "1/b1"};
    pair_spec ball_ext{ball_exponent(bn), exterior_exponent(bn), "1/a2", "1/b2"};
    auto w = solve_hartree(base, decay_free_interval(p), "2q/r1", ball_ball, ball_ext);
    if (!w) return cert;
    const rational z = (*w)[0].second;
    const rational ir = z / (2 * p.q);
    witness_map out;
    out.emplace_back("1/r1", ir);
    out.emplace_back("nu1", p.dim * (rational(1, 2) - ir));
    out.insert(out.end(), w->begin() + 1, w->end());
    cert.feasible = true;
    cert.witness = std::move(out);
    return cert;
}

exponent_certificate inlh_e2_cert(const model_params& p) {
    exponent_certificate cert{exponent_system::inlh_e2, false, {}};
    const rational bn = p.b / p.dim;
    const rational base = 1 + p.alpha / p.dim;
    pair_spec ext_ext{exterior_exponent(bn), exterior_exponent(bn), "1/a1", "1/b1"};
    pair_spec ball_ext{ball_exponent(bn), exterior_exponent(bn), "1/a2", "1/b2"};
    auto w = solve_hartree(base, decay_free_interval(p), "2q/r2", ext_ext, ball_ext);
    if (!w) return cert;
    const rational z = (*w)[0].second;
    const rational ir = z / (2 * p.q);
    witness_map out;
    out.emplace_back("1/r2", ir);
    out.emplace_back("nu2", p.dim * (rational(1, 2) - ir));
    out.insert(out.end(), w->begin() + 1, w->end());
    cert.feasible = true;
    cert.witness = std::move(out);
    return cert;
}

} // namespace

const char* system_name(exponent_system s) {
    switch (s) {
        case exponent_system::inls_inner: return "INLS_inner";
        case exponent_system::inls_outer: return "INLS_outer";
        case exponent_system::inlh_c1: return "INLH_C1";
        case exponent_system::inlh_c2: return "INLH_C2";
        case exponent_system::inlh_e1: return "INLH_E1";
        case exponent_system::inlh_e2: return "INLH_E2";
    }
    return "?";
}

const char* criticality_name(criticality c) {
    switch (c) {
        case criticality::subcritical: return "subcritical";
        case criticality::critical: return "critical";
        case criticality::supercritical: return "supercritical";
    }
    return "?";
}

const char* label_name(theorem_label l) {
    switch (l) {
        case theorem_label::scattering: return "Scattering";
        case theorem_label::non_scattering: return "NonScattering";
        case theorem_label::out_of_range: return "OutOfTheoremRange";
    }
    return "?";
}

std::vector<exponent_system> systems_for(model_kind model) {
    if (model == model_kind::inls)
        return {exponent_system::inls_inner, exponent_system::inls_outer};
    return {exponent_system::inlh_c1, exponent_system::inlh_c2, exponent_system::inlh_e1,
            exponent_system::inlh_e2};
}

bool validate_constraints(const model_params& p) {
    std::vector<std::string> reasons;
    return validate_constraints(p, reasons);
}

bool validate_constraints(const model_params& p, std::vector<std::string>& reasons) {
    if (p.dim < 1) reasons.push_back("N must be a positive integer");
    if (p.q <= 1) reasons.push_back("q must exceed 1");
    if (p.model == model_kind::inls) {
        if (p.b <= 0 || p.b >= 1) reasons.push_back("inls requires 0 < b < 1");
        if (p.b >= p.dim) reasons.push_back("inls requires b < N");
    } else {
        if (p.b <= 0) reasons.push_back("inlh requires b > 0");
        if (p.alpha <= 0) reasons.push_back("inlh requires alpha > 0");
        if (p.alpha >= p.dim) reasons.push_back("inlh requires alpha < N");
        if (p.b >= p.dim) reasons.push_back("inlh requires b < N");
        if (1 - 2 * p.b + p.alpha <= 0) reasons.push_back("inlh requires 1 - 2b + alpha > 0");
    }
    return reasons.empty();
}

rational critical_exponent(const model_params& p) {
    require(p.q != 1, errc::invalid_params, "critical exponent undefined at q = 1");
    if (p.model == model_kind::inls) return rational(p.dim, 2) - (2 - p.b) / (p.q - 1);
    return rational(p.dim, 2) - (2 - 2 * p.b + p.alpha) / (2 * (p.q - 1));
}

exponent_certificate feasibility(const model_params& p, exponent_system system) {
    const bool is_inls = p.model == model_kind::inls;
    switch (system) {
        case exponent_system::inls_inner:
            require(is_inls, errc::unknown_system, "INLS_inner needs an inls parameter set");
            return inls_inner_cert(p);
        case exponent_system::inls_outer:
            require(is_inls, errc::unknown_system, "INLS_outer needs an inls parameter set");
            return inls_outer_cert(p);
        case exponent_system::inlh_c1:
            require(!is_inls, errc::unknown_system, "INLH_C1 needs an inlh parameter set");
            return inlh_c1_cert(p);
        case exponent_system::inlh_c2:
            require(!is_inls, errc::unknown_system, "INLH_C2 needs an inlh parameter set");
            return inlh_c2_cert(p);
        case exponent_system::inlh_e1:
            require(!is_inls, errc::unknown_system, "INLH_E1 needs an inlh parameter set");
            return inlh_e1_cert(p);
        case exponent_system::inlh_e2:
            require(!is_inls, errc::unknown_system, "INLH_E2 needs an inlh parameter set");
            return inlh_e2_cert(p);
    }
    fail(errc::unknown_system, "unrecognized exponent system");
}

regime_report classify(const model_params& p, const classify_options& opts) {
    std::vector<std::string> reasons;
    if (!validate_constraints(p, reasons)) {
        std::string what = "parameters violate theorem hypotheses";
        for (const auto& r : reasons) what += "; " + r;
        fail(errc::invalid_params, what);
    }

    regime_report rep;
    rep.valid = true;
    rep.s_crit = critical_exponent(p);
    rep.mass_class = rep.s_crit < 0   ? criticality::subcritical
                     : rep.s_crit > 0 ? criticality::supercritical
                                      : criticality::critical;

    const rational N = p.dim;
    if (p.model == model_kind::inls) {
        const rational lower = 1 + (2 - 2 * p.b) / N;   // short-range threshold
        const rational upper = 1 + 2 * (2 - p.b) / N;   // mass-critical exponent
        if (p.q < lower)
            rep.label = theorem_label::non_scattering;
        else if (p.q < upper) // closed left endpoint
            rep.label = theorem_label::scattering;
        else
            rep.label = theorem_label::out_of_range;
    } else {
        const rational split = 1 + (1 + p.alpha - 2 * p.b) / N; // strict on both sides
        const rational upper = 1 + (2 - 2 * p.b + p.alpha) / N; // mass-critical exponent
        rational ns_lo = 1 + (p.alpha - 2 * p.b) / N;
        if (ns_lo < 1) ns_lo = 1;
        bool non_scattering = ns_lo < p.q && p.q < split;
        if (p.dim == 1) {
            // Covered only under an extra hypothesis; off by default.
            if (!opts.hartree_n1_extra) {
                if (non_scattering)
                    rep.note = "N=1 non-scattering range needs the extra bound "
                               "q < 3/2 + (alpha-2b)/N; enable it explicitly";
                non_scattering = false;
            } else {
                non_scattering = non_scattering && p.q < rational(3, 2) + (p.alpha - 2 * p.b) / N;
            }
        }
        if (non_scattering)
            rep.label = theorem_label::non_scattering;
        else if (split < p.q && p.q < upper)
            rep.label = theorem_label::scattering;
        else
            rep.label = theorem_label::out_of_range;
    }

    for (exponent_system s : systems_for(p.model)) rep.certificates.push_back(feasibility(p, s));
    return rep;
}

} // namespace dlab

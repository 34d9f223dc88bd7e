#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "rational.hpp"
#include "regime.hpp"

using namespace dlab;

namespace {

rational rat(const char* s) {
    auto r = parse_rational(s);
    REQUIRE(r.has_value());
    return *r;
}

model_params inls(int N, const char* b, const char* q) {
    return {model_kind::inls, N, rat(b), rat(q), rational(0)};
}

model_params inlh(int N, const char* alpha, const char* b, const char* q) {
    return {model_kind::inlh, N, rat(b), rat(q), rat(alpha)};
}

// Independent re-derivation of the theorem ranges, written directly from the
// statements (no shared code with classify).
theorem_label oracle_label(const model_params& p, bool n1_extra) {
    const rational N = p.dim;
    if (p.model == model_kind::inls) {
        if (1 < p.q && p.q < 1 + (2 - 2 * p.b) / N) return theorem_label::non_scattering;
        if (1 + (2 - 2 * p.b) / N <= p.q && p.q < 1 + 2 * (2 - p.b) / N)
            return theorem_label::scattering;
        return theorem_label::out_of_range;
    }
    rational lo = rational(1 + (p.alpha - 2 * p.b) / N);
    if (lo < 1) lo = 1;
    const rational mid = 1 + (1 + p.alpha - 2 * p.b) / N;
    const rational hi = 1 + (2 - 2 * p.b + p.alpha) / N;
    bool ns = lo < p.q && p.q < mid;
    if (p.dim == 1) ns = ns && n1_extra && p.q < rational(3, 2) + (p.alpha - 2 * p.b) / N;
    if (ns) return theorem_label::non_scattering;
    if (mid < p.q && p.q < hi) return theorem_label::scattering;
    return theorem_label::out_of_range;
}

bool oracle_valid(const model_params& p) {
    if (p.dim < 1 || p.q <= 1) return false;
    if (p.model == model_kind::inls) return 0 < p.b && p.b < 1 && p.b < p.dim;
    rational m = p.b;
    for (const rational& v : {rational(p.alpha), rational(p.dim - p.alpha),
                              rational(p.dim - p.b), rational(1 - 2 * p.b + p.alpha)})
        if (v < m) m = v;
    return m > 0;
}

rational witness_value(const exponent_certificate& c, const std::string& key) {
    for (const auto& [k, v] : c.witness)
        if (k == key) return v;
    FAIL("missing witness entry " << key);
    return rational(0);
}

// Substitutes a certificate's witness into every constraint of its system.
void check_witness(const model_params& p, const exponent_certificate& c) {
    const rational bn = p.b / p.dim;
    auto on_ball = [&](const rational& e) { return bn < e && e <= 1; };
    auto off_ball = [&](const rational& e) { return 0 <= e && e < bn; };

    switch (c.system) {
        case exponent_system::inls_inner: {
            rational ig = witness_value(c, "1/gamma"), ia = witness_value(c, "1/a");
            CHECK(ia == 1 - p.q / 2 - ig);
            CHECK(on_ball(ia));
            CHECK(rational(0) < ig);
            CHECK(ig < 1 - p.q / 2 - bn);
            break;
        }
        case exponent_system::inls_outer: {
            rational ib = witness_value(c, "1/beta"), id = witness_value(c, "1/d");
            CHECK(id == 1 - p.q / 2 - ib);
            CHECK(off_ball(id));
            CHECK(rational(0) <= ib);
            CHECK(ib <= rational(1, 2));
            CHECK(ib > -p.q / 2 - bn);
            break;
        }
        case exponent_system::inlh_c1: {
            rational ir = witness_value(c, "1/r");
            rational e1 = witness_value(c, "1/e1"), f1 = witness_value(c, "1/f1");
            rational e2 = witness_value(c, "1/e2"), f2 = witness_value(c, "1/f2");
            rational S = rational(3, 2) + p.alpha / p.dim - p.q - ir;
            CHECK(e1 + f1 == S);
            CHECK(e2 + f2 == S);
            CHECK(rational(0) < ir);
            CHECK(ir < rational(1, 2));
            CHECK(on_ball(e1));
            CHECK(on_ball(f1));
            CHECK(on_ball(e2));
            CHECK(off_ball(f2));
            CHECK(S > 2 * bn);
            CHECK(ir < rational(3, 2) + p.alpha / p.dim - p.q - 2 * bn);
            break;
        }
        case exponent_system::inlh_c2: {
            rational ir = witness_value(c, "1/r2");
            rational g1 = witness_value(c, "1/g1"), h1 = witness_value(c, "1/h1");
            rational g2 = witness_value(c, "1/g2"), h2 = witness_value(c, "1/h2");
            rational T = rational(3, 2) + p.alpha / p.dim - p.q - ir;
            CHECK(g1 + h1 == T);
            CHECK(g2 + h2 == T);
            CHECK(rational(3, 2) + p.alpha / p.dim - p.q - 2 * bn < ir);
            CHECK(ir < rational(1, 2));
            CHECK(on_ball(g1));
            CHECK(off_ball(h1));
            CHECK(off_ball(g2));
            CHECK(off_ball(h2));
            break;
        }
        case exponent_system::inlh_e1: {
            rational ir = witness_value(c, "1/r1"), nu = witness_value(c, "nu1");
            rational a1 = witness_value(c, "1/a1"), b1 = witness_value(c, "1/b1");
            rational a2 = witness_value(c, "1/a2"), b2 = witness_value(c, "1/b2");
            rational z = 2 * p.q * ir;
            rational U = 1 + p.alpha / p.dim - z;
            CHECK(a1 + b1 == U);
            CHECK(a2 + b2 == U);
            CHECK(on_ball(a1));
            CHECK(on_ball(b1));
            CHECK(on_ball(a2));
            CHECK(off_ball(b2));
            CHECK(a1 + b1 > 2 * bn);
            CHECK(rational(0) < z);
            CHECK(z < 1 + (p.alpha - 2 * p.b) / p.dim);
            CHECK(nu == p.dim * (rational(1, 2) - ir));
            CHECK(rational(0) < nu);
            CHECK(nu < 1 / p.q);
            break;
        }
        case exponent_system::inlh_e2: {
            rational ir = witness_value(c, "1/r2"), nu = witness_value(c, "nu2");
            rational a1 = witness_value(c, "1/a1"), b1 = witness_value(c, "1/b1");
            rational a2 = witness_value(c, "1/a2"), b2 = witness_value(c, "1/b2");
            rational z = 2 * p.q * ir;
            rational U = 1 + p.alpha / p.dim - z;
            CHECK(a1 + b1 == U);
            CHECK(a2 + b2 == U);
            CHECK(off_ball(a1));
            CHECK(off_ball(b1));
            CHECK(on_ball(a2));
            CHECK(off_ball(b2));
            CHECK(z > 1 + (p.alpha - 2 * p.b) / p.dim);
            CHECK(z < p.q);
            CHECK(nu == p.dim * (rational(1, 2) - ir));
            CHECK(rational(0) < nu);
            CHECK(nu < 1 / p.q);
            break;
        }
    }
}

} // namespace

TEST_CASE("rational parsing is exact") {
    CHECK(rat("0.25") == rational(1, 4));
    CHECK(rat("1/3") == rational(1, 3));
    CHECK(rat("2") == rational(2));
    CHECK(rat("-1.5") == rational(-3, 2));
    CHECK(rat("3/8") == rational(3, 8));
    CHECK(rat("1.5/0.5") == rational(3));
    CHECK(rational_string(rat("-2.5")) == "-5/2");
    CHECK(rational_string(rat("4/2")) == "2");
    CHECK(!parse_rational("a").has_value());
    CHECK(!parse_rational("1/0").has_value());
    CHECK(!parse_rational("1.2.3").has_value());
    CHECK(!parse_rational("").has_value());
}

TEST_CASE("hypothesis validation") {
    CHECK(validate_constraints(inlh(3, "2", "1/2", "2")));
    CHECK(!validate_constraints(inlh(2, "2", "1/4", "2")));   // alpha = N
    CHECK(!validate_constraints(inls(1, "1", "3/2")));        // b = 1
    CHECK(!validate_constraints(inls(2, "0", "3/2")));        // b = 0
    CHECK(!validate_constraints(inls(2, "1/2", "1")));        // q = 1
    CHECK(!validate_constraints(inlh(2, "1/2", "1", "2")));   // 1 - 2b + alpha = -1/2
    CHECK(validate_constraints(inlh(2, "3/2", "1", "2")));    // 1 - 2b + alpha = 1/2
    std::vector<std::string> reasons;
    CHECK(!validate_constraints(inlh(2, "2", "1/4", "2"), reasons));
    CHECK(!reasons.empty());
}

TEST_CASE("critical exponent values") {
    CHECK(critical_exponent(inls(2, "1/2", "5/2")) == rational(0));
    CHECK(critical_exponent(inls(1, "1/2", "3/2")) == rational(-5, 2));
    CHECK(critical_exponent(inlh(2, "1", "1/4", "2")) == rational(-1, 4));
}

TEST_CASE("classification of worked examples") {
    auto r1 = classify(inls(1, "1/2", "3/2"));
    CHECK(r1.label == theorem_label::non_scattering);
    CHECK(r1.mass_class == criticality::subcritical);

    auto r2 = classify(inls(2, "1/2", "2"));
    CHECK(r2.label == theorem_label::scattering);

    auto r3 = classify(inlh(2, "1", "1/4", "3/2"));
    CHECK(r3.label == theorem_label::non_scattering);

    auto r4 = classify(inlh(2, "1", "1/4", "2"));
    CHECK(r4.label == theorem_label::scattering);
    CHECK(r4.certificates.size() == 4);

    CHECK_THROWS_AS((void)classify(inls(1, "1", "3/2")), error);
}

TEST_CASE("boundary exactness") {
    // inls: left endpoint of the scattering range is included.
    auto p = inls(3, "1/3", "1");
    p.q = 1 + (2 - 2 * p.b) / 3; // exactly 1 + (2-2b)/N
    CHECK(classify(p).label == theorem_label::scattering);

    // inls: the mass-critical exponent itself is out of range.
    p.q = 1 + 2 * (2 - p.b) / 3;
    CHECK(classify(p).label == theorem_label::out_of_range);
    CHECK(classify(p).mass_class == criticality::critical);

    // inlh: the split exponent is excluded on both sides.
    auto h = inlh(2, "1", "1/4", "2");
    h.q = 1 + (1 + h.alpha - 2 * h.b) / 2;
    CHECK(classify(h).label == theorem_label::out_of_range);
}

TEST_CASE("hartree N=1 non-scattering sits behind the explicit flag") {
    auto p = inlh(1, "1/2", "1/4", "11/8");
    REQUIRE(validate_constraints(p));
    REQUIRE(oracle_label(p, true) == theorem_label::non_scattering);
    auto off = classify(p);
    CHECK(off.label == theorem_label::out_of_range);
    CHECK(!off.note.empty());
    classify_options opts;
    opts.hartree_n1_extra = true;
    CHECK(classify(p, opts).label == theorem_label::non_scattering);
}

TEST_CASE("feasibility worked examples") {
    auto c = feasibility(inls(2, "1/4", "3/2"), exponent_system::inls_inner);
    CHECK(c.feasible);
    CHECK(witness_value(c, "1/gamma") == rational(1, 16));

    auto inf = feasibility(inls(1, "1/2", "3/2"), exponent_system::inls_inner);
    CHECK(!inf.feasible);
    CHECK(inf.witness.empty());

    auto outer = feasibility(inls(1, "1/2", "3/2"), exponent_system::inls_outer);
    CHECK(outer.feasible);
    check_witness(inls(1, "1/2", "3/2"), outer);

    CHECK_THROWS_AS((void)feasibility(inls(1, "1/2", "3/2"), exponent_system::inlh_c1), error);
    CHECK_THROWS_AS((void)feasibility(inlh(2, "1", "1/4", "2"), exponent_system::inls_inner),
                    error);
}

TEST_CASE("witnesses satisfy their systems across a parameter sweep") {
    std::vector<rational> bs = {rat("1/8"), rat("1/4"), rat("1/2"), rat("3/4")};
    std::vector<rational> qs;
    for (int num = 9; num <= 40; ++num) qs.push_back(rational(num, 8));

    for (int N = 1; N <= 3; ++N) {
        for (const auto& b : bs) {
            for (const auto& q : qs) {
                model_params pi{model_kind::inls, N, b, q, rational(0)};
                if (validate_constraints(pi)) {
                    for (auto s : systems_for(model_kind::inls)) {
                        auto c = feasibility(pi, s);
                        if (c.feasible) check_witness(pi, c);
                    }
                }
                for (const auto& alpha : {rational(1, 2), rational(1), rational(3, 2)}) {
                    model_params ph{model_kind::inlh, N, b, q, alpha};
                    if (!validate_constraints(ph)) continue;
                    for (auto s : systems_for(model_kind::inlh)) {
                        auto c = feasibility(ph, s);
                        if (c.feasible) check_witness(ph, c);
                    }
                }
            }
        }
    }
}

TEST_CASE("non-scattering inls range implies both certificates for N >= 2") {
    for (int N = 2; N <= 4; ++N) {
        for (int bnum = 1; bnum <= 7; ++bnum) {
            rational b(bnum, 8);
            rational upper = 1 + (2 - 2 * b) / N;
            for (int k = 1; k <= 6; ++k) {
                rational q = 1 + (upper - 1) * k / 7;
                model_params p{model_kind::inls, N, b, q, rational(0)};
                REQUIRE(validate_constraints(p));
                REQUIRE(classify(p).label == theorem_label::non_scattering);
                CHECK(feasibility(p, exponent_system::inls_inner).feasible);
                CHECK(feasibility(p, exponent_system::inls_outer).feasible);
            }
        }
    }
}

TEST_CASE("hartree certificates are feasible inside their theorem ranges for N >= 2") {
    for (int N = 2; N <= 3; ++N) {
        for (int anum = 1; anum <= 2 * N - 1; ++anum) {
            rational alpha(anum, 2);
            for (int bnum = 1; bnum <= 5; ++bnum) {
                rational b(bnum, 8);
                model_params p{model_kind::inlh, N, b, rational(2), alpha};
                if (!validate_constraints(p)) continue;
                rational lo = rational(1 + (alpha - 2 * b) / N);
                if (lo < 1) lo = 1;
                rational mid = 1 + (1 + alpha - 2 * b) / N;
                rational hi = 1 + (2 - 2 * b + alpha) / N;
                for (int k = 1; k <= 4; ++k) {
                    p.q = lo + (mid - lo) * k / 5;
                    REQUIRE(classify(p).label == theorem_label::non_scattering);
                    CHECK(feasibility(p, exponent_system::inlh_c1).feasible);
                    CHECK(feasibility(p, exponent_system::inlh_c2).feasible);
                }
                for (int k = 1; k <= 4; ++k) {
                    p.q = mid + (hi - mid) * k / 5;
                    REQUIRE(classify(p).label == theorem_label::scattering);
                    CHECK(feasibility(p, exponent_system::inlh_e1).feasible);
                    CHECK(feasibility(p, exponent_system::inlh_e2).feasible);
                }
            }
        }
    }
}

TEST_CASE("classifier agrees with the brute-force oracle") {
    size_t checked = 0;
    for (int N = 1; N <= 4; ++N) {
        for (int bnum = 1; bnum <= 12; ++bnum) {
            rational b(bnum, 8);
            for (int qnum = 5; qnum <= 28; ++qnum) {
                rational q(qnum, 4);
                {
                    model_params p{model_kind::inls, N, b, q, rational(0)};
                    if (validate_constraints(p) == oracle_valid(p)) {
                        if (oracle_valid(p)) {
                            CHECK(classify(p).label == oracle_label(p, false));
                            ++checked;
                        }
                    } else {
                        FAIL("validity mismatch");
                    }
                }
                for (int anum = 1; anum <= 6; ++anum) {
                    rational alpha(anum, 2);
                    model_params p{model_kind::inlh, N, b, q, alpha};
                    REQUIRE(validate_constraints(p) == oracle_valid(p));
                    if (!oracle_valid(p)) continue;
                    CHECK(classify(p).label == oracle_label(p, false));
                    classify_options opts;
                    opts.hartree_n1_extra = true;
                    CHECK(classify(p, opts).label == oracle_label(p, true));
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 1000);
}

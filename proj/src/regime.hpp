#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace dlab {

enum class model_kind { inls, inlh };

// Parameter tuple for either equation. alpha is meaningful for inlh only.
struct model_params {
    model_kind model = model_kind::inls;
    int dim = 1; // spatial dimension N
    rational b = 0;
    rational q = 2;
    rational alpha = 0;
};

enum class criticality { subcritical, critical, supercritical };
enum class theorem_label { scattering, non_scattering, out_of_range };

enum class exponent_system {
    inls_inner,
    inls_outer,
    inlh_c1,
    inlh_c2,
    inlh_e1,
    inlh_e2,
};

const char* system_name(exponent_system s);
const char* criticality_name(criticality c);
const char* label_name(theorem_label l);

// Feasibility certificate for one Hoelder/Lebesgue exponent system. The
// witness lists reciprocal exponents (exact rationals) satisfying every
// constraint of the system; empty when infeasible.
struct exponent_certificate {
    exponent_system system;
    bool feasible = false;
    std::vector<std::pair<std::string, rational>> witness;
};

struct regime_report {
    bool valid = false;
    rational s_crit;
    criticality mass_class = criticality::subcritical;
    theorem_label label = theorem_label::out_of_range;
    std::vector<exponent_certificate> certificates;
    std::string note;
};

struct classify_options {
    // Opt-in one-dimensional non-scattering range for the Hartree model,
    // which needs the extra bound q < 3/2 + (alpha-2b)/N.
    bool hartree_n1_extra = false;
};

// Hypotheses shared by the covered theorems: q > 1; inls needs 0 < b < 1 and
// b < N; inlh needs min{b, alpha, N-alpha, N-b, 1-2b+alpha} > 0.
bool validate_constraints(const model_params& p);

// Appends human-readable reasons for each violated hypothesis.
bool validate_constraints(const model_params& p, std::vector<std::string>& reasons);

// Scaling-critical Sobolev index: N/2 - (2-b)/(q-1) for inls,
// N/2 - (2-2b+alpha)/(2(q-1)) for inlh. Exact.
rational critical_exponent(const model_params& p);

// Midpoint-witness feasibility check for one named system. Throws
// UnknownSystem if the system does not belong to p.model.
exponent_certificate feasibility(const model_params& p, exponent_system system);

// Full report: criticality class, theorem range membership (endpoint-exact),
// and certificates for every system applicable to the model. Requires
// validate_constraints(p); throws InvalidParams otherwise.
regime_report classify(const model_params& p, const classify_options& opts = {});

std::vector<exponent_system> systems_for(model_kind model);

} // namespace dlab

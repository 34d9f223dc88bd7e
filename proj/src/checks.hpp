#pragma once

#include <string>
#include <vector>

namespace dlab {

// One measured quantity with the closed interval it must land in.
struct check_line {
    std::string name;
    double measured = 0;
    double lo = 0;
    double hi = 0;
    bool passed = false;
};

struct suite_result {
    std::string suite;
    std::vector<check_line> lines;
    double seconds = 0;
    bool passed = false;
};

// Built-in numerical verification suites, in battery order:
//   transform    round-trip and Plancherel identities of the spectral engine
//   propagator   free flow against the closed-form Gaussian solution
//   riesz        spectral convolution against a direct-summation oracle and
//                the Coulomb potential of a Gaussian
//   mass         mass conservation over a thousand split steps, both models
//   energy-order energy drift halves twice in step size at second order
//   virial       variance second difference against the dilation identity,
//                plus the exact vanishing of its mass-critical coefficient
//   pair         the shipped change-of-frame equivalence pair
//   regime       exact-rational classifier against a brute-force inequality
//                oracle across every theorem range and boundary
//   lightcone    free-flow mass concentration inside the group-velocity cone
//   decay        weighted-potential decay exponent in the slow-dispersion
//                range
//   upsilon      sign of the main interaction-rate term along a run
//   dichotomy    dyadic profile increments shrinking (fast dispersion) or
//                persisting (slow dispersion) over a long horizon
const std::vector<std::string>& suite_names();

// Run one named suite. fixture_dir locates the shipped run configs for the
// suites that consume them (currently "pair"); the others ignore it.
suite_result run_suite(const std::string& name, const std::string& fixture_dir = "fixtures");

} // namespace dlab

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "integrator.hpp"
#include "regime.hpp"

namespace dlab {

// Version stamped into manifests and reported by the command-line tools.
const char* version_string();

enum class datum_kind { gaussian, modulated_gaussian, from_file };

// Initial state recipe. Gaussian: A exp(-|x|^2 / (2 sigma^2) + i chirp |x|^2).
// Modulated gaussian adds a plane-wave carrier exp(i k0 x_1). From-file loads
// a binary snapshot, which must match the configured lattice.
struct datum_spec {
    datum_kind kind = datum_kind::gaussian;
    double sigma = 1.0;
    double amplitude = 1.0;
    double chirp = 0.0;
    double k0 = 0.0;
    std::string path;
};

// One fully specified run. Model parameters are held twice on purpose:
// exact rationals drive the regime classifier, binary floats drive the
// solver, and the manifest records both.
struct run_config {
    model_params params;
    double b = 0.0;
    double q = 2.0;
    double alpha = 0.0;

    double extent = 0.0;
    int n = 0;

    double t0 = 0.0;
    double t1 = 0.0;
    double dt = 0.0;
    coefficient_kind coeff = coefficient_kind::unit;
    double coeff_exponent = 0.0;
    std::vector<double> snapshot_times;

    datum_spec datum;
    std::vector<std::string> diagnostics;
    std::string out_dir;
    unsigned long seed = 0;
    bool force = false;

    regime_report regime; // precomputed at parse time
};

// Diagnostic names accepted in a config's `diagnostics` list.
const std::vector<std::string>& known_diagnostics();

// Parse the documented key = value schema. Unknown keys, malformed values
// and missing required keys raise ParseError naming the line and key.
// Parameters failing the theorem hypotheses raise RegimeError unless
// force = true; otherwise the regime report is classified and embedded.
run_config parse_config(const std::string& text);
run_config load_config(const std::string& path);

// Deterministic canonical form of a config: the digest input. Records the
// rational and the float form of every numeric parameter.
std::string canonical_config_text(const run_config& cfg);

// FNV-1a (64-bit) of a byte string, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

struct manifest_entry {
    std::string name; // relative to the run directory
    std::string hash; // fnv1a_hex of the file bytes
    unsigned long long bytes = 0;
};

struct run_manifest {
    std::string config_digest;
    std::string code_version;
    std::string started;  // UTC wall clock, not covered by any hash
    std::string finished;
    std::vector<manifest_entry> files;
    regime_report regime;
    bool complete = false;
    std::string error;
};

// Build the initial state a config describes on the given lattice.
field make_datum(const datum_spec& datum, const lattice& lat);

// Execute one run: evolve, stream the selected diagnostics into the output
// directory, hash every emitted file and write manifest.json last. A failure
// mid-run still writes the manifest (complete = false, error set) before the
// exception propagates. Identical configs produce identical digests and file
// hashes on one platform.
run_manifest run(const run_config& cfg);

// Manifest check: every listed file exists and matches its recorded hash.
bool verify_manifest(const std::string& run_dir, std::string* why = nullptr);

struct sweep_row {
    rational q;
    std::string label; // theorem range label, or "invalid"
    bool ok = false;
    std::string error;
    std::string run_dir;
    std::optional<double> final_increment;
    std::optional<double> upsilon_slope;
    std::optional<double> potential_slope;
};

struct sweep_report {
    std::vector<sweep_row> rows;
    std::vector<std::string> warnings;
};

// One run per q value, executed by a small worker pool (runs are independent;
// each writes below base.out_dir). Duplicate q values are dropped with a
// warning. Every q is classified before anything is integrated; rows whose
// parameters fail validation are marked and skipped, and per-run failures
// never disturb sibling runs.
sweep_report sweep(const run_config& base, const std::vector<rational>& q_values,
                   int workers = 1);

// Joint check of a change-of-frame equivalence pair. The forward config is
// integrated on [1, T]; its final state is transformed into the contracted
// frame at t0 = 1/T and integrated independently to t = 1 under the
// contracted config, whose datum keys are ignored. Reported:
//   - mass error of the transform seed (the map is an isometry),
//   - relative gap at t = 1 between the contracted run and the transform of
//     the forward datum (the flows commute with the change of frame),
//   - transformed-equation residuals of the linked and the native
//     construction (they agree within a factor of ten),
//   - the monotone quantity along the contracted run (nondecreasing).
// `passed` requires mass error <= 1e-12, gap <= 1e-3, residual agreement
// within 10x both ways and no relative monotone dip below -1e-4. The two
// configs must describe the same model on the same point count, with the
// contracted box, time window and coefficient exponent matching what the
// change of frame produces; the forward datum must be analytic, and the
// contracted snapshot times must extend t0 to an equispaced grid so the
// residuals can difference them in time.
struct pair_report {
    double mass_isometry_error = 0;
    double meet_error = 0;
    double residual_linked = 0;
    double residual_native = 0;
    std::vector<std::pair<double, double>> monotone;
    double monotone_dip = 0;
    bool passed = false;
};
pair_report pair_check(const run_config& forward, const run_config& contracted);

// Table schema identifier written into every exported row set.
extern const char* const sweep_schema;

// Write a sweep report as RFC-4180 CSV or JSON lines (format "csv" or
// "jsonl"). Slope and increment columns are left empty, not zero, when the
// backing diagnostic was disabled or not computable.
void export_table(const sweep_report& report, const std::string& format,
                  const std::string& path);

// Bundled reader for exported tables; returns one string map per data row.
std::vector<std::map<std::string, std::string>> read_table(const std::string& path);

} // namespace dlab

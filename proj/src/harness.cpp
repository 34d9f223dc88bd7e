#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "conformal.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"

namespace dlab {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string iso_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t j = 0; j < parts.size(); ++j) {
        if (j) out += sep;
        out += parts[j];
    }
    return out;
}

// --- config parsing ---------------------------------------------------------

struct raw_config {
    std::map<std::string, std::pair<int, std::string>> kv; // key -> (line, value)
};

[[noreturn]] void parse_fail(int line, const std::string& key, const std::string& what) {
    fail(errc::parse_error,
         "line " + std::to_string(line) + ", key '" + key + "': " + what);
}

raw_config tokenize_config(const std::string& text) {
    raw_config raw;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        require(eq != std::string::npos, errc::parse_error,
                "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        require(!key.empty(), errc::parse_error,
                "line " + std::to_string(lineno) + ": empty key");
        if (raw.kv.count(key)) parse_fail(lineno, key, "duplicate key");
        raw.kv[key] = {lineno, value};
    }
    return raw;
}

class config_reader {
  public:
    explicit config_reader(raw_config raw) : raw_(std::move(raw)) {}

    bool has(const std::string& key) const { return raw_.kv.count(key) != 0; }

    std::string take_string(const std::string& key, const std::string& fallback) {
        auto it = raw_.kv.find(key);
        if (it == raw_.kv.end()) return fallback;
        seen_.push_back(key);
        return it->second.second;
    }

    std::string take_required(const std::string& key) {
        auto it = raw_.kv.find(key);
        require(it != raw_.kv.end(), errc::parse_error, "missing required key '" + key + "'");
        seen_.push_back(key);
        return it->second.second;
    }

    rational take_rational(const std::string& key, const rational& fallback) {
        auto it = raw_.kv.find(key);
        if (it == raw_.kv.end()) return fallback;
        seen_.push_back(key);
        return parse_at(it);
    }

    rational take_required_rational(const std::string& key) {
        auto it = raw_.kv.find(key);
        require(it != raw_.kv.end(), errc::parse_error, "missing required key '" + key + "'");
        seen_.push_back(key);
        return parse_at(it);
    }

    long take_integer(const std::string& key, long fallback) {
        auto it = raw_.kv.find(key);
        if (it == raw_.kv.end()) return fallback;
        seen_.push_back(key);
        const rational r = parse_at(it);
        if (denominator(r) != 1) parse_fail(it->second.first, key, "expected an integer");
        return static_cast<long>(numerator(r));
    }

    long take_required_integer(const std::string& key) {
        auto it = raw_.kv.find(key);
        require(it != raw_.kv.end(), errc::parse_error, "missing required key '" + key + "'");
        return take_integer(key, 0);
    }

    bool take_bool(const std::string& key, bool fallback) {
        auto it = raw_.kv.find(key);
        if (it == raw_.kv.end()) return fallback;
        seen_.push_back(key);
        const std::string& v = it->second.second;
        if (v == "true") return true;
        if (v == "false") return false;
        parse_fail(it->second.first, key, "expected true or false");
    }

    int line_of(const std::string& key) const {
        auto it = raw_.kv.find(key);
        return it == raw_.kv.end() ? 0 : it->second.first;
    }

    void reject_unknown() const {
        for (const auto& [key, lv] : raw_.kv)
            if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
                parse_fail(lv.first, key, "unknown key");
    }

  private:
    rational parse_at(std::map<std::string, std::pair<int, std::string>>::iterator it) {
        const auto r = parse_rational(it->second.second);
        if (!r) parse_fail(it->second.first, it->first, "not a decimal or fraction");
        return *r;
    }

    raw_config raw_;
    std::vector<std::string> seen_;
};

// --- emission helpers --------------------------------------------------------

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream os(path, std::ios::binary);
    require(os.good(), errc::io_error, "cannot open " + path + " for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    require(os.good(), errc::io_error, "short write to " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), errc::io_error, "cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json regime_to_json(const regime_report& r) {
    json certs = json::array();
    for (const auto& c : r.certificates) {
        json witness = json::array();
        for (const auto& [name, value] : c.witness)
            witness.push_back({name, rational_string(value)});
        certs.push_back({{"system", system_name(c.system)},
                         {"feasible", c.feasible},
                         {"witness", witness}});
    }
    return {{"valid", r.valid},
            {"s_crit", r.valid ? rational_string(r.s_crit) : ""},
            {"mass_class", criticality_name(r.mass_class)},
            {"label", label_name(r.label)},
            {"note", r.note},
            {"certificates", certs}};
}

const char* coefficient_name(coefficient_kind c) {
    switch (c) {
    case coefficient_kind::unit: return "unit";
    case coefficient_kind::power_law: return "power-law";
    case coefficient_kind::zero: return "zero";
    }
    return "unit";
}

const char* datum_name(datum_kind k) {
    switch (k) {
    case datum_kind::gaussian: return "gaussian";
    case datum_kind::modulated_gaussian: return "modulated-gaussian";
    case datum_kind::from_file: return "file";
    }
    return "gaussian";
}

std::string sanitize_component(std::string s) {
    for (char& c : s) {
        if (c == '/') c = '_';
        if (c == '-') c = 'm';
        if (c == '.') c = 'p';
    }
    return s;
}

} // namespace

const char* version_string() { return "0.1.0"; }

const std::vector<std::string>& known_diagnostics() {
    static const std::vector<std::string> names = {"stats",     "increments", "upsilon",
                                                   "potential", "virial",     "snapshots"};
    return names;
}

run_config parse_config(const std::string& text) {
    config_reader rd(tokenize_config(text));
    run_config cfg;

    const std::string model = rd.take_required("model");
    if (model == "inls")
        cfg.params.model = model_kind::inls;
    else if (model == "inlh")
        cfg.params.model = model_kind::inlh;
    else
        parse_fail(rd.line_of("model"), "model", "expected inls or inlh");

    const long dim = rd.take_required_integer("dim");
    if (dim < 1 || dim > 3) parse_fail(rd.line_of("dim"), "dim", "expected 1, 2 or 3");
    cfg.params.dim = static_cast<int>(dim);

    cfg.params.b = rd.take_required_rational("b");
    cfg.params.q = rd.take_required_rational("q");
    if (cfg.params.model == model_kind::inlh)
        cfg.params.alpha = rd.take_required_rational("alpha");
    else
        cfg.params.alpha = rd.take_rational("alpha", 0);
    cfg.b = rational_to_double(cfg.params.b);
    cfg.q = rational_to_double(cfg.params.q);
    cfg.alpha = rational_to_double(cfg.params.alpha);

    const rational extent = rd.take_required_rational("extent");
    if (extent <= 0) parse_fail(rd.line_of("extent"), "extent", "expected a positive box size");
    cfg.extent = rational_to_double(extent);

    const long n = rd.take_required_integer("n");
    if (n < 2) parse_fail(rd.line_of("n"), "n", "expected at least 2 points per axis");
    cfg.n = static_cast<int>(n);

    const rational t0 = rd.take_rational("t0", 0);
    const rational t1 = rd.take_required_rational("t1");
    const rational dt = rd.take_required_rational("dt");
    if (t0 < 0) parse_fail(rd.line_of("t0"), "t0", "expected a nonnegative start time");
    if (t1 <= t0) parse_fail(rd.line_of("t1"), "t1", "end time must exceed t0");
    if (dt <= 0) parse_fail(rd.line_of("dt"), "dt", "expected a positive step");
    cfg.t0 = rational_to_double(t0);
    cfg.t1 = rational_to_double(t1);
    cfg.dt = rational_to_double(dt);

    const std::string coeff = rd.take_string("coefficient", "unit");
    if (coeff == "unit")
        cfg.coeff = coefficient_kind::unit;
    else if (coeff == "power-law")
        cfg.coeff = coefficient_kind::power_law;
    else if (coeff == "zero")
        cfg.coeff = coefficient_kind::zero;
    else
        parse_fail(rd.line_of("coefficient"), "coefficient",
                   "expected unit, power-law or zero");
    cfg.coeff_exponent = rational_to_double(rd.take_rational("coefficient_exponent", 0));

    if (rd.has("snapshots")) {
        const int line = rd.line_of("snapshots");
        for (const std::string& item : split_list(rd.take_string("snapshots", ""))) {
            const auto r = parse_rational(item);
            if (!r) parse_fail(line, "snapshots", "'" + item + "' is not a decimal or fraction");
            cfg.snapshot_times.push_back(rational_to_double(*r));
        }
        for (size_t j = 1; j < cfg.snapshot_times.size(); ++j)
            if (cfg.snapshot_times[j] <= cfg.snapshot_times[j - 1])
                parse_fail(line, "snapshots", "times must increase strictly");
    }

    const std::string datum = rd.take_string("datum", "gaussian");
    if (datum == "gaussian")
        cfg.datum.kind = datum_kind::gaussian;
    else if (datum == "modulated-gaussian")
        cfg.datum.kind = datum_kind::modulated_gaussian;
    else if (datum == "file")
        cfg.datum.kind = datum_kind::from_file;
    else
        parse_fail(rd.line_of("datum"), "datum",
                   "expected gaussian, modulated-gaussian or file");

    const rational sigma = rd.take_rational("sigma", 1);
    if (sigma <= 0) parse_fail(rd.line_of("sigma"), "sigma", "expected a positive width");
    cfg.datum.sigma = rational_to_double(sigma);
    cfg.datum.amplitude = rational_to_double(rd.take_rational("amplitude", 1));
    cfg.datum.chirp = rational_to_double(rd.take_rational("chirp", 0));
    cfg.datum.k0 = rational_to_double(rd.take_rational("k0", 0));
    cfg.datum.path = rd.take_string("path", "");
    if (cfg.datum.kind == datum_kind::from_file && cfg.datum.path.empty())
        fail(errc::parse_error, "datum = file needs a path key");

    cfg.diagnostics = split_list(rd.take_string("diagnostics", "stats"));
    for (const std::string& d : cfg.diagnostics) {
        const auto& known = known_diagnostics();
        if (std::find(known.begin(), known.end(), d) == known.end())
            parse_fail(rd.line_of("diagnostics"), "diagnostics",
                       "unknown diagnostic '" + d + "'");
    }

    cfg.out_dir = rd.take_string("out", "");
    cfg.seed = static_cast<unsigned long>(rd.take_integer("seed", 0));
    cfg.force = rd.take_bool("force", false);
    rd.reject_unknown();

    std::vector<std::string> reasons;
    if (validate_constraints(cfg.params, reasons)) {
        cfg.regime = classify(cfg.params);
    } else {
        if (!cfg.force) fail(errc::regime_error, join(reasons, "; "));
        cfg.regime.valid = false;
        cfg.regime.note = join(reasons, "; ");
    }
    return cfg;
}

run_config load_config(const std::string& path) { return parse_config(read_file(path)); }

std::string canonical_config_text(const run_config& cfg) {
    std::ostringstream os;
    os << "schema run-1\n";
    os << "model " << (cfg.params.model == model_kind::inls ? "inls" : "inlh") << "\n";
    os << "dim " << cfg.params.dim << "\n";
    os << "b " << rational_string(cfg.params.b) << " " << fmt_double(cfg.b) << "\n";
    os << "q " << rational_string(cfg.params.q) << " " << fmt_double(cfg.q) << "\n";
    os << "alpha " << rational_string(cfg.params.alpha) << " " << fmt_double(cfg.alpha)
       << "\n";
    os << "extent " << fmt_double(cfg.extent) << "\n";
    os << "n " << cfg.n << "\n";
    os << "t0 " << fmt_double(cfg.t0) << "\n";
    os << "t1 " << fmt_double(cfg.t1) << "\n";
    os << "dt " << fmt_double(cfg.dt) << "\n";
    os << "coefficient " << coefficient_name(cfg.coeff) << " "
       << fmt_double(cfg.coeff_exponent) << "\n";
    os << "snapshots";
    for (double s : cfg.snapshot_times) os << " " << fmt_double(s);
    os << "\n";
    os << "datum " << datum_name(cfg.datum.kind) << " sigma " << fmt_double(cfg.datum.sigma)
       << " amplitude " << fmt_double(cfg.datum.amplitude) << " chirp "
       << fmt_double(cfg.datum.chirp) << " k0 " << fmt_double(cfg.datum.k0) << " path "
       << cfg.datum.path << "\n";
    os << "diagnostics " << join(cfg.diagnostics, ",") << "\n";
    os << "seed " << cfg.seed << "\n";
    return os.str();
}

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

field make_datum(const datum_spec& datum, const lattice& lat) {
    if (datum.kind == datum_kind::from_file) {
        field f = load_snapshot(datum.path);
        require(f.lat == lat, errc::lattice_mismatch,
                "datum file lattice differs from the configured lattice");
        return f;
    }
    field f = make_field(lat);
    const std::vector<double> r2 = radius_squared(lat);
    const double inv = 1.0 / (2.0 * datum.sigma * datum.sigma);
    int idx[3];
    for (size_t j = 0; j < f.a.size(); ++j) {
        double phase = datum.chirp * r2[j];
        if (datum.kind == datum_kind::modulated_gaussian) {
            unravel(lat, j, idx);
            phase += datum.k0 * axis_coordinate(lat, idx[0]);
        }
        f.a[j] = std::polar(datum.amplitude * std::exp(-r2[j] * inv), phase);
    }
    return f;
}

namespace {

struct emitted {
    std::vector<manifest_entry> files;
    std::string dir;

    void add(const std::string& name, const std::string& bytes) {
        write_file(dir + "/" + name, bytes);
        files.push_back({name, fnv1a_hex(bytes), bytes.size()});
    }
};

bool wants(const run_config& cfg, const std::string& name) {
    return std::find(cfg.diagnostics.begin(), cfg.diagnostics.end(), name) !=
           cfg.diagnostics.end();
}

void emit_outputs(const run_config& cfg, const trajectory& tr, emitted& out) {
    if (wants(cfg, "stats")) {
        std::string lines;
        for (const step_stat& s : tr.stats) {
            json row = {{"t", s.t},
                        {"dt", s.dt},
                        {"mass", s.mass},
                        {"energy", s.energy},
                        {"grad_norm", s.grad_norm}};
            lines += row.dump();
            lines += "\n";
        }
        out.add("stats.jsonl", lines);
    }
    if (wants(cfg, "increments")) {
        std::string csv = "t_from,t_to,increment\r\n";
        if (tr.snapshots.size() >= 2) {
            std::vector<double> times;
            for (const auto& s : tr.snapshots) times.push_back(s.first);
            const std::vector<double> inc = cauchy_increments(tr, times);
            for (size_t j = 0; j < inc.size(); ++j)
                csv += fmt_double(times[j]) + "," + fmt_double(times[j + 1]) + "," +
                       fmt_double(inc[j]) + "\r\n";
        }
        out.add("increments.csv", csv);
    }
    if (wants(cfg, "upsilon")) {
        const field& u0 = tr.snapshots.front().second;
        const double t0 = tr.snapshots.front().first;
        std::string csv = "t,upsilon,rate_main,rate_cross\r\n";
        for (const auto& [t, u] : tr.snapshots) {
            const field v = free_propagate(u0, t - t0);
            const rate_terms rt = upsilon_rate_terms(u, v, tr.spec.ctx);
            csv += fmt_double(t) + "," + fmt_double(upsilon(u, v)) + "," +
                   fmt_double(rt.main) + "," + fmt_double(rt.cross) + "\r\n";
        }
        out.add("upsilon.csv", csv);
    }
    if (wants(cfg, "potential")) {
        std::string csv = "t,weighted_potential\r\n";
        for (const auto& [t, u] : tr.snapshots)
            csv += fmt_double(t) + "," + fmt_double(weighted_potential(u, tr.spec.ctx)) +
                   "\r\n";
        out.add("potential.csv", csv);
    }
    if (wants(cfg, "virial")) {
        std::string csv = "t,variance,virial_rhs\r\n";
        for (const auto& [t, u] : tr.snapshots)
            csv += fmt_double(t) + "," + fmt_double(variance(u)) + "," +
                   fmt_double(virial_rhs(u, tr.spec.ctx)) + "\r\n";
        out.add("virial.csv", csv);
    }
    if (wants(cfg, "snapshots")) {
        std::string csv = "index,t,file\r\n";
        for (size_t j = 0; j < tr.snapshots.size(); ++j) {
            char name[32];
            std::snprintf(name, sizeof name, "state_%03zu.fld", j);
            save_snapshot(tr.snapshots[j].second, out.dir + "/" + name);
            const std::string bytes = read_file(out.dir + "/" + name);
            out.files.push_back({name, fnv1a_hex(bytes), bytes.size()});
            csv += std::to_string(j) + "," + fmt_double(tr.snapshots[j].first) + "," + name +
                   "\r\n";
        }
        out.add("snapshots.csv", csv);
    }
}

json config_to_json(const run_config& cfg) {
    return {{"model", cfg.params.model == model_kind::inls ? "inls" : "inlh"},
            {"dim", cfg.params.dim},
            {"b", {{"rational", rational_string(cfg.params.b)}, {"float", cfg.b}}},
            {"q", {{"rational", rational_string(cfg.params.q)}, {"float", cfg.q}}},
            {"alpha", {{"rational", rational_string(cfg.params.alpha)}, {"float", cfg.alpha}}},
            {"extent", cfg.extent},
            {"n", cfg.n},
            {"t0", cfg.t0},
            {"t1", cfg.t1},
            {"dt", cfg.dt},
            {"coefficient", coefficient_name(cfg.coeff)},
            {"coefficient_exponent", cfg.coeff_exponent},
            {"snapshots", cfg.snapshot_times},
            {"datum", datum_name(cfg.datum.kind)},
            {"diagnostics", cfg.diagnostics},
            {"seed", cfg.seed}};
}

void write_manifest(const run_config& cfg, const run_manifest& man) {
    json files = json::array();
    for (const auto& f : man.files)
        files.push_back({{"name", f.name}, {"hash", f.hash}, {"bytes", f.bytes}});
    const json doc = {{"schema", "manifest-1"},
                      {"config_digest", man.config_digest},
                      {"code_version", man.code_version},
                      {"started", man.started},
                      {"finished", man.finished},
                      {"complete", man.complete},
                      {"error", man.error},
                      {"config", config_to_json(cfg)},
                      {"regime", regime_to_json(man.regime)},
                      {"files", files}};
    write_file(cfg.out_dir + "/manifest.json", doc.dump(2) + "\n");
}

} // namespace

run_manifest run(const run_config& cfg) {
    require(!cfg.out_dir.empty(), errc::invalid_params, "config has no output directory");
    std::filesystem::create_directories(cfg.out_dir);

    run_manifest man;
    man.config_digest = fnv1a_hex(canonical_config_text(cfg));
    man.code_version = version_string();
    man.started = iso_now();
    man.regime = cfg.regime;

    emitted out;
    out.dir = cfg.out_dir;
    try {
        const lattice lat = make_lattice(cfg.params.dim, cfg.extent, cfg.n);
        const nonlinear_context ctx =
            make_context(lat, cfg.params.model, cfg.b, cfg.q, cfg.alpha);
        const field u0 = make_datum(cfg.datum, lat);

        evolution_spec spec;
        spec.ctx = ctx;
        spec.t0 = cfg.t0;
        spec.t1 = cfg.t1;
        spec.dt = cfg.dt;
        spec.coeff = cfg.coeff;
        spec.coeff_exponent = cfg.coeff_exponent;
        spec.snapshot_times = cfg.snapshot_times;

        const trajectory tr = evolve(spec, u0);
        emit_outputs(cfg, tr, out);
        man.files = out.files;
        man.complete = true;
    } catch (const std::exception& e) {
        man.files = out.files;
        man.complete = false;
        man.error = e.what();
        man.finished = iso_now();
        write_manifest(cfg, man);
        throw;
    }
    man.finished = iso_now();
    write_manifest(cfg, man);
    return man;
}

bool verify_manifest(const std::string& run_dir, std::string* why) {
    const auto complain = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    json doc;
    try {
        doc = json::parse(read_file(run_dir + "/manifest.json"));
    } catch (const std::exception& e) {
        return complain(e.what());
    }
    for (const auto& f : doc.at("files")) {
        const std::string name = f.at("name");
        std::string bytes;
        try {
            bytes = read_file(run_dir + "/" + name);
        } catch (const std::exception&) {
            return complain("missing file " + name);
        }
        if (fnv1a_hex(bytes) != f.at("hash").get<std::string>())
            return complain("hash mismatch for " + name);
        if (bytes.size() != f.at("bytes").get<unsigned long long>())
            return complain("size mismatch for " + name);
    }
    if (why) why->clear();
    return true;
}

namespace {

double rel_gap(const field& got, const field& want) {
    require(got.lat == want.lat, errc::lattice_mismatch,
            "cannot compare states on different lattices");
    double num = 0, den = 0;
    for (size_t j = 0; j < got.a.size(); ++j) {
        num += std::norm(got.a[j] - want.a[j]);
        den += std::norm(want.a[j]);
    }
    return std::sqrt(num / den);
}

const field& snapshot_near(const trajectory& tr, double t) {
    for (const auto& [s, f] : tr.snapshots)
        if (std::abs(s - t) <= 1e-9 * std::max(1.0, std::abs(t))) return f;
    fail(errc::insufficient_snapshots,
         "no snapshot near t = " + fmt_double(t));
}

} // namespace

pair_report pair_check(const run_config& forward, const run_config& contracted) {
    const auto match = [](double a, double b) {
        return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    require(forward.params.model == contracted.params.model &&
                forward.params.dim == contracted.params.dim && match(forward.b, contracted.b) &&
                match(forward.q, contracted.q) && match(forward.alpha, contracted.alpha),
            errc::invalid_params, "the pair must share one model and one parameter point");
    require(forward.n == contracted.n, errc::invalid_params,
            "the pair must share one point count per axis");
    require(match(forward.t0, 1.0) && match(contracted.t1, 1.0), errc::invalid_params,
            "the pair is normalized to a forward start and a contracted end at t = 1");
    const double tau0 = contracted.t0;
    require(tau0 > 0 && tau0 < 1 && match(tau0 * forward.t1, 1.0), errc::invalid_params,
            "the contracted start time must be the reciprocal of the forward end time");
    require(match(contracted.extent, tau0 * forward.extent), errc::invalid_params,
            "the contracted box must be the forward box scaled by the start time");
    require(contracted.coeff == coefficient_kind::power_law, errc::invalid_params,
            "the contracted leg needs the power-law time coefficient");
    require(forward.datum.kind != datum_kind::from_file, errc::invalid_params,
            "the pair check needs an analytic forward datum");
    require(!contracted.snapshot_times.empty(), errc::invalid_params,
            "the contracted leg needs at least one interior snapshot time");

    const lattice lat_u = make_lattice(forward.params.dim, forward.extent, forward.n);
    const nonlinear_context ctx_u =
        make_context(lat_u, forward.params.model, forward.b, forward.q, forward.alpha);
    require(match(contracted.coeff_exponent, pc_coefficient_exponent(ctx_u)),
            errc::invalid_params,
            "the contracted coefficient exponent must match the change of frame");

    std::vector<double> taus;
    taus.push_back(tau0);
    taus.insert(taus.end(), contracted.snapshot_times.begin(),
                contracted.snapshot_times.end());
    taus.push_back(contracted.t1);

    evolution_spec uspec;
    uspec.ctx = ctx_u;
    uspec.t0 = forward.t0;
    uspec.t1 = forward.t1;
    uspec.dt = forward.dt;
    uspec.coeff = forward.coeff;
    uspec.coeff_exponent = forward.coeff_exponent;
    for (auto it = taus.rbegin(); it != taus.rend(); ++it) {
        double t = 1.0 / *it;
        if (std::abs(t - forward.t1) <= 1e-12 * forward.t1) t = forward.t1;
        if (t > forward.t0 * (1 + 1e-12) && t <= forward.t1)
            uspec.snapshot_times.push_back(t);
    }
    const trajectory utr = evolve(uspec, make_datum(forward.datum, lat_u));

    pair_report rep;
    const field& u_final = snapshot_near(utr, forward.t1);
    const field v0 = pc_transform(u_final, make_frame(lat_u, tau0));
    rep.mass_isometry_error = std::abs(mass(v0) - mass(u_final)) / mass(u_final);

    const lattice lat_v = v0.lat;
    const nonlinear_context ctx_v =
        make_context(lat_v, forward.params.model, forward.b, forward.q, forward.alpha);

    evolution_spec vspec;
    vspec.ctx = ctx_v;
    vspec.t0 = tau0;
    vspec.t1 = contracted.t1;
    vspec.dt = contracted.dt;
    vspec.coeff = coefficient_kind::power_law;
    vspec.coeff_exponent = contracted.coeff_exponent;
    vspec.snapshot_times = contracted.snapshot_times;
    const trajectory vtr = evolve(vspec, v0);

    const field want =
        pc_transform(make_datum(forward.datum, lat_v), make_frame(lat_v, contracted.t1));
    rep.meet_error = rel_gap(snapshot_near(vtr, contracted.t1), want);

    trajectory linked;
    linked.spec = vspec;
    for (double tau : taus) {
        const double t = tau == tau0 ? forward.t1 : 1.0 / tau;
        linked.snapshots.emplace_back(tau,
                                      pc_transform(snapshot_near(utr, t),
                                                   make_frame(lat_u, tau)));
    }
    rep.residual_linked = pc_equation_residual(linked, ctx_u);
    rep.residual_native = pc_equation_residual(vtr, ctx_v);

    for (const auto& [t, v] : vtr.snapshots)
        rep.monotone.emplace_back(t, monotone_quantity(v, t, ctx_v));
    for (size_t j = 0; j + 1 < rep.monotone.size(); ++j) {
        const double step = rep.monotone[j + 1].second - rep.monotone[j].second;
        rep.monotone_dip = std::min(
            rep.monotone_dip, step / std::max(1.0, std::abs(rep.monotone[j].second)));
    }

    const bool residuals_agree = rep.residual_linked <= 10.0 * rep.residual_native &&
                                 rep.residual_native <= 10.0 * rep.residual_linked;
    rep.passed = rep.mass_isometry_error <= 1e-12 && rep.meet_error <= 1e-3 &&
                 rep.monotone_dip >= -1e-4 && residuals_agree;
    return rep;
}

const char* const sweep_schema = "sweep-1";

namespace {

std::optional<double> table_slope(const std::string& path, const std::string& value_column,
                                  double t0) {
    std::vector<std::pair<double, double>> series;
    try {
        for (const auto& row : read_table(path)) {
            const double t = std::stod(row.at("t"));
            const double v = std::stod(row.at(value_column));
            if (t > t0 && v > 0) series.emplace_back(t, v);
        }
        if (series.size() < 4) return std::nullopt;
        return decay_fit(series).slope;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::optional<double> table_final_increment(const std::string& path) {
    try {
        const auto rows = read_table(path);
        if (rows.empty()) return std::nullopt;
        return std::stod(rows.back().at("increment"));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace

sweep_report sweep(const run_config& base, const std::vector<rational>& q_values,
                   int workers) {
    require(workers >= 1, errc::invalid_params, "worker count must be positive");
    sweep_report rep;

    std::vector<rational> qs;
    for (const rational& q : q_values) {
        if (std::find(qs.begin(), qs.end(), q) != qs.end()) {
            rep.warnings.push_back("duplicate q = " + rational_string(q) + " dropped");
            continue;
        }
        qs.push_back(q);
    }
    if (qs.empty()) return rep;

    struct job {
        run_config cfg;
        bool runnable = false;
    };
    std::vector<job> jobs(qs.size());
    rep.rows.resize(qs.size());

    // Classify everything up front; invalid parameter points never run.
    for (size_t j = 0; j < qs.size(); ++j) {
        sweep_row& row = rep.rows[j];
        job& jb = jobs[j];
        row.q = qs[j];
        jb.cfg = base;
        jb.cfg.params.q = qs[j];
        jb.cfg.q = rational_to_double(qs[j]);
        jb.cfg.out_dir =
            base.out_dir + "/q_" + sanitize_component(rational_string(qs[j]));
        row.run_dir = jb.cfg.out_dir;
        std::vector<std::string> reasons;
        if (!validate_constraints(jb.cfg.params, reasons)) {
            row.label = "invalid";
            row.error = join(reasons, "; ");
            continue;
        }
        jb.cfg.regime = classify(jb.cfg.params);
        row.label = label_name(jb.cfg.regime.label);
        jb.runnable = true;
    }

    std::atomic<size_t> cursor{0};
    const auto worker = [&] {
        for (;;) {
            const size_t j = cursor.fetch_add(1);
            if (j >= jobs.size()) return;
            if (!jobs[j].runnable) continue;
            sweep_row& row = rep.rows[j];
            const run_config& cfg = jobs[j].cfg;
            try {
                run(cfg);
                if (wants(cfg, "increments"))
                    row.final_increment =
                        table_final_increment(cfg.out_dir + "/increments.csv");
                if (wants(cfg, "upsilon"))
                    row.upsilon_slope =
                        table_slope(cfg.out_dir + "/upsilon.csv", "rate_main", cfg.t0);
                if (wants(cfg, "potential"))
                    row.potential_slope = table_slope(cfg.out_dir + "/potential.csv",
                                                      "weighted_potential", cfg.t0);
                row.ok = true;
            } catch (const std::exception& e) {
                row.ok = false;
                row.error = e.what();
            }
        }
    };

    const size_t pool = std::min<size_t>(static_cast<size_t>(workers), jobs.size());
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (size_t j = 0; j < pool; ++j) threads.emplace_back(worker);
        for (std::thread& th : threads) th.join();
    }
    return rep;
}

void export_table(const sweep_report& report, const std::string& format,
                  const std::string& path) {
    const auto opt_str = [](const std::optional<double>& v) {
        return v ? fmt_double(*v) : std::string();
    };
    if (format == "csv") {
        std::string text = "q,q_float,label,ok,error,final_increment,upsilon_slope,"
                           "potential_slope\r\n";
        for (const sweep_row& r : report.rows) {
            text += csv_quote(rational_string(r.q)) + ",";
            text += fmt_double(rational_to_double(r.q)) + ",";
            text += csv_quote(r.label) + ",";
            text += (r.ok ? "true" : "false");
            text += ",";
            text += csv_quote(r.error) + ",";
            text += opt_str(r.final_increment) + ",";
            text += opt_str(r.upsilon_slope) + ",";
            text += opt_str(r.potential_slope) + "\r\n";
        }
        write_file(path, text);
        return;
    }
    if (format == "jsonl") {
        std::string text;
        for (const sweep_row& r : report.rows) {
            json row = {{"schema", sweep_schema},
                        {"q", rational_string(r.q)},
                        {"q_float", rational_to_double(r.q)},
                        {"label", r.label},
                        {"ok", r.ok},
                        {"error", r.error}};
            if (r.final_increment) row["final_increment"] = *r.final_increment;
            if (r.upsilon_slope) row["upsilon_slope"] = *r.upsilon_slope;
            if (r.potential_slope) row["potential_slope"] = *r.potential_slope;
            text += row.dump();
            text += "\n";
        }
        write_file(path, text);
        return;
    }
    fail(errc::invalid_params, "unknown table format '" + format + "'");
}

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool any = false;
    for (size_t j = 0; j < text.size(); ++j) {
        const char c = text[j];
        if (quoted) {
            if (c == '"') {
                if (j + 1 < text.size() && text[j + 1] == '"') {
                    cell += '"';
                    ++j;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(cell);
            cell.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && j + 1 < text.size() && text[j + 1] == '\n') ++j;
            if (any || !cell.empty()) {
                row.push_back(cell);
                rows.push_back(row);
            }
            row.clear();
            cell.clear();
            any = false;
        } else {
            cell += c;
            any = true;
        }
    }
    require(!quoted, errc::parse_error, "unterminated quoted field");
    if (any || !cell.empty()) {
        row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

std::string json_scalar_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

} // namespace

std::vector<std::map<std::string, std::string>> read_table(const std::string& path) {
    std::vector<std::map<std::string, std::string>> out;
    const std::string text = read_file(path);
    if (path.size() >= 6 && path.substr(path.size() - 6) == ".jsonl") {
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line)) {
            if (trim(line).empty()) continue;
            json row;
            try {
                row = json::parse(line);
            } catch (const std::exception& e) {
                fail(errc::parse_error, e.what());
            }
            std::map<std::string, std::string> m;
            for (const auto& [key, value] : row.items()) m[key] = json_scalar_to_string(value);
            out.push_back(std::move(m));
        }
        return out;
    }
    const auto rows = parse_csv(text);
    require(!rows.empty(), errc::parse_error, "table has no header row");
    const auto& header = rows.front();
    for (size_t r = 1; r < rows.size(); ++r) {
        require(rows[r].size() == header.size(), errc::parse_error,
                "row " + std::to_string(r) + " has the wrong field count");
        std::map<std::string, std::string> m;
        for (size_t c = 0; c < header.size(); ++c) m[header[c]] = rows[r][c];
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace dlab

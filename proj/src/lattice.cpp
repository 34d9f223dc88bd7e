#include "lattice.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "errors.hpp"
#include "fft.hpp"

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes little-endian");

namespace dlab {

namespace {

constexpr size_t max_points = size_t(1) << 27;

std::vector<int> dims_of(const lattice& lat) {
    return std::vector<int>(static_cast<size_t>(lat.dim), lat.n);
}

// Per-axis forward twiddles exp(-i k(m) x0) aligning the raw DFT with the
// cell-center (or cell-corner) sample positions.
cvec axis_twiddles(const lattice& lat) {
    cvec t(static_cast<size_t>(lat.n));
    const double x0 = -lat.extent / 2 + (lat.offset ? lat.step() / 2 : 0.0);
    for (int m = 0; m < lat.n; ++m) {
        const double k = axis_frequency(lat, m);
        t[static_cast<size_t>(m)] = std::polar(1.0, -k * x0);
    }
    return t;
}

void apply_twiddles(field& f, bool conjugate) {
    const cvec t = axis_twiddles(f.lat);
    const size_t n = static_cast<size_t>(f.lat.n);
    int idx[3] = {0, 0, 0};
    const size_t total = f.lat.size();
    for (size_t flat = 0; flat < total; ++flat) {
        std::complex<double> w = 1.0;
        for (int d = 0; d < f.lat.dim; ++d) w *= t[static_cast<size_t>(idx[d])];
        if (conjugate) w = std::conj(w);
        f.a[flat] *= w;
        for (int d = f.lat.dim - 1; d >= 0; --d) {
            if (static_cast<size_t>(++idx[d]) < n) break;
            idx[d] = 0;
        }
    }
}

template <typename T>
void write_raw(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

constexpr char snapshot_magic[4] = {'D', 'L', 'A', 'B'};
constexpr uint16_t snapshot_version = 1;

} // namespace

lattice make_lattice(int dim, double extent, int n, bool offset) {
    require(dim >= 1 && dim <= 3, errc::bad_geometry, "dimension must be 1, 2 or 3");
    require(std::isfinite(extent) && extent > 0, errc::bad_geometry, "extent must be positive");
    require(n >= 2 && n % 2 == 0, errc::bad_geometry, "points per axis must be even and >= 2");
    lattice lat{dim, extent, n, offset};
    require(lat.size() <= max_points, errc::too_large, "lattice exceeds the supported size");
    return lat;
}

field make_field(const lattice& lat) { return field{lat, cvec(lat.size())}; }

double axis_coordinate(const lattice& lat, int j) {
    return -lat.extent / 2 + (j + (lat.offset ? 0.5 : 0.0)) * lat.step();
}

double axis_frequency(const lattice& lat, int m) {
    const int folded = m < lat.n / 2 ? m : m - lat.n;
    return 2.0 * std::numbers::pi / lat.extent * folded;
}

void unravel(const lattice& lat, size_t flat, int idx[3]) {
    for (int d = lat.dim - 1; d >= 0; --d) {
        idx[d] = static_cast<int>(flat % static_cast<size_t>(lat.n));
        flat /= static_cast<size_t>(lat.n);
    }
    for (int d = lat.dim; d < 3; ++d) idx[d] = 0;
}

namespace {

// Shared radial table builder over per-axis samples.
std::vector<double> radial_table(const lattice& lat, const std::vector<double>& axis) {
    std::vector<double> out(lat.size());
    const size_t n = static_cast<size_t>(lat.n);
    int idx[3] = {0, 0, 0};
    for (size_t flat = 0; flat < out.size(); ++flat) {
        double s = 0;
        for (int d = 0; d < lat.dim; ++d) {
            const double v = axis[static_cast<size_t>(idx[d])];
            s += v * v;
        }
        out[flat] = s;
        for (int d = lat.dim - 1; d >= 0; --d) {
            if (static_cast<size_t>(++idx[d]) < n) break;
            idx[d] = 0;
        }
    }
    return out;
}

} // namespace

std::vector<double> radius_squared(const lattice& lat) {
    std::vector<double> axis(static_cast<size_t>(lat.n));
    for (int j = 0; j < lat.n; ++j) axis[static_cast<size_t>(j)] = axis_coordinate(lat, j);
    return radial_table(lat, axis);
}

std::vector<double> frequency_squared(const lattice& lat) {
    std::vector<double> axis(static_cast<size_t>(lat.n));
    for (int m = 0; m < lat.n; ++m) axis[static_cast<size_t>(m)] = axis_frequency(lat, m);
    return radial_table(lat, axis);
}

field forward_transform(const field& f) {
    require(f.a.size() == f.lat.size(), errc::lattice_mismatch, "field size mismatch");
    field F = f;
    fft::dft(F.a, dims_of(F.lat), -1);
    const double scale = std::pow(F.lat.step(), F.lat.dim);
    for (auto& z : F.a) z *= scale;
    apply_twiddles(F, false);
    return F;
}

field inverse_transform(const field& F) {
    require(F.a.size() == F.lat.size(), errc::lattice_mismatch, "field size mismatch");
    field f = F;
    apply_twiddles(f, true);
    fft::dft(f.a, dims_of(f.lat), +1);
    const double scale = 1.0 / std::pow(f.lat.extent, f.lat.dim);
    for (auto& z : f.a) z *= scale;
    return f;
}

std::vector<double> weight_field(const lattice& lat, double p) {
    require(std::isfinite(p) && p >= 0, errc::invalid_params, "weight exponent must be >= 0");
    if (p == 0.0) return std::vector<double>(lat.size(), 1.0);
    require(lat.offset, errc::origin_on_grid,
            "singular radial weight needs a cell-centered lattice");
    std::vector<double> w = radius_squared(lat);
    for (auto& v : w) v = std::pow(v, -p / 2);
    return w;
}

spectral_multiplier riesz_multiplier(const lattice& lat, double alpha) {
    require(std::isfinite(alpha) && alpha > 0 && alpha < lat.dim, errc::bad_order,
            "convolution order must satisfy 0 < alpha < dim");
    spectral_multiplier mult{lat, frequency_squared(lat)};
    for (auto& v : mult.v) v = v == 0.0 ? 0.0 : std::pow(v, -alpha / 2);
    return mult;
}

std::vector<double> ball_mask(const lattice& lat, double radius) {
    require(std::isfinite(radius) && radius >= 0, errc::invalid_params,
            "ball radius must be >= 0");
    std::vector<double> m = radius_squared(lat);
    const double r2 = radius * radius;
    for (auto& v : m) v = v <= r2 ? 1.0 : 0.0;
    return m;
}

void save_snapshot(const field& f, const std::string& path) {
    require(f.a.size() == f.lat.size(), errc::lattice_mismatch, "field size mismatch");
    std::ofstream os(path, std::ios::binary);
    require(os.good(), errc::io_error, "cannot open " + path + " for writing");
    os.write(snapshot_magic, 4);
    write_raw(os, snapshot_version);
    write_raw(os, static_cast<uint8_t>(f.lat.dim));
    for (int d = 0; d < f.lat.dim; ++d) write_raw(os, static_cast<uint32_t>(f.lat.n));
    for (int d = 0; d < f.lat.dim; ++d) write_raw(os, f.lat.extent);
    write_raw(os, static_cast<uint8_t>(f.lat.offset ? 1 : 0));
    os.write(reinterpret_cast<const char*>(f.a.data()),
             static_cast<std::streamsize>(f.a.size() * sizeof(std::complex<double>)));
    require(os.good(), errc::io_error, "short write to " + path);
}

field load_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), errc::io_error, "cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    require(is.good() && std::memcmp(magic, snapshot_magic, 4) == 0, errc::io_error,
            path + " is not a field snapshot");
    require(read_raw<uint16_t>(is) == snapshot_version, errc::io_error,
            "unsupported snapshot version in " + path);
    const int dim = read_raw<uint8_t>(is);
    require(dim >= 1 && dim <= 3, errc::io_error, "corrupt snapshot dimension");
    uint32_t n[3] = {0, 0, 0};
    for (int d = 0; d < dim; ++d) n[d] = read_raw<uint32_t>(is);
    double L[3] = {0, 0, 0};
    for (int d = 0; d < dim; ++d) L[d] = read_raw<double>(is);
    const bool offset = read_raw<uint8_t>(is) != 0;
    for (int d = 1; d < dim; ++d)
        require(n[d] == n[0] && L[d] == L[0], errc::io_error,
                "anisotropic snapshots are not supported");
    require(is.good(), errc::io_error, "truncated snapshot header in " + path);

    field f = make_field(make_lattice(dim, L[0], static_cast<int>(n[0]), offset));
    is.read(reinterpret_cast<char*>(f.a.data()),
            static_cast<std::streamsize>(f.a.size() * sizeof(std::complex<double>)));
    require(is.gcount() == static_cast<std::streamsize>(f.a.size() * sizeof(std::complex<double>)),
            errc::io_error, "truncated snapshot payload in " + path);
    return f;
}

double safe_horizon(const lattice& lat, double initial_radius) {
    require(initial_radius >= 0 && initial_radius < lat.extent / 2, errc::invalid_params,
            "initial radius must sit inside the box");
    const double k_max = std::numbers::pi / lat.step();
    return (lat.extent / 2 - initial_radius) / (2 * k_max);
}

} // namespace dlab

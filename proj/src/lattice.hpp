#pragma once

#include <complex>
#include <string>
#include <vector>

namespace dlab {

// Periodic box [-L/2, L/2)^dim sampled with n points per axis. With the
// offset flag the samples sit at cell centers -L/2 + (j+1/2)h, so no sample
// lands on the origin and singular radial weights stay finite.
struct lattice {
    int dim = 1;
    double extent = 1.0;
    int n = 2;
    bool offset = true;

    double step() const { return extent / n; }
    size_t size() const {
        size_t s = 1;
        for (int d = 0; d < dim; ++d) s *= static_cast<size_t>(n);
        return s;
    }
    bool operator==(const lattice&) const = default;
};

using cvec = std::vector<std::complex<double>>;

struct field {
    lattice lat;
    cvec a;
};

struct spectral_multiplier {
    lattice lat;
    std::vector<double> v;
};

lattice make_lattice(int dim, double extent, int n, bool offset = true);
field make_field(const lattice& lat);

double axis_coordinate(const lattice& lat, int j);
// Frequency of storage index m in FFT order: 2*pi/L * m for m < n/2,
// negative branch above.
double axis_frequency(const lattice& lat, int m);

void unravel(const lattice& lat, size_t flat, int idx[3]);

std::vector<double> radius_squared(const lattice& lat);
std::vector<double> frequency_squared(const lattice& lat);

// Quadrature-consistent discrete Fourier pair: forward approximates the
// continuum integral transform (factor h^dim and cell-center phases), the
// inverse carries 1/L^dim, so continuum multiplier symbols apply verbatim
// and h^dim*sum|f|^2 == L^-dim*sum|F|^2 exactly.
field forward_transform(const field& f);
field inverse_transform(const field& F);

// Samples of |x|^-p at cell centers; p = 0 gives ones. Positive p requires
// an offset lattice (OriginOnGrid otherwise).
std::vector<double> weight_field(const lattice& lat, double p);

// |k|^-alpha in FFT storage order with the k = 0 entry set to zero; valid
// for 0 < alpha < dim.
spectral_multiplier riesz_multiplier(const lattice& lat, double alpha);

// Indicator of the closed ball |x| <= radius.
std::vector<double> ball_mask(const lattice& lat, double radius);

void save_snapshot(const field& f, const std::string& path);
field load_snapshot(const std::string& path);

// Conservative wrap-around horizon: time for the fastest resolved mode
// (group speed 2*k_max) to travel from initial_radius to the boundary.
double safe_horizon(const lattice& lat, double initial_radius);

} // namespace dlab

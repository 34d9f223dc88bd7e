#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

#include "errors.hpp"

namespace dlab::fft {

namespace {

struct plan_key {
    std::vector<int> dims;
    int sign;
    bool operator<(const plan_key& o) const {
        if (dims != o.dims) return dims < o.dims;
        return sign < o.sign;
    }
};

std::mutex plan_mutex;
std::map<plan_key, fftw_plan> plan_cache;

size_t total_size(const std::vector<int>& dims) {
    size_t n = 1;
    for (int d : dims) n *= static_cast<size_t>(d);
    return n;
}

// Planning is not thread-safe in FFTW; executing a plan on fresh arrays is.
fftw_plan plan_for(const std::vector<int>& dims, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan_key key{dims, sign};
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;

    fftw_complex* buf = fftw_alloc_complex(total_size(dims));
    require(buf != nullptr, errc::too_large, "transform scratch allocation failed");
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, sign,
                                FFTW_ESTIMATE);
    fftw_free(buf);
    require(p != nullptr, errc::bad_geometry, "transform planning failed");
    plan_cache.emplace(key, p);
    return p;
}

struct scratch_buffer {
    fftw_complex* p = nullptr;
    size_t n = 0;
    ~scratch_buffer() { fftw_free(p); }
    fftw_complex* get(size_t want) {
        if (n < want) {
            fftw_free(p);
            p = fftw_alloc_complex(want);
            n = p ? want : 0;
            require(p != nullptr, errc::too_large, "transform scratch allocation failed");
        }
        return p;
    }
};

} // namespace

void dft(std::vector<std::complex<double>>& data, const std::vector<int>& dims, int sign) {
    const size_t n = total_size(dims);
    require(data.size() == n, errc::lattice_mismatch, "array shape does not match lattice");
    fftw_plan plan = plan_for(dims, sign);

    thread_local scratch_buffer scratch;
    fftw_complex* buf = scratch.get(n);
    std::memcpy(buf, data.data(), n * sizeof(fftw_complex));
    fftw_execute_dft(plan, buf, buf);
    std::memcpy(data.data(), buf, n * sizeof(fftw_complex));
}

} // namespace dlab::fft

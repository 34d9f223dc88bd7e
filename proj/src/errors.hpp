#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

enum class errc {
    ok = 0,
    invalid_params,
    bad_geometry,
    model_mismatch,
    lattice_mismatch,
    frame_mismatch,
    insufficient_snapshots,
    missing_snapshot,
    coefficient_singularity,
    non_finite,
    too_large,
    exponent_mismatch,
    unknown_system,
    parse_error,
    regime_error,
    io_error,
    origin_on_grid,
    bad_order,
    nonpositive_sample,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) fail(code, what);
}

} // namespace dlab

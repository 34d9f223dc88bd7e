#include "errors.hpp"

namespace dlab {

const char* errc_name(errc c) {
    switch (c) {
        case errc::ok: return "Ok";
        case errc::invalid_params: return "InvalidParams";
        case errc::bad_geometry: return "BadGeometry";
        case errc::model_mismatch: return "ModelMismatch";
        case errc::lattice_mismatch: return "LatticeMismatch";
        case errc::frame_mismatch: return "FrameMismatch";
        case errc::insufficient_snapshots: return "InsufficientSnapshots";
        case errc::missing_snapshot: return "MissingSnapshot";
        case errc::coefficient_singularity: return "CoefficientSingularity";
        case errc::non_finite: return "NonFinite";
        case errc::too_large: return "TooLarge";
        case errc::exponent_mismatch: return "ExponentMismatch";
        case errc::unknown_system: return "UnknownSystem";
        case errc::parse_error: return "ParseError";
        case errc::regime_error: return "RegimeError";
        case errc::io_error: return "IOError";
        case errc::origin_on_grid: return "OriginOnGrid";
        case errc::bad_order: return "BadOrder";
        case errc::nonpositive_sample: return "NonPositiveSample";
    }
    return "Unknown";
}

} // namespace dlab

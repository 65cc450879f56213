#include "periscope/errors.hpp"

namespace periscope {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::degenerate_normal: return "degenerate_normal";
        case ErrorCode::non_unique_geodesic: return "non_unique_geodesic";
        case ErrorCode::zero_distance: return "zero_distance";
        case ErrorCode::no_intersection: return "no_intersection";
        case ErrorCode::no_convergence: return "no_convergence";
        case ErrorCode::outside_patch: return "outside_patch";
        case ErrorCode::outside_domain: return "outside_domain";
        case ErrorCode::infeasible_configuration: return "infeasible_configuration";
        case ErrorCode::degenerate_geometry: return "degenerate_geometry";
        case ErrorCode::antipodal: return "antipodal";
        case ErrorCode::vertical_degenerate: return "vertical_degenerate";
        case ErrorCode::slope_bound: return "slope_bound";
        case ErrorCode::path_budget: return "path_budget";
        case ErrorCode::inverse_map: return "inverse_map";
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

} // namespace periscope

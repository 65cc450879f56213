#pragma once

#include <stdexcept>
#include <string>

namespace periscope {

/// Machine-readable failure reasons. The CSV "flag" column and the CLI exit
/// messages use the snake_case name of the code.
enum class ErrorCode {
    degenerate_normal,
    non_unique_geodesic,
    zero_distance,
    no_intersection,
    no_convergence,
    outside_patch,
    outside_domain,
    infeasible_configuration,
    degenerate_geometry,
    antipodal,
    vertical_degenerate,
    slope_bound,
    path_budget,
    inverse_map,
    dimension_mismatch,
    invalid_argument,
};

const char* to_string(ErrorCode code);

/// Exception carrying an ErrorCode plus a human-readable message.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

} // namespace periscope

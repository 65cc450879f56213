#pragma once

#include "periscope/vec.hpp"

namespace periscope {

/// Oriented line: origin plus unit direction. The direction is normalized
/// once on construction; operations downstream assume it stays unit.
struct Ray {
    Vec origin;
    Vec direction;

    Ray(Vec origin_, const Vec& direction_)
        : origin(std::move(origin_)), direction(direction_.normalized()) {
        if (origin.dim() != direction.dim())
            throw Error(ErrorCode::dimension_mismatch, "ray origin/direction dimensions differ");
    }

    Vec at(double t) const { return origin + t * direction; }
};

} // namespace periscope

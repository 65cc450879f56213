#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "periscope/grid.hpp"
#include "periscope/ray.hpp"
#include "periscope/reversed.hpp"
#include "periscope/spherical.hpp"

namespace periscope {

/// Names of the four closure residuals, in report order.
inline const std::vector<std::string>& residual_names() {
    static const std::vector<std::string> names = {"colinearity", "return_to_source",
                                                   "direction_match", "path_defect"};
    return names;
}

/// One physically traced ray against the closed-form prediction. Residuals
/// are nonnegative distances (input length units) or angles (radians):
///   colinearity      distance of the predicted Q from the first reflected ray
///   return_to_source distance of the outgoing line from the source (spherical)
///                    or of the traced landing point from the predicted Q (reversed)
///   direction_match  angle between the second reflection and the theoretical
///                    outgoing direction (-y, resp. vertical-down)
///   path_defect      |f-leg + |PQ| + g-leg - 2C|
struct TraceResult {
    Vec P;
    Vec Q;
    Ray out_ray;
    double path_length = 0.0;
    std::map<std::string, double> residuals;
};

/// Trace the ray O->x through both mirrors of a spherical periscope.
TraceResult trace_spherical(const spherical::Spec& spec, const Vec& x);

/// Residuals for an explicitly supplied synthesis; lets tests feed doctored
/// values (flipped signs, perturbed C) through the same measurement path.
TraceResult trace_spherical_at(const spherical::Spec& spec, const spherical::Synthesis& syn);

struct ReversedTraceOptions {
    /// Also intersect the first reflected ray with the interpolated second
    /// mirror (height via the inverse front map) instead of trusting the
    /// predicted landing point; reported in return_to_source.
    bool intersect_second_mirror = false;
};

/// Trace the vertical ray through x through both mirrors of a reversed
/// periscope.
TraceResult trace_reversed(const reversed::Spec& spec, const Vec& x,
                           const ReversedTraceOptions& options = {});

TraceResult trace_reversed_at(const reversed::Spec& spec, const reversed::Synthesis& syn,
                              const ReversedTraceOptions& options = {});

/// Per-point record of a grid sweep. `flag` is empty on success, "antipodal"
/// for the retroreflection limit, or the error code name when the point
/// failed; failures carry no residuals.
struct SweepRow {
    std::vector<std::size_t> indices;
    Vec chart_point; // chart / domain coordinates
    Vec point;       // sphere direction (spherical) or chart point again (reversed)
    double value_a = 0.0; // e^g (spherical) or g (reversed)
    double value_b = 0.0; // |grad g|
    double value_c = 0.0; // d (spherical) or |U| (reversed)
    std::map<std::string, double> residuals;
    std::string flag;
    bool traced = false;
};

struct ResidualStats {
    double max = 0.0;
    double mean = 0.0;
    std::size_t worst_index = 0; // flat grid index of the max
    Vec worst_point;
};

/// Aggregate view of a sweep: per-residual max/mean and worst point,
/// evaluated rows only.
struct VerifyReport {
    std::map<std::string, ResidualStats> residuals;
    std::size_t points = 0;
    std::size_t traced = 0;
    std::size_t failed = 0;
    std::vector<std::pair<std::size_t, std::string>> failures; // flat index -> code
};

/// Grid over the spec's patch: exponential-chart coordinates on the
/// axis-aligned box inscribed in the cap, mapped by sphere_exp. Counts are
/// per chart axis (n-1 of them).
std::vector<SweepRow> sweep_spherical(const spherical::Spec& spec,
                                      const std::vector<std::size_t>& counts,
                                      std::size_t jobs = 1);

/// Grid over the spec's domain box.
std::vector<SweepRow> sweep_reversed(const reversed::Spec& spec,
                                     const std::vector<std::size_t>& counts, std::size_t jobs = 1,
                                     const ReversedTraceOptions& options = {});

VerifyReport summarize(const std::vector<SweepRow>& rows);

/// Sweep + aggregate: per-point errors are recorded, never fatal.
VerifyReport grid_verify(const spherical::Spec& spec, const std::vector<std::size_t>& counts,
                         std::size_t jobs = 1);
VerifyReport grid_verify(const reversed::Spec& spec, const std::vector<std::size_t>& counts,
                         std::size_t jobs = 1);

} // namespace periscope

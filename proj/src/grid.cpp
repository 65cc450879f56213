#include "periscope/grid.hpp"

namespace periscope {

BoxGrid centered_grid(double half_width, const std::vector<std::size_t>& counts) {
    BoxGrid g;
    g.lo = Vec(counts.size());
    g.hi = Vec(counts.size());
    for (std::size_t a = 0; a < counts.size(); ++a) {
        g.lo[a] = -half_width;
        g.hi[a] = half_width;
    }
    g.counts = counts;
    return g;
}

} // namespace periscope

#pragma once

#include <cstddef>
#include <vector>

#include "periscope/vec.hpp"

namespace periscope {

/// Regular grid over an axis-aligned box, iterated in lexicographic index
/// order (last axis fastest). An axis with count 1 contributes the box
/// midpoint; counts >= 2 include both endpoints.
struct BoxGrid {
    Vec lo;
    Vec hi;
    std::vector<std::size_t> counts;

    std::size_t axes() const { return counts.size(); }

    std::size_t size() const {
        if (counts.empty()) return 0;
        std::size_t n = 1;
        for (std::size_t c : counts) n *= c;
        return n;
    }

    /// Multi-index of the flat position `k`.
    std::vector<std::size_t> indices(std::size_t k) const {
        std::vector<std::size_t> idx(counts.size(), 0);
        for (std::size_t a = counts.size(); a-- > 0;) {
            idx[a] = k % counts[a];
            k /= counts[a];
        }
        return idx;
    }

    Vec point(const std::vector<std::size_t>& idx) const {
        Vec p(counts.size());
        for (std::size_t a = 0; a < counts.size(); ++a) {
            if (counts[a] == 1) {
                p[a] = 0.5 * (lo[a] + hi[a]);
            } else {
                double s = static_cast<double>(idx[a]) / static_cast<double>(counts[a] - 1);
                p[a] = lo[a] + s * (hi[a] - lo[a]);
            }
        }
        return p;
    }

    Vec point(std::size_t k) const { return point(indices(k)); }
};

/// Symmetric box [-half_width, half_width]^axes.
BoxGrid centered_grid(double half_width, const std::vector<std::size_t>& counts);

} // namespace periscope

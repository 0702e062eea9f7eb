#pragma once

#include <cstdint>
#include <vector>

#include "gridatlas/grid.hpp"

namespace gridatlas {

// Dense per-cell scalar field over a layout; every value stays within [0, 1].
struct Heatmap {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major

    static Heatmap zeros(int width, int height) {
        Heatmap m;
        m.width = width;
        m.height = height;
        m.values.assign(static_cast<size_t>(width) * height, 0.0);
        return m;
    }

    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    double at(GridCoord c) const { return at(c.x, c.y); }
    double& at(GridCoord c) { return at(c.x, c.y); }
    bool in_bounds(GridCoord c) const {
        return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
    }
    bool same_shape(const Heatmap& other) const {
        return width == other.width && height == other.height;
    }

    void clamp01() {
        for (double& v : values) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }

    uint64_t content_hash() const;
};

}  // namespace gridatlas

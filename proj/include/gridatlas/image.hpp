#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridatlas/grid.hpp"
#include "gridatlas/heatmap.hpp"

namespace gridatlas {

struct Image {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> rgba;  // row-major, 4 bytes per pixel

    static Image blank(int width, int height);
    void set_pixel(int x, int y, uint8_t r, uint8_t g, uint8_t b, uint8_t a);
    void fill_rect(int x0, int y0, int w, int h, uint8_t r, uint8_t g, uint8_t b, uint8_t a);
};

enum class HeatmapChannel : uint8_t { Danger, Affinity };

inline constexpr int kDefaultCellPx = 40;

// Each cell becomes a uniform cell_px block: danger (255,0,0,round(255*v)),
// affinity (0,255,0,round(255*v)). Pure function of its inputs.
Image render_heatmap(const Heatmap& map, HeatmapChannel channel, int cell_px = kDefaultCellPx);

// Flat-color snapshot of a state, for exemplar and inspection artifacts.
Image render_state(const GridState& state, int cell_px = kDefaultCellPx);

// Minimal RGBA8 PNG encoder (zlib-backed); output is deterministic.
std::vector<uint8_t> encode_png(const Image& image);
void write_png(const Image& image, const std::string& path);

}  // namespace gridatlas

#include "gridatlas/image.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gridatlas {

Image Image::blank(int width, int height) {
    Image img;
    img.width = width;
    img.height = height;
    img.rgba.assign(static_cast<size_t>(width) * height * 4, 0);
    return img;
}

void Image::set_pixel(int x, int y, uint8_t r, uint8_t g, uint8_t b, uint8_t a) {
    size_t i = (static_cast<size_t>(y) * width + x) * 4;
    rgba[i] = r;
    rgba[i + 1] = g;
    rgba[i + 2] = b;
    rgba[i + 3] = a;
}

void Image::fill_rect(int x0, int y0, int w, int h, uint8_t r, uint8_t g, uint8_t b,
                      uint8_t a) {
    for (int y = y0; y < y0 + h; ++y)
        for (int x = x0; x < x0 + w; ++x) set_pixel(x, y, r, g, b, a);
}

Image render_heatmap(const Heatmap& map, HeatmapChannel channel, int cell_px) {
    if (cell_px < 1) throw std::invalid_argument("render_heatmap: cell_px must be >= 1");
    Image img = Image::blank(map.width * cell_px, map.height * cell_px);
    for (int cy = 0; cy < map.height; ++cy)
        for (int cx = 0; cx < map.width; ++cx) {
            auto a = static_cast<uint8_t>(std::lround(255.0 * map.at(cx, cy)));
            if (channel == HeatmapChannel::Danger)
                img.fill_rect(cx * cell_px, cy * cell_px, cell_px, cell_px, 255, 0, 0, a);
            else
                img.fill_rect(cx * cell_px, cy * cell_px, cell_px, cell_px, 0, 255, 0, a);
        }
    return img;
}

namespace {

struct Rgb {
    uint8_t r, g, b;
};

Rgb cell_color(CellKind k) {
    switch (k) {
        case CellKind::Floor: return {48, 48, 48};
        case CellKind::Wall: return {110, 110, 110};
        case CellKind::Target: return {200, 160, 40};
        case CellKind::Hole: return {25, 35, 90};
        case CellKind::Goal: return {40, 160, 70};
        case CellKind::Start: return {60, 110, 170};
    }
    return {0, 0, 0};
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_chunk(std::vector<uint8_t>& out, const char type[4],
               const std::vector<uint8_t>& data) {
    put_u32(out, static_cast<uint32_t>(data.size()));
    size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uint32_t crc = crc32(0, out.data() + start, static_cast<uInt>(out.size() - start));
    put_u32(out, crc);
}

}  // namespace

Image render_state(const GridState& state, int cell_px) {
    if (cell_px < 1) throw std::invalid_argument("render_state: cell_px must be >= 1");
    const GridLayout& lay = *state.layout;
    Image img = Image::blank(lay.width * cell_px, lay.height * cell_px);
    for (int cy = 0; cy < lay.height; ++cy)
        for (int cx = 0; cx < lay.width; ++cx) {
            Rgb c = cell_color(lay.at(cx, cy));
            img.fill_rect(cx * cell_px, cy * cell_px, cell_px, cell_px, c.r, c.g, c.b, 255);
        }
    // entities as inset blocks so the cell underneath stays visible
    int inset = cell_px / 5;
    int side = cell_px - 2 * inset;
    if (side < 1) {
        inset = 0;
        side = cell_px;
    }
    for (GridCoord b : state.boxes)
        img.fill_rect(b.x * cell_px + inset, b.y * cell_px + inset, side, side, 160, 90, 30, 255);
    img.fill_rect(state.player.x * cell_px + inset, state.player.y * cell_px + inset, side, side,
                  235, 235, 235, 255);
    return img;
}

std::vector<uint8_t> encode_png(const Image& image) {
    // scanlines, each prefixed with filter byte 0
    std::vector<uint8_t> raw;
    raw.reserve(static_cast<size_t>(image.height) * (1 + static_cast<size_t>(image.width) * 4));
    for (int y = 0; y < image.height; ++y) {
        raw.push_back(0);
        const uint8_t* row = image.rgba.data() + static_cast<size_t>(y) * image.width * 4;
        raw.insert(raw.end(), row, row + static_cast<size_t>(image.width) * 4);
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) !=
        Z_OK)
        throw std::runtime_error("png: deflate failed");
    compressed.resize(bound);

    std::vector<uint8_t> out{137, 80, 78, 71, 13, 10, 26, 10};
    std::vector<uint8_t> ihdr;
    put_u32(ihdr, static_cast<uint32_t>(image.width));
    put_u32(ihdr, static_cast<uint32_t>(image.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(6);  // color type RGBA
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", compressed);
    put_chunk(out, "IEND", {});
    return out;
}

void write_png(const Image& image, const std::string& path) {
    std::vector<uint8_t> bytes = encode_png(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("png: cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace gridatlas

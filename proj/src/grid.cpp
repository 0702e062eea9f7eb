#include "gridatlas/grid.hpp"

#include <algorithm>
#include <sstream>

#include "gridatlas/errors.hpp"
#include "gridatlas/rng.hpp"

namespace gridatlas {

GridCoord dir_delta(Dir d) {
    switch (d) {
        case Dir::Up: return {0, -1};
        case Dir::Down: return {0, 1};
        case Dir::Left: return {-1, 0};
        case Dir::Right: return {1, 0};
    }
    return {0, 0};
}

std::vector<GridCoord> GridLayout::cells_of(CellKind k) const {
    std::vector<GridCoord> out;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (at(x, y) == k) out.push_back({x, y});
    return out;
}

bool GridState::box_at(GridCoord c) const {
    return std::binary_search(boxes.begin(), boxes.end(), c);
}

bool GridState::all_boxes_on_targets() const {
    if (boxes.empty()) return false;
    for (GridCoord b : boxes)
        if (layout->at(b) != CellKind::Target) return false;
    return true;
}

uint64_t GridState::occupancy_hash() const {
    Digest d;
    d.add_u64(layout->seed);
    d.add_i64(player.x);
    d.add_i64(player.y);
    for (GridCoord b : boxes) {
        d.add_i64(b.x);
        d.add_i64(b.y);
    }
    return d.value();
}

namespace {

char base_char(CellKind k) {
    switch (k) {
        case CellKind::Floor: return '.';
        case CellKind::Wall: return '#';
        case CellKind::Target: return 'T';
        case CellKind::Hole: return 'H';
        case CellKind::Goal: return 'G';
        case CellKind::Start: return 'S';
    }
    return '?';
}

char player_char(CellKind under) {
    switch (under) {
        case CellKind::Floor: return 'P';
        case CellKind::Target: return 'p';
        case CellKind::Start: return 's';
        case CellKind::Goal: return 'g';
        case CellKind::Hole: return 'h';
        default: return 'P';
    }
}

}  // namespace

std::string serialize_state(const GridState& state) {
    const GridLayout& lay = *state.layout;
    std::string out;
    out += std::to_string(lay.width);
    out += ' ';
    out += std::to_string(lay.height);
    out += '\n';
    for (int y = 0; y < lay.height; ++y) {
        for (int x = 0; x < lay.width; ++x) {
            GridCoord c{x, y};
            char ch = base_char(lay.at(c));
            if (state.box_at(c)) ch = lay.at(c) == CellKind::Target ? 'b' : 'B';
            if (state.player == c) ch = player_char(lay.at(c));
            out += ch;
        }
        out += '\n';
    }
    return out;
}

GridState parse_state(const std::string& text) {
    std::istringstream in(text);
    int w = 0;
    int h = 0;
    if (!(in >> w >> h) || w < 1 || h < 1)
        throw FormatError("grid text: bad header, expected 'W H'");
    std::string line;
    std::getline(in, line);  // rest of the header line

    auto layout = std::make_shared<GridLayout>();
    layout->width = w;
    layout->height = h;
    layout->cells.assign(static_cast<size_t>(w) * h, CellKind::Floor);

    GridState state;
    bool player_seen = false;
    bool frozen = false;
    for (int y = 0; y < h; ++y) {
        if (!std::getline(in, line))
            throw FormatError("grid text: missing row " + std::to_string(y));
        if (static_cast<int>(line.size()) != w)
            throw FormatError("grid text: row " + std::to_string(y) + " has wrong width");
        for (int x = 0; x < w; ++x) {
            CellKind k = CellKind::Floor;
            bool box = false;
            bool player = false;
            switch (line[x]) {
                case '.': break;
                case '#': k = CellKind::Wall; break;
                case 'T': k = CellKind::Target; break;
                case 'H': k = CellKind::Hole; break;
                case 'G': k = CellKind::Goal; break;
                case 'S': k = CellKind::Start; break;
                case 'B': box = true; break;
                case 'b': k = CellKind::Target; box = true; break;
                case 'P': player = true; break;
                case 'p': k = CellKind::Target; player = true; break;
                case 's': k = CellKind::Start; player = true; break;
                case 'g': k = CellKind::Goal; player = true; break;
                case 'h': k = CellKind::Hole; player = true; break;
                default:
                    throw FormatError(std::string("grid text: unknown cell '") + line[x] + "'");
            }
            layout->cells[static_cast<size_t>(y) * w + x] = k;
            if (box) state.boxes.push_back({x, y});
            if (player) {
                if (player_seen) throw FormatError("grid text: more than one player");
                state.player = {x, y};
                player_seen = true;
            }
            if (k == CellKind::Hole || k == CellKind::Goal || k == CellKind::Start) frozen = true;
        }
    }
    if (!player_seen) throw FormatError("grid text: no player cell");
    layout->kind = frozen ? EnvKind::FrozenLake : EnvKind::Sokoban;
    std::sort(state.boxes.begin(), state.boxes.end());
    state.layout = layout;
    state.step_index = 0;
    state.terminal = Terminal::Running;
    if (layout->kind == EnvKind::FrozenLake) {
        if (layout->at(state.player) == CellKind::Hole) state.terminal = Terminal::Failure;
        if (layout->at(state.player) == CellKind::Goal) state.terminal = Terminal::Success;
    } else if (state.all_boxes_on_targets()) {
        state.terminal = Terminal::Success;
    }
    return state;
}

}  // namespace gridatlas

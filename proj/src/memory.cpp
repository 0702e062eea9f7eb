#include "gridatlas/memory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gridatlas/errors.hpp"
#include "gridatlas/textio.hpp"

namespace gridatlas {

namespace {

// 4x4 patch index of a cell.
int patch_of(int coord, int extent) {
    int p = coord * 4 / extent;
    return p > 3 ? 3 : p;
}

struct PatchSpan {
    int x0, x1, y0, y1;  // half-open cell ranges
};

PatchSpan patch_span(int px, int py, int w, int h) {
    PatchSpan s;
    s.x0 = px * w / 4;
    s.x1 = (px + 1) * w / 4;
    s.y0 = py * h / 4;
    s.y1 = (py + 1) * h / 4;
    if (s.x1 <= s.x0) s.x1 = s.x0 + 1;
    if (s.y1 <= s.y0) s.y1 = s.y0 + 1;
    return s;
}

// Rank of a cell within its patch, mapped into (0, 1]; lets the embedding move
// whenever an entity moves, even inside one patch.
double position_code(GridCoord c, int w, int h) {
    int px = patch_of(c.x, w);
    int py = patch_of(c.y, h);
    PatchSpan s = patch_span(px, py, w, h);
    int cols = s.x1 - s.x0;
    int rows = s.y1 - s.y0;
    int rank = (c.y - s.y0) * cols + (c.x - s.x0);
    return static_cast<double>(rank + 1) / (cols * rows);
}

}  // namespace

std::array<double, kEmbeddingDim> embed_frame(const GridState& frame) {
    const GridLayout& lay = *frame.layout;
    std::array<double, kEmbeddingDim> v{};
    auto slot = [&](int channel, GridCoord c) {
        return channel * 16 + patch_of(c.y, lay.height) * 4 + patch_of(c.x, lay.width);
    };
    for (int y = 0; y < lay.height; ++y)
        for (int x = 0; x < lay.width; ++x) {
            GridCoord c{x, y};
            CellKind k = lay.at(c);
            if (k == CellKind::Wall) v[slot(0, c)] = 1.0;
            if (k == CellKind::Target || k == CellKind::Goal || k == CellKind::Hole)
                v[slot(1, c)] = 1.0;
        }
    v[slot(2, frame.player)] = position_code(frame.player, lay.width, lay.height);
    for (GridCoord b : frame.boxes) {
        int i = slot(3, b);
        v[i] = std::max(v[i], position_code(b, lay.width, lay.height));
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;  // player channel guarantees norm > 0
    return v;
}

double cosine_similarity(const std::array<double, kEmbeddingDim>& a,
                         const std::array<double, kEmbeddingDim>& b) {
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (int i = 0; i < kEmbeddingDim; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<PoolEvent> ExemplarPool::insert_with_eviction(Exemplar candidate) {
    std::deque<Exemplar>& klass =
        candidate.tag == ExemplarTag::Positive ? positives : negatives;
    const size_t cap = candidate.tag == ExemplarTag::Positive ? kMaxPositives : kMaxNegatives;

    std::vector<PoolEvent> events;
    for (const Exemplar& e : klass)
        if (cosine_similarity(e.embedding, candidate.embedding) > kDuplicateCosine) {
            events.push_back({PoolEventKind::RejectedDuplicate, candidate.tag, e.inserted_at,
                              candidate.source_episode});
            return events;
        }

    candidate.inserted_at = sequence_counter++;
    events.push_back({PoolEventKind::Inserted, candidate.tag, candidate.inserted_at,
                      candidate.source_episode});
    klass.push_back(std::move(candidate));
    if (klass.size() > cap) {
        events.push_back({PoolEventKind::Evicted, klass.front().tag, klass.front().inserted_at,
                          klass.front().source_episode});
        klass.pop_front();
    }
    return events;
}

std::vector<const Exemplar*> ExemplarPool::all() const {
    std::vector<const Exemplar*> out;
    for (const Exemplar& e : positives) out.push_back(&e);
    for (const Exemplar& e : negatives) out.push_back(&e);
    return out;
}

std::vector<const Exemplar*> retrieve_top_k(const GridState& obs, const ExemplarPool& pool,
                                            int k) {
    if (k < 0) throw std::invalid_argument("retrieve_top_k: k must be >= 0");
    auto query = embed_frame(obs);
    std::vector<std::pair<double, const Exemplar*>> scored;
    for (const Exemplar* e : pool.all())
        scored.emplace_back(cosine_similarity(query, e->embedding), e);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second->inserted_at > b.second->inserted_at;
    });
    if (static_cast<int>(scored.size()) > k) scored.resize(static_cast<size_t>(k));
    std::vector<const Exemplar*> out;
    for (auto& [sim, e] : scored) out.push_back(e);
    return out;
}

std::vector<Exemplar> mine_keyframes(const Trajectory& trajectory,
                                     const std::vector<GridState>& frames) {
    if (frames.size() != trajectory.steps.size() + 1)
        throw AlignmentMismatch("mine_keyframes: expected one frame per step plus the initial");

    std::vector<Exemplar> out;
    auto make = [&](const GridState& frame, ExemplarTag tag) {
        Exemplar e;
        e.frame = serialize_state(frame);
        e.tag = tag;
        e.embedding = embed_frame(frame);
        return e;
    };

    if (trajectory.outcome == Outcome::Failure) {
        if (!trajectory.steps.empty())
            out.push_back(make(frames[trajectory.steps.size() - 1], ExemplarTag::Negative));
    } else if (trajectory.outcome == Outcome::Success) {
        const GridLayout& lay = *frames.front().layout;
        auto on_targets = [&](const GridState& s) {
            int n = 0;
            for (GridCoord b : s.boxes)
                if (lay.at(b) == CellKind::Target) ++n;
            return n;
        };
        for (size_t i = 0; i + 1 < frames.size() && out.size() < 2; ++i) {
            const GridState& before = frames[i];
            const GridState& after = frames[i + 1];
            bool subgoal = false;
            if (lay.kind == EnvKind::Sokoban)
                subgoal = on_targets(after) > on_targets(before);
            else
                subgoal = lay.at(after.player) == CellKind::Goal;
            if (subgoal) out.push_back(make(after, ExemplarTag::Positive));
        }
    }
    return out;
}

std::string serialize_pool(const ExemplarPool& pool) {
    std::ostringstream out;
    out << "gridatlas-pool v1\n";
    out << "sequence_counter " << pool.sequence_counter << '\n';
    out << "count " << pool.size() << '\n';
    for (const Exemplar* e : pool.all()) {
        out << "exemplar " << (e->tag == ExemplarTag::Positive ? "positive" : "negative") << ' '
            << e->inserted_at << ' ' << e->source_episode << '\n';
        out << "embedding";
        for (double v : e->embedding) out << ' ' << format_double(v);
        out << '\n';
        size_t lines = static_cast<size_t>(std::count(e->frame.begin(), e->frame.end(), '\n'));
        out << "frame " << lines << '\n' << e->frame;
    }
    return out.str();
}

ExemplarPool parse_pool(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "gridatlas-pool v1")
        throw CheckpointError("pool: bad or missing header");
    ExemplarPool pool;
    std::string key;
    size_t count = 0;
    if (!(in >> key >> pool.sequence_counter) || key != "sequence_counter")
        throw CheckpointError("pool: missing sequence_counter");
    if (!(in >> key >> count) || key != "count") throw CheckpointError("pool: missing count");
    std::getline(in, line);
    for (size_t i = 0; i < count; ++i) {
        std::string tag;
        Exemplar e;
        if (!(in >> key >> tag >> e.inserted_at >> e.source_episode) || key != "exemplar")
            throw CheckpointError("pool: truncated exemplar record");
        if (tag == "positive")
            e.tag = ExemplarTag::Positive;
        else if (tag == "negative")
            e.tag = ExemplarTag::Negative;
        else
            throw CheckpointError("pool: unknown tag '" + tag + "'");
        if (!(in >> key) || key != "embedding") throw CheckpointError("pool: missing embedding");
        for (double& v : e.embedding)
            if (!(in >> v)) throw CheckpointError("pool: truncated embedding");
        size_t lines = 0;
        if (!(in >> key >> lines) || key != "frame") throw CheckpointError("pool: missing frame");
        std::getline(in, line);
        for (size_t j = 0; j < lines; ++j) {
            if (!std::getline(in, line)) throw CheckpointError("pool: truncated frame");
            e.frame += line;
            e.frame += '\n';
        }
        if (e.tag == ExemplarTag::Positive)
            pool.positives.push_back(std::move(e));
        else
            pool.negatives.push_back(std::move(e));
    }
    return pool;
}

std::vector<const TextSkill*> SkillLibrary::top_k(int k) const {
    std::vector<const TextSkill*> out;
    for (const TextSkill& s : skills) out.push_back(&s);
    std::stable_sort(out.begin(), out.end(),
                     [](const TextSkill* a, const TextSkill* b) { return a->priority > b->priority; });
    if (static_cast<int>(out.size()) > k) out.resize(static_cast<size_t>(k));
    return out;
}

void SkillLibrary::record_hits(const std::vector<const TextSkill*>& used) {
    for (const TextSkill* u : used)
        for (TextSkill& s : skills)
            if (&s == u) ++s.hits;
}

void SkillLibrary::maybe_rerank(int epoch) {
    if (rerank_interval < 1 || epoch == 0 || epoch % rerank_interval != 0) return;
    std::vector<TextSkill*> order;
    for (TextSkill& s : skills) order.push_back(&s);
    std::stable_sort(order.begin(), order.end(), [](const TextSkill* a, const TextSkill* b) {
        if (a->hits != b->hits) return a->hits > b->hits;
        return a->priority > b->priority;
    });
    int p = static_cast<int>(order.size());
    for (TextSkill* s : order) s->priority = p--;
}

SkillLibrary parse_rulebook(const std::string& text) {
    SkillLibrary lib;
    std::istringstream in(text);
    std::string line;
    SkillCategory cat = SkillCategory::General;
    bool in_section = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || (line[0] == '#' && line.rfind("##", 0) != 0)) continue;
        if (line.rfind("##", 0) == 0) {
            if (line == "## General Principles")
                cat = SkillCategory::General;
            else if (line == "## Push Strategies")
                cat = SkillCategory::Push;
            else if (line == "## Mistakes to Avoid")
                cat = SkillCategory::Mistake;
            else
                throw FormatError("rulebook line " + std::to_string(lineno) +
                                  ": unknown section '" + line + "'");
            in_section = true;
            continue;
        }
        if (!in_section)
            throw FormatError("rulebook line " + std::to_string(lineno) +
                              ": skill before any section heading");
        std::istringstream ls(line);
        TextSkill s;
        if (!(ls >> s.priority))
            throw FormatError("rulebook line " + std::to_string(lineno) +
                              ": expected integer priority prefix");
        std::getline(ls, s.text);
        while (!s.text.empty() && s.text.front() == ' ') s.text.erase(s.text.begin());
        if (s.text.empty())
            throw FormatError("rulebook line " + std::to_string(lineno) + ": empty skill text");
        s.category = cat;
        lib.skills.push_back(std::move(s));
    }
    return lib;
}

SkillLibrary load_rulebook_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("rulebook: cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_rulebook(buf.str());
}

SkillLibrary builtin_rulebook(EnvKind kind) {
    if (kind == EnvKind::Sokoban)
        return parse_rulebook(
            "## General Principles\n"
            "9 Scan the whole layout and plan the push order before moving.\n"
            "8 Keep track of which target each box should end on.\n"
            "7 Prefer routes that leave you room to walk around a box.\n"
            "## Push Strategies\n"
            "6 Push a box only when you stand directly behind it.\n"
            "5 Line the box up with its target row or column first.\n"
            "4 Clear the path beyond the box before committing to a push.\n"
            "## Mistakes to Avoid\n"
            "3 Never push a box into a corner that is not a target.\n"
            "2 Avoid pushing a box flush along a wall without an exit.\n"
            "1 Do not waste moves shuttling between boxes without progress.\n");
    return parse_rulebook(
        "## General Principles\n"
        "9 Plot a route to the goal before taking the first step.\n"
        "8 Count the remaining steps against the step budget.\n"
        "## Push Strategies\n"
        "6 Move along the shortest safe detour, not the straight line.\n"
        "5 Hug the grid edge when the interior is riddled with holes.\n"
        "## Mistakes to Avoid\n"
        "3 Never step onto a hole; the episode ends immediately.\n"
        "2 Do not pace back and forth; the budget runs out.\n"
        "1 Avoid squeezing between two holes when a wider path exists.\n");
}

std::string serialize_skills(const SkillLibrary& lib) {
    std::ostringstream out;
    out << "gridatlas-skills v1\n";
    out << "count " << lib.skills.size() << '\n';
    for (const TextSkill& s : lib.skills)
        out << static_cast<int>(s.category) << ' ' << s.priority << ' ' << s.hits << ' '
            << s.text << '\n';
    return out.str();
}

SkillLibrary parse_skills(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "gridatlas-skills v1")
        throw CheckpointError("skills: bad or missing header");
    SkillLibrary lib;
    std::string key;
    size_t count = 0;
    if (!(in >> key >> count) || key != "count") throw CheckpointError("skills: missing count");
    std::getline(in, line);
    for (size_t i = 0; i < count; ++i) {
        int cat = 0;
        TextSkill s;
        if (!(in >> cat >> s.priority >> s.hits))
            throw CheckpointError("skills: truncated record");
        if (cat < 0 || cat > 2) throw CheckpointError("skills: bad category");
        s.category = static_cast<SkillCategory>(cat);
        std::getline(in, s.text);
        while (!s.text.empty() && s.text.front() == ' ') s.text.erase(s.text.begin());
        lib.skills.push_back(std::move(s));
    }
    return lib;
}

std::string PromptDocument::manifest(const std::string& danger_ref,
                                     const std::string& affinity_ref) const {
    std::ostringstream out;
    out << "## Spatial Skill Maps\n";
    out << "danger: " << danger_ref << '\n';
    out << "affinity: " << affinity_ref << '\n';
    if (!exemplars.empty()) {
        out << "## Visual Exemplars\n";
        for (const PromptExemplar& e : exemplars) {
            out << (e.tag == ExemplarTag::Positive ? "positive" : "negative")
                << " (similarity " << format_double(e.similarity) << ")\n";
            out << e.frame;
        }
    }
    if (!principles.empty()) {
        out << "## Learned Principles\n";
        for (const TextSkill& s : principles) out << s.priority << ' ' << s.text << '\n';
    }
    out << "[Current Observation]\n";
    out << observation;
    return out.str();
}

PromptDocument assemble_prompt_prerendered(std::shared_ptr<const Image> danger_map,
                                           std::shared_ptr<const Image> affinity_map,
                                           const ExemplarPool& pool, const SkillLibrary& skills,
                                           const GridState& obs, int top_k_skills) {
    PromptDocument doc;
    doc.danger_map = std::move(danger_map);
    doc.affinity_map = std::move(affinity_map);

    auto query = embed_frame(obs);
    for (const Exemplar* e : retrieve_top_k(obs, pool, kMaxExemplarsInjected))
        doc.exemplars.push_back(
            {e->tag, e->frame, cosine_similarity(query, e->embedding)});
    for (const TextSkill* s : skills.top_k(top_k_skills)) doc.principles.push_back(*s);
    doc.observation = serialize_state(obs);
    return doc;
}

PromptDocument assemble_prompt(const BlendedMaps& maps, const ExemplarPool& pool,
                               const SkillLibrary& skills, const GridState& obs,
                               int top_k_skills, int cell_px) {
    auto danger = std::make_shared<Image>(render_heatmap(maps.danger, HeatmapChannel::Danger, cell_px));
    auto affinity =
        std::make_shared<Image>(render_heatmap(maps.affinity, HeatmapChannel::Affinity, cell_px));
    return assemble_prompt_prerendered(std::move(danger), std::move(affinity), pool, skills, obs,
                                       top_k_skills);
}

}  // namespace gridatlas

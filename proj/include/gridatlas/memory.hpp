#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "gridatlas/atlas.hpp"
#include "gridatlas/grid.hpp"
#include "gridatlas/image.hpp"

namespace gridatlas {

inline constexpr int kEmbeddingDim = 64;
inline constexpr int kMaxPositives = 3;
inline constexpr int kMaxNegatives = 3;
inline constexpr int kMaxExemplarsInjected = 4;
inline constexpr int kDefaultTopKSkills = 3;
inline constexpr double kDuplicateCosine = 0.999;

enum class ExemplarTag : uint8_t { Positive, Negative };

struct Exemplar {
    std::string frame;  // serialized state snapshot
    ExemplarTag tag = ExemplarTag::Positive;
    std::array<double, kEmbeddingDim> embedding{};
    uint64_t inserted_at = 0;  // pool sequence number, assigned on insert
    int64_t source_episode = -1;
};

// Structural frame descriptor: max-pooled 4x4 occupancy channels (walls,
// targets/goals/holes, player, boxes) with within-patch position codes for the
// entities, L2-normalized. Deterministic; norm is always 1.
std::array<double, kEmbeddingDim> embed_frame(const GridState& frame);

double cosine_similarity(const std::array<double, kEmbeddingDim>& a,
                         const std::array<double, kEmbeddingDim>& b);

enum class PoolEventKind : uint8_t { Inserted, Evicted, RejectedDuplicate };

struct PoolEvent {
    PoolEventKind kind = PoolEventKind::Inserted;
    ExemplarTag tag = ExemplarTag::Positive;
    uint64_t sequence = 0;
    int64_t source_episode = -1;
};

// Two FIFO classes capped at 3/3; near-duplicates (cosine > 0.999 within the
// same class) are rejected outright.
struct ExemplarPool {
    std::deque<Exemplar> positives;
    std::deque<Exemplar> negatives;
    uint64_t sequence_counter = 0;

    std::vector<PoolEvent> insert_with_eviction(Exemplar candidate);
    size_t size() const { return positives.size() + negatives.size(); }
    std::vector<const Exemplar*> all() const;
};

// Global top-k across both classes by cosine similarity to the observation;
// ties go to the newest sequence number.
std::vector<const Exemplar*> retrieve_top_k(const GridState& obs, const ExemplarPool& pool,
                                            int k = kMaxExemplarsInjected);

// Failure: the frame immediately preceding the terminal step, tagged Negative.
// Success: post-step frames of sub-goal completions (box onto target, player
// onto goal), tagged Positive. At most two candidates per trajectory.
// frames[0] is the initial state and frames[i + 1] the state after step i.
std::vector<Exemplar> mine_keyframes(const Trajectory& trajectory,
                                     const std::vector<GridState>& frames);

std::string serialize_pool(const ExemplarPool& pool);
ExemplarPool parse_pool(const std::string& text);

enum class SkillCategory : uint8_t { General, Push, Mistake };

struct TextSkill {
    SkillCategory category = SkillCategory::General;
    std::string text;
    int priority = 0;
    uint64_t hits = 0;  // how often the skill made it into a prompt
};

// Fixed texts sourced from a rulebook; ranking evolves, wording never does.
struct SkillLibrary {
    std::vector<TextSkill> skills;
    int rerank_interval = 10;

    // Highest priority first; ties keep load order.
    std::vector<const TextSkill*> top_k(int k) const;
    void record_hits(const std::vector<const TextSkill*>& used);
    // Every rerank_interval epochs: reassign priorities from hit counters.
    void maybe_rerank(int epoch);
};

// Rulebook file: '## General Principles' / '## Push Strategies' /
// '## Mistakes to Avoid' sections, one 'priority text' line per skill.
SkillLibrary parse_rulebook(const std::string& text);
SkillLibrary load_rulebook_file(const std::string& path);
SkillLibrary builtin_rulebook(EnvKind kind);

std::string serialize_skills(const SkillLibrary& lib);
SkillLibrary parse_skills(const std::string& text);

struct PromptExemplar {
    ExemplarTag tag = ExemplarTag::Positive;
    std::string frame;
    double similarity = 0.0;
};

// Assembled context in its fixed anchor order; empty sections are omitted.
struct PromptDocument {
    std::shared_ptr<const Image> danger_map;
    std::shared_ptr<const Image> affinity_map;
    std::vector<PromptExemplar> exemplars;
    std::vector<TextSkill> principles;
    std::string observation;

    // Text manifest listing the anchors and image references.
    std::string manifest(const std::string& danger_ref = "danger.png",
                         const std::string& affinity_ref = "affinity.png") const;
};

PromptDocument assemble_prompt(const BlendedMaps& maps, const ExemplarPool& pool,
                               const SkillLibrary& skills, const GridState& obs,
                               int top_k_skills = kDefaultTopKSkills,
                               int cell_px = kDefaultCellPx);

// Same document, but reusing images rendered once per atlas snapshot; used by
// the rollout loop where the blend is frozen across a whole batch.
PromptDocument assemble_prompt_prerendered(std::shared_ptr<const Image> danger_map,
                                           std::shared_ptr<const Image> affinity_map,
                                           const ExemplarPool& pool, const SkillLibrary& skills,
                                           const GridState& obs,
                                           int top_k_skills = kDefaultTopKSkills);

}  // namespace gridatlas

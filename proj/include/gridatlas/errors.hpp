#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gridatlas {

// Generation gave up after exhausting its retry budget.
struct InfeasibleGeneration : std::runtime_error {
    int budget;
    InfeasibleGeneration(int budget_, const std::string& msg)
        : std::runtime_error(msg), budget(budget_) {}
};

struct SteppedTerminal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfBounds : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MixedLayouts : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlignmentMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SeedOverlap : std::runtime_error {
    uint64_t seed;
    SeedOverlap(uint64_t seed_, const std::string& msg)
        : std::runtime_error(msg), seed(seed_) {}
};

// Malformed serialized data (grid text, checkpoint files, rulebooks).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    int line;
    std::string field;
    ConfigError(const std::string& msg, int line_ = 0, std::string field_ = "")
        : std::runtime_error(msg), line(line_), field(std::move(field_)) {}
};

}  // namespace gridatlas

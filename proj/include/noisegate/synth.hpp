#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noisegate/audio_io.hpp"

namespace ng {

struct RainSpec {
    double level_db = -20.0;        // RMS of the broadband bed, dBFS
    double drops_per_second = 250.0;
};

struct ChorusSpec {
    double center_hz = 2000.0;
    double bandwidth_hz = 400.0;
    double level_db = -20.0;  // RMS, dBFS
};

struct ChirpSpec {
    double low_hz = 2000.0;
    double high_hz = 6000.0;
    int count = 3;
    double level_db = -20.0;  // per-chirp peak, dBFS
};

struct SceneSpec {
    std::uint64_t seed = 0;
    double duration = kSegmentSeconds;
    double noise_floor_db = -60.0;
    std::optional<RainSpec> rain;
    std::optional<ChorusSpec> chorus;
    std::optional<ChirpSpec> chirps;
};

struct SceneLabels {
    bool rain = false;    // rain present and louder than every chirp
    bool cicada = false;  // chorus present
};

struct Scene {
    AudioBuffer audio;
    SceneLabels labels;
    SceneSpec spec;
};

// Pure function of its SceneSpec: same input, bit-identical audio. Throws when the
// mixed peak exceeds 4x full scale before the soft clip.
Scene gen_scene(const SceneSpec& spec);

struct CorpusSpec {
    std::size_t n = 200;
    std::uint64_t seed = 0;
    double rain_fraction = 0.3;
    double cicada_fraction = 0.3;
};

// Deterministic labeled corpus with exact per-class counts (rounded from the
// fractions). Non-rain scenes may still contain quiet rain as hard negatives.
std::vector<Scene> gen_corpus(const CorpusSpec& spec);

}  // namespace ng

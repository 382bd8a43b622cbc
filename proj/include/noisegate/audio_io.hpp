#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ng {

inline constexpr int kCanonicalRate = 22050;
inline constexpr double kSegmentSeconds = 10.0;
inline constexpr std::size_t kSegmentSamples = 220500;

struct AudioBuffer {
    std::vector<double> samples;  // mono, nominally within [-1, 1]
    int sample_rate = kCanonicalRate;

    double duration() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

// One canonical-format chunk: mono, 22.05 kHz, exactly 10 s.
struct Segment {
    AudioBuffer audio;
    std::string source;     // originating file path or scene id
    std::size_t index = 0;  // chunk position within the source
};

// Reads a RIFF/WAVE file. Supports PCM16 and IEEE float32, mono or stereo
// (stereo is downmixed by averaging). Anything else is rejected.
AudioBuffer read_wav(const std::string& path);

// Writes mono PCM16. Samples are clipped to [-1, 1] first; full scale maps to
// +/-32767.
void write_wav(const std::string& path, const AudioBuffer& buf);

// Windowed-sinc rate conversion (Kaiser beta = 8). Identity when the rate
// already matches.
AudioBuffer resample(const AudioBuffer& in, int target_rate);

// Cuts a buffer into canonical 10 s segments, resampling to 22.05 kHz first
// when needed. A trailing remainder shorter than 10 s is discarded.
std::vector<Segment> segment_audio(const AudioBuffer& in, const std::string& source);

}  // namespace ng

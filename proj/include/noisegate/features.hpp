#pragma once

#include <string>
#include <vector>

#include "noisegate/audio_io.hpp"

namespace ng {

enum class FeatureSet {
    indices,         // whole-spectrum acoustic indices only
    freq_indices,    // whole-signal indices + per-band indices + rain band
    mfccs,           // 33 coefficients with both delta orders
    mfccs_no_delta,  // 33 coefficients only
    all,             // freq_indices + mfccs
    all_no_delta,    // freq_indices + mfccs_no_delta
    cfs_subset,      // resolved at training time; not directly extractable
};

FeatureSet feature_set_from_string(const std::string& s);
std::string to_string(FeatureSet set);

struct Preprocess {
    bool highpass = false;  // 1 kHz high-pass, applied first
    bool mmse = false;      // spectral noise reduction, applied second
};

struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;
};

// Canonical ordered names for a set. cfs_subset has no static name list and
// is rejected here.
std::vector<std::string> feature_names(FeatureSet set, bool highpass);

AudioBuffer preprocess(const AudioBuffer& buf, const Preprocess& pre);

// Deterministic feature extraction for one canonical segment.
FeatureVector extract_features(const Segment& seg, FeatureSet set, const Preprocess& pre);

}  // namespace ng

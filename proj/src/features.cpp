#include "noisegate/features.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include "noisegate/dsp.hpp"
#include "noisegate/indices.hpp"
#include "noisegate/mfcc.hpp"

namespace ng {
namespace {

constexpr double kHighpassCutoffHz = 1000.0;
constexpr std::size_t kHighpassTaps = 1001;

const std::vector<std::string>& per_band_index_names() {
    static const std::vector<std::string> names = {"aci", "h_f", "snr", "isnr",
                                                   "ssnr", "psd", "cvr_low", "cvr_med"};
    return names;
}

std::string two_digits(std::size_t v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

void append_mfcc_names(std::vector<std::string>& out, bool deltas) {
    for (std::size_t c = 0; c < kNumMfcc; ++c) out.push_back("mfcc_" + two_digits(c));
    if (!deltas) return;
    for (std::size_t c = 0; c < kNumMfcc; ++c) out.push_back("mfcc_d1_" + two_digits(c));
    for (std::size_t c = 0; c < kNumMfcc; ++c) out.push_back("mfcc_d2_" + two_digits(c));
}

// Shared FIR kernels; extraction may run on several threads.
const FirKernel& highpass_kernel(int sample_rate) {
    static std::mutex mutex;
    static std::map<int, FirKernel> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(sample_rate);
    if (it == cache.end())
        it = cache.emplace(sample_rate,
                           design_highpass(kHighpassCutoffHz, sample_rate, kHighpassTaps)).first;
    return it->second;
}

}  // namespace

FeatureSet feature_set_from_string(const std::string& s) {
    if (s == "Indices" || s == "indices") return FeatureSet::indices;
    if (s == "FreqIndices" || s == "freq-indices") return FeatureSet::freq_indices;
    if (s == "MFCCs" || s == "mfccs") return FeatureSet::mfccs;
    if (s == "MFCCsNoDelta" || s == "mfccs-no-delta") return FeatureSet::mfccs_no_delta;
    if (s == "All" || s == "all") return FeatureSet::all;
    if (s == "AllNoDelta" || s == "all-no-delta") return FeatureSet::all_no_delta;
    if (s == "CFSSubset" || s == "cfs-subset") return FeatureSet::cfs_subset;
    throw std::invalid_argument("unknown feature set '" + s + "'");
}

std::string to_string(FeatureSet set) {
    switch (set) {
        case FeatureSet::indices: return "Indices";
        case FeatureSet::freq_indices: return "FreqIndices";
        case FeatureSet::mfccs: return "MFCCs";
        case FeatureSet::mfccs_no_delta: return "MFCCsNoDelta";
        case FeatureSet::all: return "All";
        case FeatureSet::all_no_delta: return "AllNoDelta";
        case FeatureSet::cfs_subset: return "CFSSubset";
    }
    throw std::invalid_argument("unknown feature set");
}

std::vector<std::string> feature_names(FeatureSet set, bool highpass) {
    std::vector<std::string> out;
    switch (set) {
        case FeatureSet::indices:
            out = {"h_t",  "h_f",  "bgn",  "bgn_std", "aci",     "psd",
                   "snr",  "isnr", "ssnr", "cvr_low", "cvr_med"};
            return out;
        case FeatureSet::freq_indices:
        case FeatureSet::all:
        case FeatureSet::all_no_delta: {
            out = {"h_t", "h_f", "bgn", "bgn_std"};
            for (const auto& band : active_bands(highpass))
                for (const auto& idx : per_band_index_names())
                    out.push_back(idx + "_" + band.name);
            if (!highpass) {
                // Bedoya's 600-1200 Hz rain band; straddles the 1 kHz cutoff
                // so it vanishes when high-passed
                const auto rb = rain_band().name;
                for (const auto& idx : {"psd", "snr", "isnr", "ssnr"})
                    out.push_back(std::string(idx) + "_" + rb);
            }
            if (set == FeatureSet::all) append_mfcc_names(out, true);
            if (set == FeatureSet::all_no_delta) append_mfcc_names(out, false);
            return out;
        }
        case FeatureSet::mfccs:
            append_mfcc_names(out, true);
            return out;
        case FeatureSet::mfccs_no_delta:
            append_mfcc_names(out, false);
            return out;
        case FeatureSet::cfs_subset:
            throw std::invalid_argument(
                "CFSSubset has no fixed feature list; train a model to resolve it");
    }
    throw std::invalid_argument("unknown feature set");
}

AudioBuffer preprocess(const AudioBuffer& buf, const Preprocess& pre) {
    AudioBuffer out = buf;
    if (pre.highpass) out = apply_fir(out, highpass_kernel(out.sample_rate));
    if (pre.mmse) out = mmse_stsa(out);
    return out;
}

FeatureVector extract_features(const Segment& seg, FeatureSet set, const Preprocess& pre) {
    if (set == FeatureSet::cfs_subset)
        throw std::invalid_argument(
            "CFSSubset has no fixed feature list; train a model to resolve it");
    if (seg.audio.sample_rate != kCanonicalRate || seg.audio.samples.size() != kSegmentSamples)
        throw std::invalid_argument("extract_features: segment is not canonical (22.05 kHz, 10 s)");

    const AudioBuffer audio = preprocess(seg.audio, pre);

    FeatureVector fv;
    fv.names = feature_names(set, pre.highpass);
    fv.values.reserve(fv.names.size());
    auto emit = [&fv](double v) { fv.values.push_back(v); };

    const bool wants_indices = set == FeatureSet::indices || set == FeatureSet::freq_indices ||
                               set == FeatureSet::all || set == FeatureSet::all_no_delta;
    if (wants_indices) {
        const auto spec = stft(audio);
        const auto envelope = analytic_envelope(audio);
        const auto noise = background_noise(envelope);
        const auto full = full_band(audio.sample_rate);

        emit(temporal_entropy(envelope));
        emit(spectral_entropy(spec, full));
        emit(noise.bgn);
        emit(noise.std_dev);

        if (set == FeatureSet::indices) {
            emit(aci(spec, full));
            emit(psd(spec, full));
            emit(snr_spectral(spec, full));
            emit(isnr(spec));
            emit(ssnr(spec));
            emit(spectral_cover(spec, full, kCoverLowThreshold));
            emit(spectral_cover(spec, full, kCoverMedThreshold));
        } else {
            for (const auto& band : active_bands(pre.highpass)) {
                emit(aci(spec, band));
                emit(spectral_entropy(spec, band));
                emit(snr_spectral(spec, band));
                emit(isnr(spec, band));
                emit(ssnr(spec, band));
                emit(psd(spec, band));
                emit(spectral_cover(spec, band, kCoverLowThreshold));
                emit(spectral_cover(spec, band, kCoverMedThreshold));
            }
            if (!pre.highpass) {
                const auto rb = rain_band();
                emit(psd(spec, rb));
                emit(snr_spectral(spec, rb));
                emit(isnr(spec, rb));
                emit(ssnr(spec, rb));
            }
        }
    }

    const bool wants_mfcc = set == FeatureSet::mfccs || set == FeatureSet::mfccs_no_delta ||
                            set == FeatureSet::all || set == FeatureSet::all_no_delta;
    if (wants_mfcc) {
        const double fmin = pre.highpass ? kHighpassCutoffHz : 0.0;
        const auto m = mfcc(audio, fmin, audio.sample_rate / 2.0);
        const bool deltas = set == FeatureSet::mfccs || set == FeatureSet::all;
        auto emit_means = [&](const std::vector<std::vector<double>>& mat) {
            for (std::size_t c = 0; c < kNumMfcc; ++c) {
                double acc = 0.0;
                for (const auto& row : mat) acc += row[c];
                emit(acc / static_cast<double>(mat.size()));
            }
        };
        emit_means(m.coeffs);
        if (deltas) {
            emit_means(m.delta1);
            emit_means(m.delta2);
        }
    }

    if (fv.values.size() != fv.names.size())
        throw std::logic_error("extract_features: name/value count mismatch");
    return fv;
}

}  // namespace ng

#include "noisegate/indices.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ng {
namespace {

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd r;
    if (v.empty()) return r;
    for (double x : v) r.mean += x;
    r.mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - r.mean) * (x - r.mean);
    r.stddev = std::sqrt(acc / static_cast<double>(v.size()));
    return r;
}

std::vector<double> frame_intensities(const Spectrogram& spec, const std::vector<std::size_t>& bins) {
    std::vector<double> out(spec.frames(), 0.0);
    for (std::size_t f = 0; f < spec.frames(); ++f) {
        double acc = 0.0;
        for (std::size_t b : bins) acc += spec.mags[f][b];
        out[f] = acc;
    }
    return out;
}

// coefficient of variation; zero-mean input maps to 0
double intensity_cv(const std::vector<double>& intensities) {
    const auto ms = mean_std(intensities);
    if (ms.mean <= 0.0) return 0.0;
    return ms.stddev / ms.mean;
}

std::vector<std::size_t> checked_bins(const Spectrogram& spec, const BandSpec& band,
                                      const char* op) {
    auto bins = band_bins(spec, band);
    if (bins.empty())
        throw std::invalid_argument(std::string(op) + ": band '" + band.name + "' selects no bins");
    return bins;
}

}  // namespace

const std::vector<BandSpec>& canonical_bands() {
    static const std::vector<BandSpec> bands = {
        {0.0, 500.0, "0_500"},      {500.0, 1000.0, "500_1k"}, {1000.0, 3000.0, "1k_3k"},
        {3000.0, 5000.0, "3k_5k"},  {5000.0, 7000.0, "5k_7k"}, {7000.0, 9000.0, "7k_9k"},
        {9000.0, 11025.0, "9k_11k"},
    };
    return bands;
}

std::vector<BandSpec> active_bands(bool highpassed) {
    const auto& all = canonical_bands();
    if (!highpassed) return all;
    std::vector<BandSpec> out;
    for (const auto& b : all)
        if (b.low_hz >= 1000.0) out.push_back(b);
    return out;
}

BandSpec full_band(int sample_rate) {
    return {0.0, sample_rate / 2.0, "full"};
}

BandSpec rain_band() {
    return {600.0, 1200.0, "rain"};
}

std::vector<std::size_t> band_bins(const Spectrogram& spec, const BandSpec& band) {
    const double nyquist = spec.sample_rate / 2.0;
    const double bh = spec.bin_hz();
    std::vector<std::size_t> out;
    for (std::size_t b = 0; b < spec.bins(); ++b) {
        const double center = static_cast<double>(b) * bh;
        // half-open [low, high), except a band that reaches Nyquist keeps the
        // Nyquist bin so the canonical bands tile the whole spectrum
        const bool in = center >= band.low_hz &&
                        (center < band.high_hz || (band.high_hz >= nyquist && center <= nyquist));
        if (in) out.push_back(b);
    }
    return out;
}

double temporal_entropy(const std::vector<double>& envelope) {
    if (envelope.empty()) throw std::invalid_argument("temporal_entropy: empty envelope");
    const std::size_t n = envelope.size();
    double total = 0.0;
    for (double v : envelope) total += std::fabs(v);
    if (total <= 0.0 || n == 1) return 1.0;  // degenerate: flat by convention
    double h = 0.0;
    for (double v : envelope) {
        const double a = std::fabs(v) / total;
        if (a > 0.0) h -= a * std::log(a);
    }
    return h / std::log(static_cast<double>(n));
}

double spectral_entropy(const Spectrogram& spec, const BandSpec& band) {
    const auto bins = checked_bins(spec, band, "spectral_entropy");
    if (spec.frames() == 0) throw std::invalid_argument("spectral_entropy: empty spectrogram");
    if (bins.size() == 1) return 1.0;
    const double log_n = std::log(static_cast<double>(bins.size()));
    double acc = 0.0;
    for (std::size_t f = 0; f < spec.frames(); ++f) {
        double total = 0.0;
        for (std::size_t b : bins) total += spec.mags[f][b];
        if (total <= 0.0) {
            acc += 1.0;  // silent frame: flat by convention
            continue;
        }
        double h = 0.0;
        for (std::size_t b : bins) {
            const double p = spec.mags[f][b] / total;
            if (p > 0.0) h -= p * std::log(p);
        }
        acc += h / log_n;
    }
    return acc / static_cast<double>(spec.frames());
}

BackgroundNoiseEstimate background_noise(const std::vector<double>& envelope) {
    if (envelope.empty()) throw std::invalid_argument("background_noise: empty envelope");
    BackgroundNoiseEstimate est;
    double peak = 0.0;
    for (double v : envelope) peak = std::max(peak, std::fabs(v));
    const auto ms = mean_std(envelope);
    est.std_dev = ms.stddev;
    if (peak <= 0.0) return est;  // silence: all zeros

    constexpr std::size_t kBins = 100;
    std::vector<int> hist(kBins, 0);
    for (double v : envelope) {
        auto cell = static_cast<std::size_t>(std::fabs(v) / peak * kBins);
        if (cell >= kBins) cell = kBins - 1;
        ++hist[cell];
    }
    const std::size_t best =
        static_cast<std::size_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    est.mode = (static_cast<double>(best) + 0.5) / kBins * peak;
    est.bgn = est.mode + est.std_dev;
    return est;
}

double psd(const Spectrogram& spec, const BandSpec& band) {
    const auto bins = checked_bins(spec, band, "psd");
    if (spec.frames() == 0) throw std::invalid_argument("psd: empty spectrogram");
    double acc = 0.0;
    for (std::size_t f = 0; f < spec.frames(); ++f)
        for (std::size_t b : bins) acc += spec.mags[f][b];
    return acc / (static_cast<double>(spec.frames()) * static_cast<double>(bins.size()));
}

double snr_spectral(const Spectrogram& spec, const BandSpec& band) {
    const auto bins = checked_bins(spec, band, "snr_spectral");
    if (bins.size() < 2) throw std::invalid_argument("snr_spectral: need at least 2 in-band bins");
    if (spec.frames() == 0) throw std::invalid_argument("snr_spectral: empty spectrogram");
    std::vector<double> profile(bins.size(), 0.0);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        for (std::size_t f = 0; f < spec.frames(); ++f) profile[i] += spec.mags[f][bins[i]];
        profile[i] /= static_cast<double>(spec.frames());
    }
    const auto ms = mean_std(profile);
    if (ms.stddev <= 0.0) return 1e9;  // perfectly flat profile
    return ms.mean / ms.stddev;
}

double isnr(const Spectrogram& spec) { return isnr(spec, full_band(spec.sample_rate)); }

double isnr(const Spectrogram& spec, const BandSpec& band) {
    const auto bins = checked_bins(spec, band, "isnr");
    if (spec.frames() < 2) throw std::invalid_argument("isnr: need at least 2 frames");
    return intensity_cv(frame_intensities(spec, bins));
}

double ssnr(const Spectrogram& spec) { return ssnr(spec, full_band(spec.sample_rate)); }

double ssnr(const Spectrogram& spec, const BandSpec& band) {
    const auto bins = checked_bins(spec, band, "ssnr");
    const double total_seconds = static_cast<double>(spec.frames()) * spec.frame_seconds();
    if (total_seconds < 0.2) throw std::invalid_argument("ssnr: need at least 0.2 s of frames");
    const auto group =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 / spec.frame_seconds())));
    const auto intensities = frame_intensities(spec, bins);
    double acc = 0.0;
    std::size_t groups = 0;
    for (std::size_t start = 0; start < intensities.size(); start += group) {
        const std::size_t end = std::min(intensities.size(), start + group);
        std::vector<double> slice(intensities.begin() + static_cast<std::ptrdiff_t>(start),
                                  intensities.begin() + static_cast<std::ptrdiff_t>(end));
        acc += intensity_cv(slice);
        ++groups;
    }
    return acc / static_cast<double>(groups);
}

double aci(const Spectrogram& spec, const BandSpec& band) {
    const auto bins = checked_bins(spec, band, "aci");
    if (spec.frames() < 2) throw std::invalid_argument("aci: need at least 2 frames");
    double acc = 0.0;
    for (std::size_t b : bins) {
        double num = 0.0, den = 0.0;
        for (std::size_t f = 0; f < spec.frames(); ++f) {
            den += spec.mags[f][b];
            if (f > 0) num += std::fabs(spec.mags[f][b] - spec.mags[f - 1][b]);
        }
        if (den > 0.0) acc += num / den;
    }
    return acc / static_cast<double>(bins.size());
}

double spectral_cover(const Spectrogram& spec, const BandSpec& band, double threshold) {
    const auto bins = checked_bins(spec, band, "spectral_cover");
    if (spec.frames() == 0) throw std::invalid_argument("spectral_cover: empty spectrogram");
    std::size_t over = 0;
    for (std::size_t f = 0; f < spec.frames(); ++f)
        for (std::size_t b : bins)
            if (spec.mags[f][b] > threshold) ++over;
    return static_cast<double>(over) /
           (static_cast<double>(spec.frames()) * static_cast<double>(bins.size()));
}

}  // namespace ng

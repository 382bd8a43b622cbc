#include "noisegate/mfcc.hpp"

#include <cmath>
#include <stdexcept>

#include "noisegate/dsp.hpp"

namespace ng {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLogFloor = 1e-10;

// Orthonormal DCT-II, N = kNumMfcc.
std::vector<double> dct2(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += x[j] * std::cos(kPi * (2.0 * static_cast<double>(j) + 1.0) *
                                   static_cast<double>(k) / (2.0 * static_cast<double>(n)));
        const double scale = k == 0 ? std::sqrt(1.0 / static_cast<double>(n))
                                    : std::sqrt(2.0 / static_cast<double>(n));
        out[k] = scale * acc;
    }
    return out;
}

}  // namespace

double mel_from_hz(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double hz_from_mel(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<std::vector<double>> frame_deltas(const std::vector<std::vector<double>>& m) {
    const std::size_t frames = m.size();
    std::vector<std::vector<double>> out(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        const auto& next = m[f + 1 < frames ? f + 1 : frames - 1];
        const auto& prev = m[f > 0 ? f - 1 : 0];
        out[f].resize(m[f].size());
        for (std::size_t c = 0; c < m[f].size(); ++c) out[f][c] = next[c] - prev[c];
    }
    return out;
}

MfccMatrix mfcc(const AudioBuffer& buf, double fmin_hz, double fmax_hz,
                std::size_t window_len, std::size_t hop) {
    const double nyquist = buf.sample_rate / 2.0;
    if (!(0.0 <= fmin_hz && fmin_hz < fmax_hz && fmax_hz <= nyquist))
        throw std::invalid_argument("mfcc: need 0 <= fmin < fmax <= nyquist");

    const auto spec = stft(buf, window_len, hop);
    const std::size_t bins = spec.bins();
    const double bin_hz = spec.bin_hz();

    // 33 triangular filters on a uniform mel grid over [fmin, fmax]
    const std::size_t n_filters = kNumMfcc;
    std::vector<double> edges(n_filters + 2);
    const double mel_lo = mel_from_hz(fmin_hz);
    const double mel_hi = mel_from_hz(fmax_hz);
    for (std::size_t i = 0; i < edges.size(); ++i)
        edges[i] = hz_from_mel(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                            static_cast<double>(n_filters + 1));

    std::vector<std::vector<std::pair<std::size_t, double>>> filters(n_filters);
    for (std::size_t i = 0; i < n_filters; ++i) {
        const double lo = edges[i], mid = edges[i + 1], hi = edges[i + 2];
        for (std::size_t b = 0; b < bins; ++b) {
            const double f = static_cast<double>(b) * bin_hz;
            double w = 0.0;
            if (f > lo && f < mid)
                w = (f - lo) / (mid - lo);
            else if (f == mid)
                w = 1.0;
            else if (f > mid && f < hi)
                w = (hi - f) / (hi - mid);
            if (w > 0.0) filters[i].emplace_back(b, w);
        }
    }

    MfccMatrix out;
    out.coeffs.reserve(spec.frames());
    std::vector<double> log_energy(n_filters);
    for (std::size_t f = 0; f < spec.frames(); ++f) {
        for (std::size_t i = 0; i < n_filters; ++i) {
            double e = 0.0;
            for (const auto& [b, w] : filters[i]) e += w * spec.mags[f][b] * spec.mags[f][b];
            log_energy[i] = std::log(std::max(e, kLogFloor));
        }
        out.coeffs.push_back(dct2(log_energy));
    }
    out.delta1 = frame_deltas(out.coeffs);
    out.delta2 = frame_deltas(out.delta1);
    return out;
}

}  // namespace ng

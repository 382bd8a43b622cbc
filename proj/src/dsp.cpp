#include "noisegate/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "noisegate/fft.hpp"

namespace ng {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> hann_periodic(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
    return w;
}

double sinc(double x) {
    if (std::fabs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

std::vector<double> blackman(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(n - 1);
        w[i] = 0.42 - 0.5 * std::cos(2.0 * kPi * u) + 0.08 * std::cos(4.0 * kPi * u);
    }
    return w;
}

// Unity-gain Blackman-sinc low-pass, odd length. Computed on one side and
// mirrored so taps[i] == taps[n-1-i] holds bit-exactly (the window's cosine
// terms are not symmetric to the last ulp on their own).
std::vector<double> design_lowpass(double cutoff_hz, int sample_rate, std::size_t taps) {
    const double fc = cutoff_hz / sample_rate;
    const std::size_t m = (taps - 1) / 2;
    const auto w = blackman(taps);
    std::vector<double> h(taps);
    double sum = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        const double d = static_cast<double>(m - i);
        h[i] = 2.0 * fc * sinc(2.0 * fc * d) * w[i];
        h[taps - 1 - i] = h[i];
        sum += i == m ? h[i] : 2.0 * h[i];
    }
    for (auto& v : h) v /= sum;
    return h;
}

void check_fir_args(int sample_rate, std::size_t taps) {
    if (sample_rate <= 0) throw std::invalid_argument("fir: sample rate must be positive");
    if (taps < 3 || taps % 2 == 0) throw std::invalid_argument("fir: taps must be odd and >= 3");
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double bessel_i0(double x) {
    const double half = x / 2.0;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 80; ++k) {
        term *= (half / k) * (half / k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

double bessel_i1(double x) {
    const double half = x / 2.0;
    double term = half, sum = half;
    for (int k = 1; k < 80; ++k) {
        term *= (half * half) / (static_cast<double>(k) * (k + 1.0));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// Short-time amplitude estimator gain (decision-directed flavor). Large v
// collapses to the Wiener gain.
double stsa_gain(double xi, double gamma) {
    if (gamma <= 0.0) return 0.0;
    const double v = xi / (1.0 + xi) * gamma;
    if (v < 1e-12) return 0.0;
    if (v > 300.0) return xi / (1.0 + xi);
    const double g = 0.5 * std::sqrt(kPi) * std::sqrt(v) / gamma * std::exp(-0.5 * v) *
                     ((1.0 + v) * bessel_i0(0.5 * v) + v * bessel_i1(0.5 * v));
    return std::min(g, 1.0);
}

}  // namespace

Spectrogram stft(const AudioBuffer& buf, std::size_t window_len, std::size_t hop) {
    if (window_len < 2 || hop == 0) throw std::invalid_argument("stft: bad window/hop");
    if (buf.samples.size() < window_len)
        throw std::invalid_argument("stft: input shorter than one window");
    const auto w = hann_periodic(window_len);
    double wsum = 0.0;
    for (double v : w) wsum += v;
    const double scale = 2.0 / wsum;  // full-scale sine -> ~1.0 at its bin

    const std::size_t frames = (buf.samples.size() - window_len) / hop + 1;
    const std::size_t bins = window_len / 2 + 1;

    Spectrogram spec;
    spec.sample_rate = buf.sample_rate;
    spec.window_len = window_len;
    spec.hop = hop;
    spec.mags.assign(frames, std::vector<double>(bins, 0.0));

    std::vector<std::complex<double>> frame(window_len);
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t start = f * hop;
        for (std::size_t i = 0; i < window_len; ++i)
            frame[i] = {buf.samples[start + i] * w[i], 0.0};
        auto spectrum = fft::forward(frame);
        for (std::size_t b = 0; b < bins; ++b) spec.mags[f][b] = std::abs(spectrum[b]) * scale;
    }
    return spec;
}

std::vector<double> analytic_envelope(const AudioBuffer& buf) {
    const std::size_t n = buf.samples.size();
    if (n < 2) throw std::invalid_argument("analytic_envelope: input too short");
    auto spectrum = fft::forward_real(buf.samples);
    // keep DC (and Nyquist when even), double positive bins, drop the rest
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) spectrum[k] *= 2.0;
    for (std::size_t k = n / 2 + 1; k < n; ++k) spectrum[k] = 0.0;
    auto analytic = fft::inverse(spectrum);
    std::vector<double> env(n);
    for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(analytic[i]);
    return env;
}

FirKernel design_highpass(double cutoff_hz, int sample_rate, std::size_t taps) {
    check_fir_args(sample_rate, taps);
    if (cutoff_hz <= 0.0 || cutoff_hz >= sample_rate / 2.0)
        throw std::invalid_argument("design_highpass: cutoff outside (0, nyquist)");
    auto h = design_lowpass(cutoff_hz, sample_rate, taps);
    for (auto& v : h) v = -v;  // spectral inversion
    h[(taps - 1) / 2] += 1.0;
    return h;
}

FirKernel design_bandstop(double low_hz, double high_hz, int sample_rate, std::size_t taps) {
    check_fir_args(sample_rate, taps);
    const double nyquist = sample_rate / 2.0;
    if (!(0.0 < low_hz && low_hz < high_hz && high_hz < nyquist))
        throw std::invalid_argument("design_bandstop: need 0 < low < high < nyquist");
    auto lp = design_lowpass(low_hz, sample_rate, taps);
    auto hp = design_highpass(high_hz, sample_rate, taps);
    for (std::size_t i = 0; i < taps; ++i) lp[i] += hp[i];
    return lp;
}

double fir_transition_hz(std::size_t taps, int sample_rate) {
    return 5.5 * static_cast<double>(sample_rate) / static_cast<double>(taps);
}

AudioBuffer apply_fir(const AudioBuffer& buf, const FirKernel& kernel) {
    if (kernel.empty() || kernel.size() % 2 == 0)
        throw std::invalid_argument("apply_fir: kernel must have odd length");
    const std::size_t n = buf.samples.size();
    if (n == 0) return buf;

    const std::size_t m = next_pow2(n + kernel.size());
    std::vector<std::complex<double>> fx(m), fh(m);
    for (std::size_t i = 0; i < n; ++i) fx[i] = {buf.samples[i], 0.0};
    for (std::size_t i = 0; i < kernel.size(); ++i) fh[i] = {kernel[i], 0.0};
    auto X = fft::forward(fx);
    auto H = fft::forward(fh);
    for (std::size_t i = 0; i < m; ++i) X[i] *= H[i];
    auto y = fft::inverse(X);

    const std::size_t delay = (kernel.size() - 1) / 2;
    AudioBuffer out;
    out.sample_rate = buf.sample_rate;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = y[i + delay].real();
    return out;
}

AudioBuffer mmse_stsa(const AudioBuffer& buf, std::size_t window_len, std::size_t hop) {
    if (window_len < 4 || hop == 0 || hop > window_len)
        throw std::invalid_argument("mmse_stsa: bad window/hop");
    if (buf.duration() < 1.0)
        throw std::invalid_argument("mmse_stsa: need at least 1 s of audio");

    const std::size_t n = buf.samples.size();
    const auto w = hann_periodic(window_len);
    const std::size_t bins = window_len / 2 + 1;

    // Zero-pad one window on each side so every real sample gets full
    // overlap-add coverage (periodic Hann at 50% overlap sums to one). This
    // avoids dividing by a vanishing window weight at the edges, where the
    // quotient would amplify the spectral leakage the gains introduce.
    const std::size_t pad = window_len;
    const std::size_t padded = n + 2 * pad;
    const std::size_t frames = (padded - window_len) / hop + 1;

    // Pass 1: complex spectra of every frame (padded coordinates).
    std::vector<std::vector<std::complex<double>>> spectra(frames);
    std::vector<std::complex<double>> frame(window_len);
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t start = f * hop;
        for (std::size_t i = 0; i < window_len; ++i) {
            const std::size_t idx = start + i;
            const double s = (idx >= pad && idx < pad + n) ? buf.samples[idx - pad] : 0.0;
            frame[i] = {s * w[i], 0.0};
        }
        spectra[f] = fft::forward(frame);
    }

    // Noise floor per bin: histogram mode of the magnitude track, on the
    // Rayleigh assumption mode^2 is half the noise power. Only frames fully
    // inside the real signal count, so the zero padding cannot pull the mode
    // toward silence.
    std::vector<std::size_t> interior;
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t start = f * hop;
        if (start >= pad && start + window_len <= pad + n) interior.push_back(f);
    }
    std::vector<double> lambda(bins, 0.0);
    std::vector<int> hist(100);
    for (std::size_t b = 0; b < bins; ++b) {
        double peak = 0.0;
        for (std::size_t f : interior) peak = std::max(peak, std::abs(spectra[f][b]));
        if (peak <= 0.0) {
            lambda[b] = 1e-20;
            continue;
        }
        std::fill(hist.begin(), hist.end(), 0);
        for (std::size_t f : interior) {
            auto cell = static_cast<std::size_t>(std::abs(spectra[f][b]) / peak * 100.0);
            if (cell >= 100) cell = 99;
            ++hist[cell];
        }
        const std::size_t best =
            static_cast<std::size_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
        const double mode = (static_cast<double>(best) + 0.5) / 100.0 * peak;
        lambda[b] = std::max(2.0 * mode * mode, 1e-20);
    }

    // Pass 2: per-bin gains with decision-directed a-priori SNR.
    constexpr double kAlpha = 0.98;
    constexpr double kXiFloor = 1e-6;
    std::vector<double> prev_a2(bins, 0.0);  // squared amplitude estimate of the previous frame
    std::vector<double> out(padded, 0.0);
    std::vector<double> gain(bins);

    for (std::size_t f = 0; f < frames; ++f) {
        auto& spec = spectra[f];
        for (std::size_t b = 0; b < bins; ++b) {
            const double mag2 = std::norm(spec[b]);
            const double gamma = mag2 / lambda[b];
            const double xi =
                std::max(kAlpha * prev_a2[b] / lambda[b] + (1.0 - kAlpha) * std::max(gamma - 1.0, 0.0),
                         kXiFloor);
            const double g = stsa_gain(xi, gamma);
            gain[b] = g;
            const double a = g * std::sqrt(mag2);
            prev_a2[b] = a * a;
        }
        for (std::size_t b = 0; b < window_len; ++b) {
            const std::size_t mirror = b < bins ? b : window_len - b;
            spec[b] *= gain[mirror];
        }
        auto synth = fft::inverse(spec);
        const std::size_t start = f * hop;
        for (std::size_t i = 0; i < window_len; ++i) out[start + i] += synth[i].real();
    }

    // Constant per-phase overlap-add gain of the analysis window (1.0 for the
    // default half-window hop).
    std::vector<double> cover(hop, 0.0);
    for (std::size_t i = 0; i < window_len; ++i) cover[i % hop] += w[i];

    AudioBuffer result;
    result.sample_rate = buf.sample_rate;
    result.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = cover[(pad + i) % hop];
        result.samples[i] = c > 1e-8 ? out[pad + i] / c : 0.0;
    }
    return result;
}

}  // namespace ng

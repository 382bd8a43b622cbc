#include "noisegate/synth.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "noisegate/fft.hpp"
#include "noisegate/rng.hpp"

namespace ng {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPeakLimit = 4.0;

double db_to_amp(double db) { return std::pow(10.0, db / 20.0); }

// Fixed sub-stream ids: optional components never disturb each other's draws.
enum Stream : std::uint64_t { kFloor = 1, kRain = 2, kChorus = 3, kChirps = 4 };

void add_noise_floor(std::vector<double>& x, double level_db, Rng& rng) {
    const double sigma = db_to_amp(level_db);
    for (auto& v : x) v += sigma * rng.normal();
}

void add_rain(std::vector<double>& x, const RainSpec& spec, double duration, int rate, Rng& rng) {
    const double bed = db_to_amp(spec.level_db);
    for (auto& v : x) v += bed * rng.normal();

    // Poisson-timed droplet clicks: short bounded-noise bursts with a fast
    // decay, a few dB above the bed
    double t = rng.exponential(spec.drops_per_second);
    while (t < duration) {
        const double len_s = rng.uniform(0.002, 0.005);
        const double amp = bed * db_to_amp(rng.uniform(6.0, 12.0));
        const auto start = static_cast<std::size_t>(t * rate);
        const auto len = static_cast<std::size_t>(len_s * rate);
        for (std::size_t i = 0; i < len && start + i < x.size(); ++i) {
            const double env = std::exp(-3.0 * static_cast<double>(i) / static_cast<double>(len));
            x[start + i] += amp * rng.uniform(-1.0, 1.0) * env;
        }
        t += rng.exponential(spec.drops_per_second);
    }
}

void add_chorus(std::vector<double>& x, const ChorusSpec& spec, int rate, Rng& rng) {
    const std::size_t n = x.size();
    const double lo = spec.center_hz - spec.bandwidth_hz / 2.0;
    const double hi = spec.center_hz + spec.bandwidth_hz / 2.0;
    if (lo <= 0.0 || hi >= rate / 2.0)
        throw std::invalid_argument("gen_scene: chorus band outside (0, nyquist)");

    // band-limited noise synthesized in the frequency domain
    std::vector<std::complex<double>> spectrum(n, {0.0, 0.0});
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) {
        const double f = static_cast<double>(k) * rate / static_cast<double>(n);
        if (f < lo || f > hi) continue;
        const std::complex<double> c{rng.normal(), rng.normal()};
        spectrum[k] = c;
        spectrum[n - k] = std::conj(c);
    }
    auto wave = fft::inverse(spectrum);

    double rms = 0.0;
    for (std::size_t i = 0; i < n; ++i) rms += wave[i].real() * wave[i].real();
    rms = std::sqrt(rms / static_cast<double>(n));
    if (rms <= 0.0) throw std::invalid_argument("gen_scene: chorus band selects no bins");

    // slow +/-2 dB amplitude wobble
    const double am_rate = rng.uniform(0.2, 0.6);
    const double am_phase = rng.uniform(0.0, 2.0 * kPi);
    const double level = db_to_amp(spec.level_db);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        const double wobble = db_to_amp(2.0 * std::sin(2.0 * kPi * am_rate * t + am_phase));
        x[i] += wave[i].real() / rms * level * wobble;
    }
}

void add_chirps(std::vector<double>& x, const ChirpSpec& spec, double duration, int rate, Rng& rng) {
    if (!(0.0 < spec.low_hz && spec.low_hz < spec.high_hz && spec.high_hz < rate / 2.0))
        throw std::invalid_argument("gen_scene: chirp range outside (0, nyquist)");
    const double amp = db_to_amp(spec.level_db);
    for (int c = 0; c < spec.count; ++c) {
        const double len = rng.uniform(0.4, 1.2);
        const double t0 = rng.uniform(0.0, std::max(0.0, duration - len));
        const double f0 = rng.uniform(spec.low_hz, spec.high_hz);
        const double f1 = rng.uniform(spec.low_hz, spec.high_hz);
        const auto start = static_cast<std::size_t>(t0 * rate);
        const auto samples = static_cast<std::size_t>(len * rate);
        double phase = rng.uniform(0.0, 2.0 * kPi);
        for (std::size_t i = 0; i < samples && start + i < x.size(); ++i) {
            const double u = static_cast<double>(i) / static_cast<double>(samples);
            const double f = f0 + (f1 - f0) * u;
            phase += 2.0 * kPi * f / rate;
            const double env = 0.5 * (1.0 - std::cos(2.0 * kPi * u));  // Hann-shaped
            x[start + i] += amp * env * std::sin(phase);
        }
    }
}

}  // namespace

Scene gen_scene(const SceneSpec& spec) {
    if (spec.duration <= 0.0) throw std::invalid_argument("gen_scene: duration must be positive");
    const int rate = kCanonicalRate;
    const auto n = static_cast<std::size_t>(std::llround(spec.duration * rate));

    std::vector<double> x(n, 0.0);
    {
        Rng rng(Rng::derive(spec.seed, kFloor));
        add_noise_floor(x, spec.noise_floor_db, rng);
    }
    if (spec.rain) {
        Rng rng(Rng::derive(spec.seed, kRain));
        add_rain(x, *spec.rain, spec.duration, rate, rng);
    }
    if (spec.chorus) {
        Rng rng(Rng::derive(spec.seed, kChorus));
        add_chorus(x, *spec.chorus, rate, rng);
    }
    if (spec.chirps) {
        Rng rng(Rng::derive(spec.seed, kChirps));
        add_chirps(x, *spec.chirps, spec.duration, rate, rng);
    }

    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::fabs(v));
    if (peak > kPeakLimit)
        throw std::runtime_error("gen_scene: mix peak " + std::to_string(peak) +
                                 " exceeds the pre-clip limit; lower the component levels");

    Scene scene;
    scene.spec = spec;
    scene.audio.sample_rate = rate;
    scene.audio.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) scene.audio.samples[i] = std::tanh(x[i]);

    // label rules on nominal levels: rain counts only when it dominates the
    // loudest chirp
    scene.labels.cicada = spec.chorus.has_value();
    scene.labels.rain =
        spec.rain && (!spec.chirps || spec.rain->level_db > spec.chirps->level_db);
    return scene;
}

std::vector<Scene> gen_corpus(const CorpusSpec& spec) {
    if (spec.n == 0) throw std::invalid_argument("gen_corpus: n must be positive");
    if (spec.rain_fraction < 0.0 || spec.cicada_fraction < 0.0 ||
        spec.rain_fraction + spec.cicada_fraction > 1.0)
        throw std::invalid_argument("gen_corpus: fractions must be non-negative and sum to <= 1");

    const auto n_rain = static_cast<std::size_t>(
        std::llround(static_cast<double>(spec.n) * spec.rain_fraction));
    const auto n_cicada = static_cast<std::size_t>(
        std::llround(static_cast<double>(spec.n) * spec.cicada_fraction));

    std::vector<Scene> scenes;
    scenes.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        Rng rng(Rng::derive(spec.seed, 0x10000ULL + i));  // parameter draws
        SceneSpec s;
        s.seed = Rng::derive(spec.seed, i);
        s.noise_floor_db = rng.uniform(-58.0, -45.0);

        ChirpSpec chirps;
        chirps.low_hz = 2000.0;
        chirps.high_hz = 6000.0;
        chirps.count = 1 + static_cast<int>(rng.below(4));
        chirps.level_db = rng.uniform(-26.0, -20.0);
        s.chirps = chirps;

        if (i < n_rain) {
            RainSpec rain;
            rain.level_db = chirps.level_db + rng.uniform(4.0, 12.0);
            rain.drops_per_second = rng.uniform(150.0, 400.0);
            s.rain = rain;
        } else if (i < n_rain + n_cicada) {
            ChorusSpec chorus;
            chorus.center_hz = rng.uniform(1200.0, 6000.0);
            chorus.bandwidth_hz = rng.uniform(200.0, 800.0);
            chorus.level_db = rng.uniform(-24.0, -16.0);
            s.chorus = chorus;
        } else if (rng.uniform() < 0.5) {
            // hard negative: loud chirps over prominent rain, so the rain bed
            // alone overlaps the positive range and absolute level cannot
            // decide the label
            chirps.level_db = rng.uniform(-16.0, -10.0);
            s.chirps = chirps;
            RainSpec rain;
            rain.level_db = chirps.level_db - rng.uniform(2.0, 10.0);
            rain.drops_per_second = rng.uniform(100.0, 300.0);
            s.rain = rain;
        }
        scenes.push_back(gen_scene(s));
    }
    return scenes;
}

}  // namespace ng

#include <cmath>
#include <vector>

#include "doctest.h"
#include "noisegate/mfcc.hpp"
#include "noisegate/rng.hpp"

using namespace ng;

namespace {

AudioBuffer noise_buffer(double amp, double seconds, std::uint64_t seed) {
    AudioBuffer buf;
    buf.sample_rate = 22050;
    buf.samples.resize(static_cast<std::size_t>(seconds * 22050));
    Rng rng(seed);
    for (auto& v : buf.samples) v = amp * rng.uniform(-1.0, 1.0);
    return buf;
}

}  // namespace

TEST_CASE("mel scale fixed points") {
    CHECK(mel_from_hz(0.0) == doctest::Approx(0.0));
    CHECK(mel_from_hz(700.0) == doctest::Approx(2595.0 * std::log10(2.0)));
    CHECK(mel_from_hz(700.0) == doctest::Approx(781.17).epsilon(1e-4));
}

TEST_CASE("mel scale agrees with the natural-log variant within 0.1 mel") {
    // 2595 log10(1 + f/700) vs 1127 ln(1 + f/700): 2595/ln(10) = 1127.0105
    double worst = 0.0;
    for (int f = 0; f <= 11025; f += 3) {
        const double a = mel_from_hz(static_cast<double>(f));
        const double b = 1127.0 * std::log(1.0 + static_cast<double>(f) / 700.0);
        worst = std::max(worst, std::fabs(a - b));
    }
    CHECK(worst < 0.1);
}

TEST_CASE("mel and hz conversions round trip") {
    for (double f : {0.0, 100.0, 1000.0, 4000.0, 11025.0})
        CHECK(hz_from_mel(mel_from_hz(f)) == doctest::Approx(f).epsilon(1e-10));
}

TEST_CASE("frame deltas are central differences with replicated endpoints") {
    const std::vector<std::vector<double>> m{{1.0}, {2.0}, {4.0}};
    const auto d = frame_deltas(m);
    REQUIRE(d.size() == 3);
    CHECK(d[0][0] == doctest::Approx(2.0 - 1.0));  // left endpoint replicated
    CHECK(d[1][0] == doctest::Approx(4.0 - 1.0));  // the Eq-style difference of neighbors
    CHECK(d[2][0] == doctest::Approx(4.0 - 2.0));  // right endpoint replicated
}

TEST_CASE("mfcc of silence is the dct of the log floor") {
    AudioBuffer buf;
    buf.sample_rate = 22050;
    buf.samples.assign(22050, 0.0);
    const auto m = mfcc(buf, 0.0, 11025.0);
    REQUIRE(!m.coeffs.empty());
    for (const auto& frame : m.coeffs) {
        REQUIRE(frame.size() == kNumMfcc);
        // c0 = sqrt(33) * ln(1e-10); the rest vanish for a constant input
        CHECK(frame[0] == doctest::Approx(std::sqrt(33.0) * std::log(1e-10)).epsilon(1e-9));
        for (std::size_t c = 1; c < frame.size(); ++c)
            CHECK(std::fabs(frame[c]) < 1e-9);
    }
}

TEST_CASE("mfcc deltas vanish for a stationary signal") {
    // identical frames: a constant DC offset keeps every window the same
    AudioBuffer buf;
    buf.sample_rate = 22050;
    buf.samples.assign(22050, 0.25);
    const auto m = mfcc(buf, 0.0, 11025.0);
    for (const auto& frame : m.delta1)
        for (double v : frame) CHECK(std::fabs(v) < 1e-9);
    for (const auto& frame : m.delta2)
        for (double v : frame) CHECK(std::fabs(v) < 1e-9);
}

TEST_CASE("mfcc always yields 33 columns and matching delta shapes") {
    const auto buf = noise_buffer(0.4, 1.0, 3);
    for (auto [lo, hi] : {std::pair<double, double>{0.0, 11025.0}, {1000.0, 11025.0}}) {
        const auto m = mfcc(buf, lo, hi);
        REQUIRE(m.coeffs.size() == m.delta1.size());
        REQUIRE(m.coeffs.size() == m.delta2.size());
        for (std::size_t f = 0; f < m.coeffs.size(); ++f) {
            CHECK(m.coeffs[f].size() == kNumMfcc);
            CHECK(m.delta1[f].size() == kNumMfcc);
            CHECK(m.delta2[f].size() == kNumMfcc);
        }
    }
}

TEST_CASE("mfcc rejects an invalid filter band") {
    const auto buf = noise_buffer(0.4, 1.0, 4);
    CHECK_THROWS(mfcc(buf, 5000.0, 1000.0));
    CHECK_THROWS(mfcc(buf, 0.0, 20000.0));
    CHECK_THROWS(mfcc(buf, -5.0, 11025.0));
}

TEST_CASE("mfcc is deterministic") {
    const auto buf = noise_buffer(0.3, 1.0, 5);
    const auto a = mfcc(buf, 0.0, 11025.0);
    const auto b = mfcc(buf, 0.0, 11025.0);
    REQUIRE(a.coeffs.size() == b.coeffs.size());
    for (std::size_t f = 0; f < a.coeffs.size(); ++f)
        for (std::size_t c = 0; c < kNumMfcc; ++c) {
            CHECK(a.coeffs[f][c] == b.coeffs[f][c]);
            CHECK(a.delta1[f][c] == b.delta1[f][c]);
            CHECK(a.delta2[f][c] == b.delta2[f][c]);
        }
}

TEST_CASE("mfcc responds to spectral content") {
    // distinct tones must produce distinct cepstra
    AudioBuffer low, high;
    low.sample_rate = high.sample_rate = 22050;
    low.samples.resize(22050);
    high.samples.resize(22050);
    for (std::size_t i = 0; i < low.samples.size(); ++i) {
        const double t = static_cast<double>(i) / 22050.0;
        low.samples[i] = 0.6 * std::sin(2.0 * 3.14159265358979323846 * 500.0 * t);
        high.samples[i] = 0.6 * std::sin(2.0 * 3.14159265358979323846 * 6000.0 * t);
    }
    const auto ml = mfcc(low, 0.0, 11025.0);
    const auto mh = mfcc(high, 0.0, 11025.0);
    double dist = 0.0;
    for (std::size_t c = 0; c < kNumMfcc; ++c)
        dist += std::fabs(ml.coeffs[0][c] - mh.coeffs[0][c]);
    CHECK(dist > 1.0);
}

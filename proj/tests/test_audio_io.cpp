#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "noisegate/audio_io.hpp"
#include "noisegate/rng.hpp"

using namespace ng;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void put_u16(std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& s, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// Minimal RIFF/WAVE writer so the reader is tested against independent bytes.
std::string wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                      std::uint16_t bits, const std::string& payload) {
    std::string s;
    s += "RIFF";
    put_u32(s, 36 + static_cast<std::uint32_t>(payload.size()));
    s += "WAVEfmt ";
    put_u32(s, 16);
    put_u16(s, format);
    put_u16(s, channels);
    put_u32(s, rate);
    put_u32(s, rate * channels * bits / 8);
    put_u16(s, static_cast<std::uint16_t>(channels * bits / 8));
    put_u16(s, bits);
    s += "data";
    put_u32(s, static_cast<std::uint32_t>(payload.size()));
    s += payload;
    return s;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string pcm16_payload(const std::vector<std::int16_t>& samples) {
    std::string s;
    for (std::int16_t v : samples) put_u16(s, static_cast<std::uint16_t>(v));
    return s;
}

// Projection amplitude of a sine at freq_hz; exact for whole-cycle windows.
double sine_amplitude(const AudioBuffer& buf, double freq_hz) {
    double re = 0.0, im = 0.0;
    const double w = 2.0 * 3.14159265358979323846 * freq_hz / buf.sample_rate;
    for (std::size_t i = 0; i < buf.samples.size(); ++i) {
        re += buf.samples[i] * std::cos(w * static_cast<double>(i));
        im += buf.samples[i] * std::sin(w * static_cast<double>(i));
    }
    const auto n = static_cast<double>(buf.samples.size());
    return 2.0 * std::sqrt(re * re + im * im) / n;
}

AudioBuffer sine(int rate, double freq_hz, double amp, std::size_t n) {
    AudioBuffer buf;
    buf.sample_rate = rate;
    buf.samples.resize(n);
    const double w = 2.0 * 3.14159265358979323846 * freq_hz / rate;
    for (std::size_t i = 0; i < n; ++i) buf.samples[i] = amp * std::sin(w * static_cast<double>(i));
    return buf;
}

}  // namespace

TEST_CASE("read_wav decodes pcm16 mono with 1/32768 scaling") {
    const auto path = tmp_path("ng_pcm16_mono.wav");
    write_file(path, wav_bytes(1, 1, 22050, 16, pcm16_payload({16384, -16384, 0, 32767})));
    const auto buf = read_wav(path);
    REQUIRE(buf.samples.size() == 4);
    CHECK(buf.sample_rate == 22050);
    CHECK(buf.samples[0] == doctest::Approx(0.5));
    CHECK(buf.samples[1] == doctest::Approx(-0.5));
    CHECK(buf.samples[2] == doctest::Approx(0.0));
    CHECK(buf.samples[3] == doctest::Approx(32767.0 / 32768.0));
}

TEST_CASE("read_wav downmixes stereo by channel mean") {
    const auto path = tmp_path("ng_pcm16_stereo.wav");
    // frames: (8192, 16384) -> 0.375, (-8192, 8192) -> 0
    write_file(path, wav_bytes(1, 2, 44100, 16, pcm16_payload({8192, 16384, -8192, 8192})));
    const auto buf = read_wav(path);
    REQUIRE(buf.samples.size() == 2);
    CHECK(buf.sample_rate == 44100);
    CHECK(buf.samples[0] == doctest::Approx(0.375));
    CHECK(buf.samples[1] == doctest::Approx(0.0));
}

TEST_CASE("read_wav decodes ieee float32") {
    const auto path = tmp_path("ng_float32.wav");
    std::string payload;
    for (float v : {0.25f, -0.75f, 1.0f}) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32(payload, bits);
    }
    write_file(path, wav_bytes(3, 1, 22050, 32, payload));
    const auto buf = read_wav(path);
    REQUIRE(buf.samples.size() == 3);
    CHECK(buf.samples[0] == doctest::Approx(0.25));
    CHECK(buf.samples[1] == doctest::Approx(-0.75));
    CHECK(buf.samples[2] == doctest::Approx(1.0));
}

TEST_CASE("read_wav rejects unsupported codecs and malformed files") {
    const auto mulaw = tmp_path("ng_mulaw.wav");
    write_file(mulaw, wav_bytes(7, 1, 8000, 8, std::string(8, '\0')));
    CHECK_THROWS(read_wav(mulaw));

    const auto garbage = tmp_path("ng_garbage.wav");
    write_file(garbage, "not a riff file at all");
    CHECK_THROWS(read_wav(garbage));

    CHECK_THROWS(read_wav(tmp_path("ng_missing_file.wav")));
}

TEST_CASE("write_wav clips and stores full scale as 32767") {
    const auto path = tmp_path("ng_write_scale.wav");
    AudioBuffer buf;
    buf.sample_rate = 22050;
    buf.samples = {1.0, -1.5, 0.0, 0.5};
    write_wav(path, buf);

    const auto bytes = read_file(path);
    REQUIRE(bytes.size() == 44 + 8);
    auto sample_at = [&](std::size_t i) {
        const auto off = 44 + 2 * i;
        return static_cast<std::int16_t>(static_cast<std::uint8_t>(bytes[off]) |
                                         (static_cast<std::uint8_t>(bytes[off + 1]) << 8));
    };
    CHECK(sample_at(0) == 32767);
    CHECK(sample_at(1) == -32767);
    CHECK(sample_at(2) == 0);
    CHECK(sample_at(3) == 16384);
}

TEST_CASE("wav round trip stays within one pcm16 lsb") {
    const auto path = tmp_path("ng_roundtrip.wav");
    AudioBuffer buf;
    buf.sample_rate = 22050;
    Rng rng(11);
    buf.samples.resize(4096);
    for (auto& v : buf.samples) v = rng.uniform(-1.0, 1.0);
    write_wav(path, buf);
    const auto back = read_wav(path);
    REQUIRE(back.samples.size() == buf.samples.size());
    double max_err = 0.0;
    for (std::size_t i = 0; i < buf.samples.size(); ++i)
        max_err = std::max(max_err, std::fabs(back.samples[i] - buf.samples[i]));
    CHECK(max_err <= 1.0 / 32768.0 + 1e-12);
}

TEST_CASE("resample halves the length exactly for 2:1") {
    AudioBuffer buf;
    buf.sample_rate = 44100;
    buf.samples.assign(441000, 0.0);
    const auto out = resample(buf, 22050);
    CHECK(out.sample_rate == 22050);
    CHECK(out.samples.size() == 220500);
}

TEST_CASE("resample at the same rate is the identity") {
    auto buf = sine(22050, 440.0, 0.3, 2000);
    const auto out = resample(buf, 22050);
    REQUIRE(out.samples.size() == buf.samples.size());
    for (std::size_t i = 0; i < buf.samples.size(); ++i)
        CHECK(out.samples[i] == buf.samples[i]);
}

TEST_CASE("resampled sine keeps its amplitude within half a decibel") {
    const auto src = sine(44100, 1000.0, 0.5, 441000);
    const auto out = resample(src, 22050);
    REQUIRE(out.samples.size() == 220500);
    const double amp = sine_amplitude(out, 1000.0);
    const double db = 20.0 * std::log10(amp / 0.5);
    CHECK(std::fabs(db) < 0.5);
}

TEST_CASE("resample up and back preserves band-limited content within 1 dB") {
    AudioBuffer buf;
    buf.sample_rate = 22050;
    buf.samples.assign(220500, 0.0);
    const double freqs[] = {1000.0, 3000.0, 7000.0};  // all below 0.45 * 22050
    for (double f : freqs) {
        const double w = 2.0 * 3.14159265358979323846 * f / buf.sample_rate;
        for (std::size_t i = 0; i < buf.samples.size(); ++i)
            buf.samples[i] += 0.2 * std::sin(w * static_cast<double>(i));
    }
    const auto up = resample(buf, 44100);
    const auto back = resample(up, 22050);
    REQUIRE(back.samples.size() == buf.samples.size());
    for (double f : freqs) {
        const double before = sine_amplitude(buf, f);
        const double after = sine_amplitude(back, f);
        CHECK(std::fabs(20.0 * std::log10(after / before)) < 1.0);
    }
}

TEST_CASE("segment_audio chunk counts") {
    AudioBuffer buf;
    buf.sample_rate = kCanonicalRate;

    buf.samples.assign(static_cast<std::size_t>(35.0 * kCanonicalRate), 0.1);
    CHECK(segment_audio(buf, "a").size() == 3);

    buf.samples.assign(kSegmentSamples, 0.1);
    CHECK(segment_audio(buf, "b").size() == 1);

    buf.samples.assign(static_cast<std::size_t>(9.9 * kCanonicalRate), 0.1);
    CHECK(segment_audio(buf, "c").empty());
}

TEST_CASE("segments reassemble to a prefix of the input") {
    AudioBuffer buf;
    buf.sample_rate = kCanonicalRate;
    Rng rng(5);
    buf.samples.resize(kSegmentSamples * 2 + 1234);
    for (auto& v : buf.samples) v = rng.uniform(-0.5, 0.5);

    const auto segs = segment_audio(buf, "src.wav");
    REQUIRE(segs.size() == 2);
    std::size_t pos = 0;
    for (std::size_t s = 0; s < segs.size(); ++s) {
        CHECK(segs[s].source == "src.wav");
        CHECK(segs[s].index == s);
        CHECK(segs[s].audio.sample_rate == kCanonicalRate);
        REQUIRE(segs[s].audio.samples.size() == kSegmentSamples);
        for (double v : segs[s].audio.samples) CHECK(v == buf.samples[pos++]);
    }
}

TEST_CASE("segment_audio resamples non-canonical input first") {
    const auto buf = sine(44100, 1000.0, 0.5, 441000);  // 10 s at 44.1 kHz
    const auto segs = segment_audio(buf, "hi-rate");
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].audio.sample_rate == kCanonicalRate);
    CHECK(segs[0].audio.samples.size() == kSegmentSamples);
    const double amp = sine_amplitude(segs[0].audio, 1000.0);
    CHECK(std::fabs(20.0 * std::log10(amp / 0.5)) < 0.5);
}

#include "noisegate/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ng {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what, std::size_t offset) {
    throw std::runtime_error(path + ": " + what + " (byte " + std::to_string(offset) + ")");
}

std::uint32_t read_u32(const std::vector<unsigned char>& d, std::size_t off) {
    return static_cast<std::uint32_t>(d[off]) | (static_cast<std::uint32_t>(d[off + 1]) << 8) |
           (static_cast<std::uint32_t>(d[off + 2]) << 16) |
           (static_cast<std::uint32_t>(d[off + 3]) << 24);
}

std::uint16_t read_u16(const std::vector<unsigned char>& d, std::size_t off) {
    return static_cast<std::uint16_t>(static_cast<std::uint16_t>(d[off]) |
                                      (static_cast<std::uint16_t>(d[off + 1]) << 8));
}

bool tag_is(const std::vector<unsigned char>& d, std::size_t off, const char* tag) {
    return std::memcmp(d.data() + off, tag, 4) == 0;
}

struct FmtChunk {
    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
};

// Modified zeroth-order Bessel function, power series. Good to full double
// precision for the argument range a Kaiser window needs.
double bessel_i0(double x) {
    const double half = x / 2.0;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= (half / k) * (half / k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

double sinc(double x) {
    if (std::fabs(x) < 1e-12) return 1.0;
    const double px = 3.14159265358979323846 * x;
    return std::sin(px) / px;
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    if (data.size() < 12) fail(path, "file too small for a RIFF header", data.size());
    if (!tag_is(data, 0, "RIFF")) fail(path, "missing RIFF tag", 0);
    if (!tag_is(data, 8, "WAVE")) fail(path, "missing WAVE tag", 8);

    FmtChunk fmt;
    bool have_fmt = false;
    std::size_t data_off = 0;
    std::size_t data_len = 0;

    std::size_t off = 12;
    while (off + 8 <= data.size()) {
        const std::size_t chunk_size = read_u32(data, off + 4);
        const std::size_t body = off + 8;
        if (body + chunk_size > data.size())
            fail(path, "chunk overruns file", off);
        if (tag_is(data, off, "fmt ")) {
            if (chunk_size < 16) fail(path, "fmt chunk too small", off);
            fmt.format = read_u16(data, body);
            fmt.channels = read_u16(data, body + 2);
            fmt.sample_rate = read_u32(data, body + 4);
            fmt.bits = read_u16(data, body + 14);
            have_fmt = true;
        } else if (tag_is(data, off, "data")) {
            data_off = body;
            data_len = chunk_size;
        }
        off = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt) fail(path, "missing fmt chunk", data.size());
    if (data_off == 0) fail(path, "missing data chunk", data.size());
    if (fmt.format != 1 && fmt.format != 3)
        fail(path, "unsupported format code " + std::to_string(fmt.format) +
                       " (only PCM and IEEE float)", data_off);
    if (fmt.format == 1 && fmt.bits != 16)
        fail(path, "unsupported PCM bit depth " + std::to_string(fmt.bits), data_off);
    if (fmt.format == 3 && fmt.bits != 32)
        fail(path, "unsupported float bit depth " + std::to_string(fmt.bits), data_off);
    if (fmt.channels != 1 && fmt.channels != 2)
        fail(path, "unsupported channel count " + std::to_string(fmt.channels), data_off);
    if (fmt.sample_rate == 0) fail(path, "zero sample rate", data_off);

    const std::size_t bytes_per = fmt.bits / 8u;
    const std::size_t stride = bytes_per * fmt.channels;
    const std::size_t frames = data_len / stride;

    AudioBuffer buf;
    buf.sample_rate = static_cast<int>(fmt.sample_rate);
    buf.samples.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (unsigned ch = 0; ch < fmt.channels; ++ch) {
            const std::size_t p = data_off + i * stride + ch * bytes_per;
            if (fmt.format == 1) {
                const auto raw = static_cast<std::int16_t>(read_u16(data, p));
                acc += raw / 32768.0;
            } else {
                std::uint32_t bits = read_u32(data, p);
                float f;
                std::memcpy(&f, &bits, sizeof f);
                acc += f;
            }
        }
        buf.samples[i] = acc / fmt.channels;
    }
    return buf;
}

void write_wav(const std::string& path, const AudioBuffer& buf) {
    if (buf.sample_rate <= 0) throw std::invalid_argument(path + ": invalid sample rate");

    const std::uint32_t data_len = static_cast<std::uint32_t>(buf.samples.size() * 2);
    std::vector<unsigned char> out;
    out.reserve(44 + data_len);

    auto put_tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
    auto put_u32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
    };
    auto put_u16 = [&](std::uint16_t v) {
        out.push_back(static_cast<unsigned char>(v & 0xff));
        out.push_back(static_cast<unsigned char>(v >> 8));
    };

    put_tag("RIFF");
    put_u32(36 + data_len);
    put_tag("WAVE");
    put_tag("fmt ");
    put_u32(16);
    put_u16(1);  // PCM
    put_u16(1);  // mono
    put_u32(static_cast<std::uint32_t>(buf.sample_rate));
    put_u32(static_cast<std::uint32_t>(buf.sample_rate) * 2);
    put_u16(2);
    put_u16(16);
    put_tag("data");
    put_u32(data_len);

    for (double x : buf.samples) {
        const double clipped = std::clamp(x, -1.0, 1.0);
        // Full scale maps to +/-32767; the 32768 slope keeps the round-trip
        // against read_wav's 1/32768 within one quantization step.
        const long q = std::clamp(std::lround(clipped * 32768.0), -32767L, 32767L);
        put_u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error(path + ": write failed");
}

AudioBuffer resample(const AudioBuffer& in, int target_rate) {
    if (in.sample_rate <= 0 || target_rate <= 0)
        throw std::invalid_argument("resample: rates must be positive");
    if (in.sample_rate == target_rate) return in;

    const double src = in.sample_rate;
    const double dst = target_rate;
    const double min_rate = std::min(src, dst);

    // -6 dB point at 0.475 x the lower rate: content below 0.45 x min rate
    // stays flat and the transition finishes before the new Nyquist.
    const double cutoff = 0.475 * min_rate / src;           // cycles per input sample
    const std::size_t half_width = std::min<std::size_t>(
        2048, static_cast<std::size_t>(std::ceil(51.0 * src / min_rate)) + 1);

    // Kernel sampled on a fine grid, linearly interpolated at runtime.
    constexpr std::size_t kGrid = 128;
    const std::size_t table_len = half_width * kGrid + 2;
    std::vector<double> table(table_len, 0.0);
    const double i0_beta = bessel_i0(8.0);
    for (std::size_t i = 0; i + 1 < table_len; ++i) {
        const double u = static_cast<double>(i) / kGrid;
        if (u >= static_cast<double>(half_width)) break;
        const double frac = u / static_cast<double>(half_width);
        const double kaiser = bessel_i0(8.0 * std::sqrt(std::max(0.0, 1.0 - frac * frac))) / i0_beta;
        table[i] = 2.0 * cutoff * sinc(2.0 * cutoff * u) * kaiser;
    }
    auto kernel = [&](double u) {
        u = std::fabs(u);
        const double g = u * kGrid;
        const auto idx = static_cast<std::size_t>(g);
        if (idx + 1 >= table_len) return 0.0;
        const double frac = g - static_cast<double>(idx);
        return table[idx] + frac * (table[idx + 1] - table[idx]);
    };

    const auto out_len = static_cast<std::size_t>(
        std::llround(static_cast<double>(in.samples.size()) * dst / src));
    AudioBuffer out;
    out.sample_rate = target_rate;
    out.samples.resize(out_len);

    const auto n = static_cast<long long>(in.samples.size());
    for (std::size_t j = 0; j < out_len; ++j) {
        const double t = static_cast<double>(j) * src / dst;
        const auto k_lo = static_cast<long long>(std::ceil(t - static_cast<double>(half_width)));
        const auto k_hi = static_cast<long long>(std::floor(t + static_cast<double>(half_width)));
        double acc = 0.0;
        double norm = 0.0;
        for (long long k = k_lo; k <= k_hi; ++k) {
            const double w = kernel(t - static_cast<double>(k));
            norm += w;
            if (k >= 0 && k < n) acc += in.samples[static_cast<std::size_t>(k)] * w;
        }
        out.samples[j] = norm > 1e-12 ? acc / norm : 0.0;
    }
    return out;
}

std::vector<Segment> segment_audio(const AudioBuffer& in, const std::string& source) {
    AudioBuffer canon = in.sample_rate == kCanonicalRate ? in : resample(in, kCanonicalRate);
    const std::size_t count = canon.samples.size() / kSegmentSamples;
    std::vector<Segment> segments;
    segments.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Segment seg;
        seg.audio.sample_rate = kCanonicalRate;
        seg.audio.samples.assign(canon.samples.begin() + static_cast<std::ptrdiff_t>(i * kSegmentSamples),
                                 canon.samples.begin() + static_cast<std::ptrdiff_t>((i + 1) * kSegmentSamples));
        seg.source = source;
        seg.index = i;
        segments.push_back(std::move(seg));
    }
    return segments;
}

}  // namespace ng

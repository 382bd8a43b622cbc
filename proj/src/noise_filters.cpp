#include "noisegate/noise_filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "noisegate/features.hpp"
#include "noisegate/indices.hpp"

namespace ng {

GateResult gate_rain(const std::vector<Segment>& segments, const TrainedModel& model,
                     double threshold) {
    GateResult out;
    out.probabilities.reserve(segments.size());
    for (const auto& seg : segments) {
        double proba = std::numeric_limits<double>::quiet_NaN();
        try {
            const auto fv = extract_features(seg, model.base_set, model.pre);
            proba = predict_proba(model, fv);
        } catch (const std::exception& e) {
            out.errors.push_back(seg.source + "[" + std::to_string(seg.index) + "]: " + e.what());
            out.probabilities.push_back(proba);
            out.kept.push_back(seg);  // never drop data on a failed prediction
            continue;
        }
        out.probabilities.push_back(proba);
        if (proba >= threshold)
            out.dropped.push_back(seg);
        else
            out.kept.push_back(seg);
    }
    return out;
}

namespace {

struct BedoyaStats {
    double psd = 0.0;
    double snr = 0.0;
};

BedoyaStats bedoya_stats(const Segment& seg) {
    const auto spec = stft(seg.audio);
    const auto band = rain_band();
    return {psd(spec, band), snr_spectral(spec, band)};
}

bool bedoya_rule(const BedoyaStats& s, double x) {
    const double psd_threshold = 3e-5 * x * x - 3e-5 * x;
    const double snr_threshold = 0.64 + 0.01 * x;
    return s.psd > psd_threshold && s.snr > snr_threshold;
}

}  // namespace

bool bedoya_classify(const Segment& seg, double x) { return bedoya_rule(bedoya_stats(seg), x); }

double bedoya_sweep_auc(const std::vector<Segment>& segments, const std::vector<int>& labels,
                        double x_lo, double x_hi, double step) {
    if (segments.size() != labels.size())
        throw std::invalid_argument("bedoya_sweep_auc: segment/label count mismatch");
    if (step <= 0.0 || x_hi < x_lo) throw std::invalid_argument("bedoya_sweep_auc: bad sweep range");

    std::size_t pos = 0;
    for (int l : labels) pos += (l != 0);
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("bedoya_sweep_auc: need both classes");

    std::vector<BedoyaStats> stats;
    stats.reserve(segments.size());
    for (const auto& seg : segments) stats.push_back(bedoya_stats(seg));

    std::vector<std::pair<double, double>> points;  // (fpr, tpr)
    for (double x = x_lo; x <= x_hi + 1e-12; x += step) {
        std::size_t tp = 0;
        std::size_t fp = 0;
        for (std::size_t i = 0; i < stats.size(); ++i) {
            if (!bedoya_rule(stats[i], x)) continue;
            if (labels[i] != 0)
                ++tp;
            else
                ++fp;
        }
        points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos));
    }
    points.emplace_back(0.0, 0.0);
    points.emplace_back(1.0, 1.0);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i)
        area += (points[i].first - points[i - 1].first) *
                (points[i].second + points[i - 1].second) / 2.0;
    return area;
}

CicadaBandProfile cicada_band_profile(const Spectrogram& spec) {
    const std::size_t bins = spec.bins();
    if (bins == 0) throw std::invalid_argument("cicada_band_profile: empty spectrogram");

    std::vector<std::vector<double>> pmfs;
    pmfs.reserve(spec.frames());
    for (const auto& frame : spec.mags) {
        double total = 0.0;
        for (double m : frame) total += m;
        if (total <= 0.0) continue;  // silent frame carries no shape information
        std::vector<double> pmf(bins);
        for (std::size_t k = 0; k < bins; ++k) pmf[k] = frame[k] / total;
        pmfs.push_back(std::move(pmf));
    }
    if (pmfs.size() < 10)
        throw std::runtime_error("cicada_band_profile: fewer than 10 usable frames");

    CicadaBandProfile prof;
    prof.bin_hz = spec.bin_hz();
    prof.mean_pmf.assign(bins, 0.0);
    prof.rsd.assign(bins, 0.0);
    const double n = static_cast<double>(pmfs.size());
    for (std::size_t k = 0; k < bins; ++k) {
        double mean = 0.0;
        for (const auto& pmf : pmfs) mean += pmf[k];
        mean /= n;
        double var = 0.0;
        for (const auto& pmf : pmfs) {
            const double d = pmf[k] - mean;
            var += d * d;
        }
        var /= n;
        prof.mean_pmf[k] = mean;
        prof.rsd[k] = mean > 0.0 ? 100.0 * std::sqrt(var) / mean
                                 : std::numeric_limits<double>::infinity();
    }
    return prof;
}

std::optional<CicadaBand> select_cicada_band(const CicadaBandProfile& prof) {
    const std::size_t bins = prof.mean_pmf.size();
    auto qualifies = [&](std::size_t k) {
        return prof.mean_pmf[k] > kCicadaPmfThreshold && prof.rsd[k] < kCicadaRsdLimit;
    };

    std::optional<CicadaBand> best;
    std::size_t k = 0;
    while (k < bins) {
        if (!qualifies(k)) {
            ++k;
            continue;
        }
        std::size_t end = k;
        double score = 0.0;
        while (end < bins && qualifies(end)) score += prof.mean_pmf[end++];
        if (end - k >= 2 && (!best || score > best->score)) {
            // ties keep the earlier (lower-frequency) run
            CicadaBand band;
            band.low_hz = std::max(0.0, (static_cast<double>(k) - 0.5) * prof.bin_hz);
            band.high_hz = (static_cast<double>(end - 1) + 0.5) * prof.bin_hz;
            band.score = score;
            best = band;
        }
        k = end;
    }
    return best;
}

std::pair<AudioBuffer, std::optional<CicadaBand>> apply_cicada_bandstop(const AudioBuffer& buf,
                                                                       std::size_t taps) {
    const auto band = select_cicada_band(cicada_band_profile(stft(buf)));
    if (!band) return {buf, std::nullopt};

    // Widen the stop band so the FIR transition region falls outside the
    // detected bins: half a bin beyond the outer edges, plus half the
    // transition width.
    const double bin_hz = static_cast<double>(buf.sample_rate) / 512.0;
    const double margin = bin_hz / 2.0 + fir_transition_hz(taps, buf.sample_rate) / 2.0;
    const double nyquist = buf.sample_rate / 2.0;
    const double lo = std::max(1.0, band->low_hz - margin);
    const double hi = std::min(nyquist - 1.0, band->high_hz + margin);

    const auto kernel = design_bandstop(lo, hi, buf.sample_rate, taps);
    return {apply_fir(buf, kernel), band};
}

CicadaFilterResult filter_cicada(const Segment& seg, const TrainedModel& detector,
                                 double threshold) {
    CicadaFilterResult res;
    res.segment = seg;
    const auto fv = extract_features(seg, detector.base_set, detector.pre);
    res.probability = predict_proba(detector, fv);
    if (res.probability < threshold) return res;  // pass through untouched

    auto [filtered, band] = apply_cicada_bandstop(seg.audio);
    res.band = band;
    if (band) {
        res.segment.audio = std::move(filtered);
        res.filtered = true;
    }
    return res;
}

}  // namespace ng

#include "tennis/momentum.hpp"

#include <algorithm>
#include <optional>

#include "tennis/error.hpp"

namespace tennis {

const char* to_string(Leader l) noexcept
{
    switch (l) {
    case Leader::P1: return "P1";
    case Leader::P2: return "P2";
    default: return "tied";
    }
}

MomentumSeries ema(std::span<const double> series, double alpha, int period)
{
    if (series.empty()) {
        throw Error(Errc::EmptySeries, "EMA of an empty series");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(Errc::InvalidArgument, "smoothing factor must lie in [0, 1]");
    }
    if (period < 1) {
        throw Error(Errc::InvalidArgument, "EMA period must be >= 1");
    }

    const double decay = 1.0 - alpha;
    std::vector<double> weights(static_cast<std::size_t>(period));
    double w = 1.0;
    for (auto& v : weights) {
        v = w;
        w *= decay;
    }

    MomentumSeries out;
    out.alpha = alpha;
    out.period = period;
    out.values.resize(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) {
        const std::size_t depth = std::min(t + 1, weights.size());
        double num = 0.0;
        double den = 0.0;
        for (std::size_t k = 0; k < depth; ++k) {
            num += weights[k] * series[t - k];
            den += weights[k];
        }
        out.values[t] = num / den;
    }
    return out;
}

std::vector<SwingLabel> label_differential(std::span<const double> differential, std::span<const int> point_no,
                                           double tie_eps)
{
    std::vector<SwingLabel> out(differential.size());
    std::optional<Leader> last;
    for (std::size_t t = 0; t < differential.size(); ++t) {
        const double d = differential[t];
        const Leader leader = d > tie_eps ? Leader::P1 : d < -tie_eps ? Leader::P2 : Leader::Tied;
        out[t].point_no = t < point_no.size() ? point_no[t] : static_cast<int>(t + 1);
        out[t].leader = leader;
        if (leader != Leader::Tied) {
            out[t].swing = last.has_value() && *last != leader;
            last = leader;
        }
    }
    return out;
}

std::vector<SwingLabel> label_swings(const MomentumSeries& p1, const MomentumSeries& p2, double tie_eps)
{
    if (p1.values.size() != p2.values.size()) {
        throw Error(Errc::LengthMismatch, "momentum series lengths differ");
    }
    std::vector<double> diff(p1.values.size());
    for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = p1.values[t] - p2.values[t];
    return label_differential(diff, p1.point_no, tie_eps);
}

} // namespace tennis

#include <cmath>
#include <numeric>

#include "mccs/errors.hpp"
#include "mccs/panel.hpp"
#include "mccs/scenario.hpp"

namespace mccs {
namespace {

double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace

std::vector<MarketSnapshot> plant_signal(std::vector<MarketSnapshot> history, const std::vector<MccsSpec>& trades,
                                         const PlantSpec& plant) {
    if (!(plant.snr > 0.0)) throw ArgumentError("plant_signal: SNR must be positive");
    if (!(plant.noise_scale > 0.0)) throw ArgumentError("plant_signal: noise scale must be positive");
    const std::size_t n = history.size();
    if (n <= static_cast<std::size_t>(kHoldingWeeks)) throw DataError("plant_signal: history shorter than one year");
    for (auto& snap : history) snap.planted_return.clear();

    for (const auto& spec : trades) {
        const std::string id = spec.id();
        const TradeSeries series = compute_trade_series(history, spec, {plant.cost_multiplier, false});

        std::vector<std::size_t> entries;
        std::vector<double> natural;
        for (std::size_t w = 0; w + kHoldingWeeks < n; ++w)
            if (series.natural_labels[w]) {
                entries.push_back(w);
                natural.push_back(*series.natural_labels[w]);
            }
        if (entries.size() < 2) continue;
        const double label_scale = std::max(std_of(natural), 1e-12);

        // Planted linear component on features standardized over the labelled entries.
        std::vector<double> linear(entries.size(), 0.0);
        for (std::size_t j = 0; j < FeatureVector::size; ++j) {
            if (plant.coefficients[j] == 0.0) continue;
            std::vector<double> column;
            for (std::size_t w : entries) {
                const auto v = series.features[w].values()[j];
                if (v) column.push_back(*v);
            }
            if (column.size() < 2) continue;
            const double m = mean_of(column);
            const double sd = std_of(column);
            if (!(sd > 0.0)) continue;
            for (std::size_t e = 0; e < entries.size(); ++e) {
                const auto v = series.features[entries[e]].values()[j];
                if (v) linear[e] += plant.coefficients[j] * (*v - m) / sd;
            }
        }
        const double linear_sd = std_of(linear);
        if (linear_sd > 0.0)
            for (double& x : linear) x /= linear_sd;

        const double signal_weight = std::sqrt(plant.snr);
        for (std::size_t e = 0; e < entries.size(); ++e) {
            const std::size_t w = entries[e];
            StreamRng rng(stream_key({plant.seed, hash_string(id), static_cast<std::uint64_t>(history[w].date.serial())}));
            const double overlay = plant.noise_scale * label_scale * (signal_weight * linear[e] + rng.normal());
            history[w + kHoldingWeeks].planted_return[id] = overlay;
        }
    }
    return history;
}

}  // namespace mccs

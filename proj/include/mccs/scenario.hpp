#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mccs/market.hpp"
#include "mccs/package.hpp"
#include "mccs/random.hpp"

namespace mccs {

/// Mean-reverting (Ornstein-Uhlenbeck) process parameters. `vol` is per sqrt(year).
struct OuParams {
    double kappa = 0.0;
    double mean = 0.0;
    double vol = 0.0;
};

struct ScenarioConfig {
    std::uint64_t seed = 0;
    Date start{2006, 9, 6};
    int years = 10;

    // Zero curve: z(t) = level - slope * (1 - exp(-t/s)) / (t/s), s = slope_decay.
    OuParams level{0.25, 0.030, 0.008};
    OuParams slope{0.40, 0.015, 0.006};
    double slope_decay = 2.0;
    std::vector<double> curve_times{0.25, 0.5, 1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 15, 20, 30};

    // SABR alphas: log alpha = log(base(expiry, tenor)) + common factor + bucket factor.
    std::vector<double> expiry_buckets{0.25, 0.5, 1, 2, 3, 4, 5, 7, 10};
    std::vector<double> tenor_buckets{1, 2, 5, 10};
    double alpha_base = 0.18;
    double alpha_hump = 0.12;         // extra alpha at short expiries
    double alpha_hump_decay = 2.0;    // years
    OuParams alpha_common{0.8, 0.0, 0.25};
    OuParams alpha_bucket{1.5, 0.0, 0.10};
    double beta = 1.0;
    double sabr_rho = -0.25;
    double sabr_nu = 0.35;

    double funding_spread = 0.0010;
    int max_resamples = 64;

    /// Throws ArgumentError on an invalid configuration.
    void validate() const;
};

/// Long-run SABR alpha of a bucket.
double base_alpha(const ScenarioConfig& config, double expiry, double tenor);

/// Wednesdays from the first one on/after `start`, strictly before start + years.
std::vector<Date> weekly_wednesdays(Date start, int years);

/// Every snapshot satisfies the forward floor and positive alphas. Same config,
/// same bytes.
std::vector<MarketSnapshot> generate_history(const ScenarioConfig& config);

/// Ground truth for a planted linear signal in the 12-feature space.
struct PlantSpec {
    std::array<double, FeatureVector::size> coefficients{};
    double snr = 2.0;           // variance of planted component / variance of injected noise
    double noise_scale = 3.0;   // injected noise std, in units of the natural label std
    double cost_multiplier = 0.75;
    std::uint64_t seed = 0;
};

/// Adds to each exit snapshot (entry + 52 weeks) a per-trade return overlay
/// made of the planted linear component and seeded noise. Per trade the overlay
/// is one fixed linear map of the entry's features (scaled on the whole history)
/// plus noise keyed by the entry date, so it is ground truth rather than a
/// feature and panels built from the result keep their no-look-ahead property.
std::vector<MarketSnapshot> plant_signal(std::vector<MarketSnapshot> history, const std::vector<MccsSpec>& trades,
                                         const PlantSpec& plant);

/// Archive I/O. One CSV row per date x bucket; planted overlays go to a
/// sibling file. Numbers use shortest round-trip formatting.
void write_history_csv(const std::vector<MarketSnapshot>& history, const std::filesystem::path& scenario_csv,
                       const std::filesystem::path& planted_csv);
std::vector<MarketSnapshot> read_history_csv(const std::filesystem::path& scenario_csv,
                                             const std::filesystem::path& planted_csv);


}  // namespace mccs

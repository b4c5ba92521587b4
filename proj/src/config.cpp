#include "mccs/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mccs/csv.hpp"
#include "mccs/errors.hpp"

namespace mccs {
namespace {

constexpr std::string_view kFeatureKeys[FeatureVector::size] = {
    "pv",    "strike", "carry_at_expiry", "be_width",       "aged_1y_carry", "theta", "atmf_implied_vol",
    "gamma", "vega",   "curve_carry_1y",  "time_carry_1y", "vol_carry_1y"};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view list) {
    std::vector<std::string> out;
    for (const auto& part : csv::split(list, ',')) {
        std::string t = trim(part);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

double number(const std::string& v, const std::string& where) {
    try {
        return csv::parse_number(v);
    } catch (const Error&) {
        throw ArgumentError(where + ": '" + v + "' is not a number");
    }
}

int integer(const std::string& v, const std::string& where) {
    const double x = number(v, where);
    if (x != static_cast<double>(static_cast<long long>(x))) throw ArgumentError(where + ": '" + v + "' is not an integer");
    return static_cast<int>(x);
}

bool boolean(const std::string& v, const std::string& where) {
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ArgumentError(where + ": '" + v + "' is not a boolean");
}

std::vector<double> numbers(const std::string& v, const std::string& where) {
    std::vector<double> out;
    for (const auto& part : split_list(v)) out.push_back(number(part, where));
    if (out.empty()) throw ArgumentError(where + ": empty list");
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

void ou(std::map<std::string, Setter>& m, const std::string& prefix, OuParams ScenarioConfig::*field) {
    m["scenario." + prefix + "_kappa"] = [field](RunConfig& c, const std::string& v, const std::string& w) {
        (c.scenario.*field).kappa = number(v, w);
    };
    m["scenario." + prefix + "_mean"] = [field](RunConfig& c, const std::string& v, const std::string& w) {
        (c.scenario.*field).mean = number(v, w);
    };
    m["scenario." + prefix + "_vol"] = [field](RunConfig& c, const std::string& v, const std::string& w) {
        (c.scenario.*field).vol = number(v, w);
    };
}

template <typename T>
Setter num(T ScenarioConfig::*field) {
    return [field](RunConfig& c, const std::string& v, const std::string& w) {
        c.scenario.*field = static_cast<T>(number(v, w));
    };
}

template <typename T>
Setter cv(T CvScheme::*field) {
    return [field](RunConfig& c, const std::string& v, const std::string& w) {
        if constexpr (std::is_same_v<T, int>) c.cv.*field = integer(v, w);
        else c.cv.*field = number(v, w);
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> m;
        m["seed"] = [](RunConfig& c, const std::string& v, const std::string& w) {
            const double x = number(v, w);
            if (x < 0 || x != static_cast<double>(static_cast<std::uint64_t>(x)))
                throw ArgumentError(w + ": seed must be a non-negative integer");
            c.seed = static_cast<std::uint64_t>(x);
        };
        m["output"] = [](RunConfig& c, const std::string& v, const std::string&) { c.output = v; };
        m["threads"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.threads = integer(v, w); };

        m["scenario.years"] = [](RunConfig& c, const std::string& v, const std::string& w) {
            c.scenario.years = integer(v, w);
        };
        m["scenario.start"] = [](RunConfig& c, const std::string& v, const std::string&) {
            c.scenario.start = Date::parse(v);
        };
        ou(m, "level", &ScenarioConfig::level);
        ou(m, "slope", &ScenarioConfig::slope);
        ou(m, "alpha_common", &ScenarioConfig::alpha_common);
        ou(m, "alpha_bucket", &ScenarioConfig::alpha_bucket);
        m["scenario.slope_decay"] = num(&ScenarioConfig::slope_decay);
        m["scenario.alpha_base"] = num(&ScenarioConfig::alpha_base);
        m["scenario.alpha_hump"] = num(&ScenarioConfig::alpha_hump);
        m["scenario.alpha_hump_decay"] = num(&ScenarioConfig::alpha_hump_decay);
        m["scenario.beta"] = num(&ScenarioConfig::beta);
        m["scenario.rho"] = num(&ScenarioConfig::sabr_rho);
        m["scenario.nu"] = num(&ScenarioConfig::sabr_nu);
        m["scenario.funding_spread"] = num(&ScenarioConfig::funding_spread);
        m["scenario.max_resamples"] = num(&ScenarioConfig::max_resamples);
        m["scenario.curve_times"] = [](RunConfig& c, const std::string& v, const std::string& w) {
            c.scenario.curve_times = numbers(v, w);
        };
        m["scenario.expiry_buckets"] = [](RunConfig& c, const std::string& v, const std::string& w) {
            c.scenario.expiry_buckets = numbers(v, w);
        };
        m["scenario.tenor_buckets"] = [](RunConfig& c, const std::string& v, const std::string& w) {
            c.scenario.tenor_buckets = numbers(v, w);
        };

        m["plant.enabled"] = [](RunConfig& c, const std::string& v, const std::string& w) {
            c.plant_enabled = boolean(v, w);
        };
        m["plant.features"] = [](RunConfig& c, const std::string& v, const std::string& w) {
            c.plant.coefficients.fill(0.0);
            for (const auto& item : split_list(v)) {
                const auto colon = item.rfind(':');
                if (colon == std::string::npos) throw ArgumentError(w + ": expected feature:coefficient, got '" + item + "'");
                c.plant.coefficients[feature_index(trim(item.substr(0, colon)))] = number(trim(item.substr(colon + 1)), w);
            }
        };
        m["plant.snr"] = [](RunConfig& c, const std::string& v, const std::string& w) { c.plant.snr = number(v, w); };
        m["plant.noise_scale"] = [](RunConfig& c, const std::string& v, const std::string& w) {
            c.plant.noise_scale = number(v, w);
        };

        m["trades.list"] = [](RunConfig& c, const std::string& v, const std::string&) { c.trades = parse_trade_list(v); };
        m["models.list"] = [](RunConfig& c, const std::string& v, const std::string&) {
            c.strategies = parse_strategy_list(v);
        };

        m["cv.outer_warmup_weeks"] = cv(&CvScheme::outer_warmup_weeks);
        m["cv.outer_step_weeks"] = cv(&CvScheme::outer_step_weeks);
        m["cv.inner_warmup_weeks"] = cv(&CvScheme::inner_warmup_weeks);
        m["cv.inner_folds"] = cv(&CvScheme::inner_folds);
        m["cv.purge_weeks"] = cv(&CvScheme::purge_weeks);
        m["cv.refit_every"] = cv(&CvScheme::refit_every);
        m["cv.retune_every"] = cv(&CvScheme::retune_every);

        m["panel.cost_multiplier"] = [](RunConfig& c, const std::string& v, const std::string& w) {
            c.cost_multiplier = number(v, w);
        };
        m["panel.gross"] = [](RunConfig& c, const std::string& v, const std::string& w) {
            c.gross_returns = boolean(v, w);
        };
        m["panel.winsor_low"] = cv(&CvScheme::winsor_low);
        m["panel.winsor_high"] = cv(&CvScheme::winsor_high);

        m["report.recommend_model"] = [](RunConfig& c, const std::string& v, const std::string&) {
            c.recommend_model = parse_strategy(v).slug();
        };
        return m;
    }();
    return table;
}

}  // namespace

void RunConfig::validate() const {
    scenario.validate();
    cv.validate();
    if (trades.empty()) throw ArgumentError("config: empty trade list");
    if (strategies.empty()) throw ArgumentError("config: empty model list");
    for (const auto& t : trades) t.validate();
    if (!(cost_multiplier >= 0.0)) throw ArgumentError("config: negative cost multiplier");
    if (plant_enabled && (!(plant.snr >= 0.0) || !(plant.noise_scale >= 0.0)))
        throw ArgumentError("config: plant snr and noise scale must be non-negative");
    if (output.empty()) throw ArgumentError("config: empty output directory");
    parse_strategy(recommend_model);
}

std::size_t feature_index(std::string_view key) {
    const auto& names = FeatureVector::names();
    for (std::size_t i = 0; i < FeatureVector::size; ++i)
        if (key == kFeatureKeys[i] || key == names[i]) return i;
    throw ArgumentError("unknown feature '" + std::string(key) + "'");
}

void apply_config_text(RunConfig& config, std::string_view text, const std::string& source) {
    std::istringstream in{std::string(text)};
    std::string line, section;
    int number_of_line = 0;
    while (std::getline(in, line)) {
        ++number_of_line;
        const std::string where = source + ":" + std::to_string(number_of_line);
        const auto hash = line.find('#');
        const std::string content = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (content.empty()) continue;
        if (content.front() == '[') {
            if (content.back() != ']') throw ArgumentError(where + ": malformed section header");
            section = trim(std::string_view(content).substr(1, content.size() - 2));
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ArgumentError(where + ": expected key = value");
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        const auto it = setters().find(full);
        if (it == setters().end()) throw ArgumentError(where + ": unknown key '" + full + "'");
        try {
            it->second(config, value, where);
        } catch (const ArgumentError&) {
            throw;
        } catch (const Error& e) {
            throw ArgumentError(where + ": " + e.what());
        }
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    RunConfig c;
    apply_config_text(c, text.str(), path.string());
    return c;
}

std::vector<MccsSpec> parse_trade_list(std::string_view list) {
    if (trim(list) == "all") return standard_trades();
    std::vector<MccsSpec> out;
    for (const auto& id : split_list(list)) out.push_back(MccsSpec::parse(id));
    if (out.empty()) throw ArgumentError("empty trade list");
    return out;
}

std::vector<Strategy> parse_strategy_list(std::string_view list) {
    const std::string t = trim(list);
    if (t == "all") return all_strategies();
    std::vector<Strategy> out;
    for (const auto& name : split_list(list)) {
        if (name == "models") {
            for (ModelFamily f : all_families()) out.push_back(Strategy::model(f));
        } else if (name == "baselines") {
            for (const auto& s : all_strategies())
                if (s.kind != Strategy::Kind::model) out.push_back(s);
        } else {
            out.push_back(parse_strategy(name));
        }
    }
    if (out.empty()) throw ArgumentError("empty model list");
    return out;
}

}  // namespace mccs

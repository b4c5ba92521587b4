#include <algorithm>
#include <map>

#include "mccs/csv.hpp"
#include "mccs/errors.hpp"
#include "mccs/scenario.hpp"

namespace mccs {
namespace {

const std::vector<std::string> kScenarioHeader = {"date",  "bucket",       "expiry",      "tenor",
                                                  "alpha", "beta",         "rho",         "nu",
                                                  "funding_rate", "curve_times", "curve_rates"};
const std::vector<std::string> kPlantedHeader = {"date", "trade", "planted_return"};

std::string join_numbers(std::span<const double> xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ';';
        out += csv::format_number(xs[i]);
    }
    return out;
}

std::vector<double> split_numbers(const std::string& field) {
    std::vector<double> out;
    for (const auto& part : csv::split(field, ';')) out.push_back(csv::parse_number(part));
    return out;
}

}  // namespace

void write_history_csv(const std::vector<MarketSnapshot>& history, const std::filesystem::path& scenario_csv,
                       const std::filesystem::path& planted_csv) {
    csv::Table table{kScenarioHeader, {}};
    csv::Table planted{kPlantedHeader, {}};
    for (const auto& snap : history) {
        const std::string date = snap.date.iso();
        const std::string funding = csv::format_number(snap.funding_rate);
        const std::string times = join_numbers(snap.curve.times());
        const std::string rates = join_numbers(snap.curve.zero_rates());
        const auto& s = snap.surface;
        for (std::size_t i = 0; i < s.expiry_count(); ++i)
            for (std::size_t j = 0; j < s.tenor_count(); ++j) {
                const SabrParams& p = s.cell(i, j);
                table.rows.push_back({date, bucket_id(s.expiries()[i], s.tenors()[j]),
                                      csv::format_number(s.expiries()[i]), csv::format_number(s.tenors()[j]),
                                      csv::format_number(p.alpha), csv::format_number(p.beta),
                                      csv::format_number(p.rho), csv::format_number(p.nu), funding, times, rates});
            }
        for (const auto& [trade, value] : snap.planted_return)
            planted.rows.push_back({date, trade, csv::format_number(value)});
    }
    csv::write(scenario_csv, table);
    csv::write(planted_csv, planted);
}

std::vector<MarketSnapshot> read_history_csv(const std::filesystem::path& scenario_csv,
                                             const std::filesystem::path& planted_csv) {
    const csv::Table table = csv::read(scenario_csv);
    if (table.header != kScenarioHeader) throw DataError("unexpected scenario CSV header in " + scenario_csv.string());

    std::vector<MarketSnapshot> history;
    std::size_t r = 0;
    while (r < table.rows.size()) {
        const std::string& date = table.rows[r][0];
        std::vector<double> expiries;
        std::vector<double> tenors;
        std::vector<SabrParams> cells;
        const std::size_t first = r;
        for (; r < table.rows.size() && table.rows[r][0] == date; ++r) {
            const auto& row = table.rows[r];
            const double e = csv::parse_number(row[2]);
            const double t = csv::parse_number(row[3]);
            if (std::find(expiries.begin(), expiries.end(), e) == expiries.end()) expiries.push_back(e);
            if (std::find(tenors.begin(), tenors.end(), t) == tenors.end()) tenors.push_back(t);
            cells.push_back(SabrParams{csv::parse_number(row[4]), csv::parse_number(row[5]),
                                       csv::parse_number(row[6]), csv::parse_number(row[7])});
        }
        const auto& head = table.rows[first];
        MarketSnapshot snap;
        snap.date = Date::parse(date);
        snap.funding_rate = csv::parse_number(head[8]);
        snap.curve = DiscountCurve(snap.date, split_numbers(head[9]), split_numbers(head[10]));
        snap.surface = SabrSurface(std::move(expiries), std::move(tenors), std::move(cells));
        if (!history.empty() && !(history.back().date < snap.date))
            throw DataError("scenario dates must be strictly increasing");
        history.push_back(std::move(snap));
    }

    if (std::filesystem::exists(planted_csv)) {
        const csv::Table planted = csv::read(planted_csv);
        if (planted.header != kPlantedHeader) throw DataError("unexpected planted CSV header");
        std::map<Date, MarketSnapshot*> by_date;
        for (auto& snap : history) by_date[snap.date] = &snap;
        for (const auto& row : planted.rows) {
            const auto it = by_date.find(Date::parse(row[0]));
            if (it == by_date.end()) throw DataError("planted overlay for unknown date " + row[0]);
            it->second->planted_return[row[1]] = csv::parse_number(row[2]);
        }
    }
    return history;
}

}  // namespace mccs

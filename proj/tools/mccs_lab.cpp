#include <CLI11.hpp>
#include <iostream>

#include "mccs/errors.hpp"
#include "mccs/log.hpp"
#include "mccs/pipeline.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string models;
    std::string trades;
    int threads = 0;
    bool verbose = false;
};

mccs::RunConfig resolve(const Options& o) {
    mccs::RunConfig c = o.config.empty() ? mccs::RunConfig{} : mccs::load_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (!o.out.empty()) c.output = o.out;
    if (!o.models.empty()) c.strategies = mccs::parse_strategy_list(o.models);
    if (!o.trades.empty()) c.trades = mccs::parse_trade_list(o.trades);
    if (o.threads > 0) c.threads = o.threads;
    c.validate();
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MCCS swaption trade recommendation lab: synthetic scenarios, walk-forward backtests, reports"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "Config file (key = value lines with [section] headers)");
    app.add_option("--seed", o.seed, "Seed; overrides the config");
    app.add_option("--out", o.out, "Output directory; overrides the config");
    app.add_option("--models", o.models, "Comma-separated strategies (slugs or names), 'all', 'models' or 'baselines'");
    app.add_option("--trades", o.trades, "Comma-separated trade ids such as EUR1y1y2y, or 'all'");
    app.add_option("--threads", o.threads, "Worker threads (capped by MCCS_LAB_THREADS)");
    app.add_flag("-v,--verbose", o.verbose, "Print warnings and progress to stderr");
    app.fallthrough();

    auto* synth = app.add_subcommand("synth", "Generate the synthetic market history archive");
    auto* backtest = app.add_subcommand("backtest", "Build panels, run the walk-forward backtest, write signals and metrics");
    auto* report = app.add_subcommand("report", "Rank analysis and lasso feature significance from backtest outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    if (o.verbose) mccs::log::set_level(mccs::log::Level::info);

    mccs::RunConfig config;
    try {
        config = resolve(o);
    } catch (const mccs::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (synth->parsed()) mccs::cmd_synth(config, std::cout);
        else if (backtest->parsed()) mccs::cmd_backtest(config, std::cout);
        else if (report->parsed()) mccs::cmd_report(config, std::cout);
    } catch (const mccs::ArgumentError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}

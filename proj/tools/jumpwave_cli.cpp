// jumpwave command line: runs the numerical experiments described in the
// README and consolidates their reports.
//
//   jumpwave <experiment> --config cfg.json [--out dir] [--seed n] [--threads n]
//   jumpwave report <run-dir>
//
// Exit codes: 0 pass, 1 verdict failure, 2 configuration error,
// 3 numerical-contract failure.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "jumpwave/experiments.hpp"
#include "jumpwave/errors.hpp"

using namespace jumpwave;

namespace {

std::string default_out_dir(const ExperimentConfig& cfg) {
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    const char* root = std::getenv(kOutRootEnv);
    std::string base = root ? root : "runs";
    return base + "/" + cfg.experiment;
}

int run_one(const std::string& name, const std::string& config_path,
            const std::string& out_override, long seed, int threads,
            bool experimental) {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (cfg.experiment != name)
        throw InputError("config is for experiment '" + cfg.experiment +
                         "', but '" + name + "' was requested");
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (threads > 0) cfg.threads = threads;
    if (experimental) cfg.experimental = true;
    cfg.out_dir = default_out_dir(cfg);

    RunManifest manifest(cfg, cfg.out_dir);
    Verdict v = run_experiment(cfg, manifest);
    manifest.write();
    emit_report(cfg.out_dir);
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << v.name << " — "
              << v.details << "\n";
    std::cout << "outputs in " << cfg.out_dir << "\n";
    return v.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical experiments for jump transport in hyperbolic systems"};
    app.require_subcommand(1);

    const std::vector<std::string> experiments = {
        "analyze",      "boundedness", "jump-growth", "paraxial-error",
        "corput-sweep", "sp-scaling",  "decay-probe"};

    struct Args {
        std::string config;
        std::string out;
        long seed = -1;
        int threads = 0;
        bool experimental = false;
    };
    std::map<std::string, Args> args;
    for (const auto& name : experiments) {
        auto* sub = app.add_subcommand(name);
        Args& a = args[name];
        sub->add_option("--config", a.config, "experiment config (JSON)")
            ->required();
        sub->add_option("--out", a.out, "output directory");
        sub->add_option("--seed", a.seed, "random seed override");
        sub->add_option("--threads", a.threads, "worker thread count");
        sub->add_flag("--experimental", a.experimental,
                      "allow intermediate-rank sheets (observations only)");
    }
    std::string report_dir;
    auto* rep = app.add_subcommand("report", "consolidate a finished run");
    rep->add_option("dir", report_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (rep->parsed()) {
            const bool ok = emit_report(report_dir);
            std::cout << (ok ? "PASS" : "FAIL") << "  consolidated report in "
                      << report_dir << "\n";
            return ok ? 0 : 1;
        }
        for (const auto& name : experiments)
            if (app.get_subcommand(name)->parsed()) {
                const Args& a = args[name];
                return run_one(name, a.config, a.out, a.seed, a.threads,
                               a.experimental);
            }
        std::cerr << "no subcommand\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "numerical contract failure: " << e.what() << "\n";
        return 3;
    } catch (const AccuracyError& e) {
        std::cerr << "accuracy failure: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "domain failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

// experiments.hpp — declarative experiment configs, the headline
// experiments, result persistence, and the consolidated report.
//
// Every run owns an output directory. CSV outputs have a header row and a
// fixed column order; the JSON manifest (written last) records the config
// snapshot, code version, wall time, warnings, and a checksummed inventory
// of every emitted file. Identical config + seed gives byte-identical CSVs.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jumpwave/linalg.hpp"

namespace jumpwave {

inline constexpr const char* kVersion = "0.1.0";
// Environment variable naming the default output root.
inline constexpr const char* kOutRootEnv = "JUMPWAVE_OUT_ROOT";

struct ExperimentConfig {
    std::string experiment;       // analyze | boundedness | jump-growth |
                                  // paraxial-error | corput-sweep |
                                  // sp-scaling | decay-probe
    std::string system_path;
    std::string source_name = "gauss_jump";
    std::string profile_name = "gauss";
    // grid
    std::vector<int> grid_n{1024, 256};
    std::vector<double> box{400.0, 100.0};
    double horizon = 200.0;
    std::vector<double> output_times;   // filled with defaults if empty
    // hyperplane grid
    int plane_nt = 2001;
    int plane_nx = 256;
    double plane_xlen = 100.0;
    // cutoff
    double theta_outer = 0.9;
    double theta_inner = 0.45;
    // source
    double source_T = 1.0;
    // windows and tolerances
    double fit_window_lo = 20.0, fit_window_hi = 100.0;
    double early_lo = 1.0, early_hi = 10.0;
    double late_lo = 50.0, late_hi = 200.0;
    double quad_tol = 1e-8;
    int jump_order = 2;
    // misc
    std::string out_dir;
    std::uint64_t seed = 1;
    int threads = 1;
    bool experimental = false;    // allow intermediate-rank sheets,
                                  // observations only, no verdict

    static ExperimentConfig load(const std::string& path);
    std::string to_json_text() const;
    void validate() const;    // throws InputError with the offending field
};

class RunManifest {
public:
    RunManifest(const ExperimentConfig& cfg, std::string run_dir);

    void add_warning(const std::string& w);
    const std::vector<std::string>& warnings() const { return warnings_; }
    // Registers an emitted file and records its FNV-1a checksum.
    void add_file(const std::string& path);
    void set_verdict(const std::string& name, bool pass,
                     const std::string& details);
    // Writes manifest.json; call last.
    void write();

    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    std::string config_json_;
    std::vector<std::string> warnings_;
    std::vector<std::pair<std::string, std::string>> files_;  // path, checksum
    std::vector<std::tuple<std::string, bool, std::string>> verdicts_;
    double started_;
};

struct Verdict {
    std::string name;
    bool pass = false;
    std::string details;
};

// Experiments. Each writes its data files into cfg.out_dir, records
// warnings and a verdict in the manifest, and returns the verdict.
Verdict run_analyze(const ExperimentConfig& cfg, RunManifest& manifest);
Verdict run_boundedness(const ExperimentConfig& cfg, RunManifest& manifest);
Verdict run_jump_growth(const ExperimentConfig& cfg, RunManifest& manifest);
Verdict run_paraxial_error(const ExperimentConfig& cfg, RunManifest& manifest);
Verdict run_corput_sweep(const ExperimentConfig& cfg, RunManifest& manifest);
Verdict run_sp_scaling(const ExperimentConfig& cfg, RunManifest& manifest);
Verdict run_decay_probe(const ExperimentConfig& cfg, RunManifest& manifest);

// Dispatch by cfg.experiment; throws InputError for an unknown name.
Verdict run_experiment(const ExperimentConfig& cfg, RunManifest& manifest);

// Joins the verdicts of a finished run directory into summary.txt and
// summary.json. Requires manifest.json (throws InputError otherwise).
// Returns true when every verdict passed.
bool emit_report(const std::string& run_dir);

// Small CSV writer with fixed formatting shared by the experiments.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void close();
    const std::string& path() const { return path_; }
    ~CsvWriter();

private:
    std::string path_;
    void* stream_;   // FILE*
};

std::string fnv1a_checksum_of_file(const std::string& path);

} // namespace jumpwave

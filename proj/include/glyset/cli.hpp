#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace glyset::cli {

// Single source of truth for a run: a JSON config file, overridable by
// command-line flags (flags win). Unset paths stay empty.
struct RunConfig {
    std::filesystem::path corpus;
    std::filesystem::path judgments;
    std::filesystem::path embeddings;
    std::filesystem::path stop_list;
    std::filesystem::path thresholds;
    std::filesystem::path labels;        // aggregated ratings CSV
    std::filesystem::path binary_labels; // UD/HD CSV
    std::filesystem::path out_dir = "out";

    uint64_t seed = 0;
    int jobs = 1;
    std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
    std::vector<double> threshold_grid; // empty -> default_threshold_grid()
    std::vector<std::string> variants;  // empty -> every buildable variant
    std::string low_gi_tag = "low-glycemic";
    std::string alpha_metric = "ordinal"; // or "interval"
    size_t n_candidates = 0;              // curate quota; must be set for curate
    int min_count = 5;                    // vocabulary threshold
    int top_k = 20;                       // inspect list length
};

// 0.45 .. 0.55 in steps of 0.01.
std::vector<double> default_threshold_grid();

RunConfig load_run_config(const std::filesystem::path& path);

// Subcommands validate their inputs fully before writing anything, write
// only under out_dir, and throw glyset::Error on fatal problems.
void cmd_ingest(const RunConfig& cfg);
void cmd_curate(const RunConfig& cfg);
void cmd_aggregate(const RunConfig& cfg);
void cmd_analyze(const RunConfig& cfg);
void cmd_evaluate(const RunConfig& cfg);
void cmd_inspect(const RunConfig& cfg, const std::filesystem::path& model_path);

// Full argv entry point; returns the process exit status.
int run_cli(int argc, const char* const* argv);

} // namespace glyset::cli

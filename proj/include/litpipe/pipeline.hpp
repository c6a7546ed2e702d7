#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "litpipe/config.hpp"
#include "litpipe/harvest.hpp"
#include "litpipe/providers.hpp"

namespace litpipe::pipeline {

namespace fs = std::filesystem;

using Input = std::variant<harvest::SearchQuery, fs::path>;

inline const std::vector<std::string> kAllStages = {"search", "harvest", "ingest", "table", "cluster", "synthesize"};

struct StageError {
    std::string code;
    std::string detail;
};

struct PipelineRun {
    std::string run_id;
    fs::path run_dir;
    std::string status = "running";  // running | completed | failed
    nlohmann::json input;
    std::vector<std::string> stages;            // planned, in order
    std::vector<std::string> stages_completed;  // prefix of `stages`
    std::map<std::string, std::vector<std::string>> artifacts;  // paths relative to run_dir
    std::map<std::string, StageError> errors;
    std::map<std::string, nlohmann::json> stats;
};

/// Stages for an input: a query adds search and harvest before the rest.
std::vector<std::string> planned_stages(const Input& input);

/// Next `run-NNNNNN` under `<workspace>/runs`, created atomically.
std::string allocate_run_id(const fs::path& workspace);

/// Validates config and input, allocates the run directory and writes the
/// initial run.json. Throws Error("invalid-config") or Error("invalid-input").
PipelineRun start_run(const SuiteConfig& config, const Input& input);

using Observer = std::function<void(const PipelineRun&)>;

/// Executes the planned stages in order, rewriting run.json after each one.
/// A failing stage is recorded in `errors` and stops downstream stages.
void execute_run(PipelineRun& run, const SuiteConfig& config, Providers& providers, const Observer& observer = {});

/// start_run then execute_run with make_providers(config).
PipelineRun run_pipeline(const SuiteConfig& config, const Input& input);

PipelineRun load_run(const fs::path& workspace, const std::string& run_id);

nlohmann::json to_json(const PipelineRun& run);
PipelineRun run_from_json(const nlohmann::json& j);

/// Atomic (write then rename) file replacement. Throws Error("dest-unwritable").
void write_atomic(const fs::path& path, const std::string& content);

}  // namespace litpipe::pipeline

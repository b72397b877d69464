#pragma once

#include "genflow/flow.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace genflow {

/// The full report document. `generated_at` is the only field that differs
/// between two runs with identical inputs.
nlohmann::json report_to_json(const FlowReport& report,
                              const std::vector<std::string>& plot_notes = {});

/// Writes report.json, curves/*.csv and models/*.json under `out_dir`.
void emit_report(const FlowReport& report, const std::filesystem::path& out_dir,
                 const std::vector<std::string>& plot_notes = {});

/// Writes plots/*.svg. Returns notes about plots that were skipped.
std::vector<std::string> emit_plots(const FlowReport& report, const std::filesystem::path& out_dir);

/// Plots then report, so skipped-plot notes land in the report.
void emit_bundle(const FlowReport& report, const std::filesystem::path& out_dir);

/// File-name stem of a task ("main", "level_2_red_lesions", ...).
std::string task_slug(const FlowReport& report, const TaskResult& task);

// Self-contained SVG documents.
std::string dimension_plot_svg(const DimSweepResult& dims, const std::string& title);
std::string roc_plot_svg(const std::vector<RocPoint>& roc, double auc, const std::string& title);

/// Exit status: 0 ok, 1 usage or configuration, 2 data, 3 internal failure.
int run_cli(int argc, const char* const* argv);

}  // namespace genflow

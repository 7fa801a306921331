#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace aigiqa {

struct EvalReport {
    std::string dataset;
    std::string target_dim = "quality";
    double plcc = 0.0;
    double srcc = 0.0;
    double krcc = 0.0;
    std::string variant = "full";
    std::string setting;          // human-readable run setting, e.g. "ViT-B/16, 16, 6 adjectives"
    std::string config_hash;
    std::string timestamp;        // ISO-8601, supplied by the caller
    std::string checkpoint = "last";

    bool operator==(const EvalReport &) const = default;
};

enum class ReportFormat { Json, Csv, Markdown, Plot };

ReportFormat report_format_from_string(const std::string & name);

nlohmann::json to_json(const EvalReport & r);
EvalReport eval_report_from_json(const nlohmann::json & j);

/// Reports ordered by variant id (stable for equal ids).
std::vector<EvalReport> ordered_by_variant(std::vector<EvalReport> reports);

std::string render_json(const std::vector<EvalReport> & reports);
std::string render_csv(const std::vector<EvalReport> & reports);
/// Markdown table with the layout | No. | Ablation | Setting | PLCC | SRCC | KRCC |.
std::string render_markdown(const std::vector<EvalReport> & reports);

std::vector<EvalReport> parse_reports_json(const std::string & text);
std::vector<EvalReport> parse_reports_csv(const std::string & text);

/// Reads .json (object or array) or .csv reports.
std::vector<EvalReport> read_reports(const std::filesystem::path & path);

/// Writes reports in the given format. Plot renders grouped PLCC/SRCC/KRCC
/// bars per report to a PNG.
void emit_report(const std::vector<EvalReport> & reports, ReportFormat format, const std::filesystem::path & path);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ; honours SOURCE_DATE_EPOCH.
std::string utc_timestamp();

} // namespace aigiqa

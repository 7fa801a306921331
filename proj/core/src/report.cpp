#include "aigiqa/report.hpp"

#include "aigiqa/ablation.hpp"
#include "aigiqa/error.hpp"
#include "csv.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

namespace aigiqa {

namespace {

const std::vector<std::string> kCsvColumns{"dataset", "target_dim", "variant", "setting",   "plcc",
                                           "srcc",    "krcc",       "config_hash", "timestamp", "checkpoint"};

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

std::string read_file(const std::filesystem::path & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::MalformedReport, "cannot read report '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string & text, const std::filesystem::path & path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        throw Error(ErrorCode::UnwritablePath, "cannot write '" + path.string() + "'");
    }
}

void render_plot(const std::vector<EvalReport> & reports, const std::filesystem::path & path) {
    const int group_w = 120;
    const int bar_w = 28;
    const int left = 60;
    const int top = 30;
    const int plot_h = 300;
    const int width = left + group_w * static_cast<int>(reports.size()) + 40;
    const int height = top + plot_h + 90;
    cv::Mat canvas(height, width, CV_8UC3, cv::Scalar(255, 255, 255));

    const cv::Scalar axis(40, 40, 40);
    const cv::Scalar colors[3] = {cv::Scalar(180, 119, 31), cv::Scalar(14, 127, 255), cv::Scalar(44, 160, 44)};
    const char * names[3] = {"PLCC", "SRCC", "KRCC"};
    const int base_y = top + plot_h;

    for (int tick = 0; tick <= 4; ++tick) {
        const int y = base_y - tick * plot_h / 4;
        cv::line(canvas, {left - 4, y}, {width - 20, y}, cv::Scalar(220, 220, 220), 1);
        cv::putText(canvas, fixed4(tick * 0.25).substr(0, 4), {8, y + 4}, cv::FONT_HERSHEY_SIMPLEX, 0.4, axis, 1);
    }
    cv::line(canvas, {left, top}, {left, base_y}, axis, 1);
    cv::line(canvas, {left, base_y}, {width - 20, base_y}, axis, 1);

    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto & r = reports[i];
        const double values[3] = {r.plcc, r.srcc, r.krcc};
        const int x0 = left + 10 + static_cast<int>(i) * group_w;
        for (int k = 0; k < 3; ++k) {
            const double v = std::clamp(values[k], 0.0, 1.0);
            const int h = static_cast<int>(v * plot_h);
            cv::rectangle(canvas, {x0 + k * bar_w, base_y - h}, {x0 + (k + 1) * bar_w - 4, base_y}, colors[k], cv::FILLED);
        }
        std::string label = r.variant;
        if (label.size() > 16) label = label.substr(0, 16);
        if (r.checkpoint != "last") label += "*";
        cv::putText(canvas, label, {x0, base_y + 18}, cv::FONT_HERSHEY_SIMPLEX, 0.4, axis, 1);
        std::string setting = r.setting;
        if (setting.size() > 18) setting = setting.substr(0, 18);
        cv::putText(canvas, setting, {x0, base_y + 34}, cv::FONT_HERSHEY_SIMPLEX, 0.32, axis, 1);
    }
    for (int k = 0; k < 3; ++k) {
        const int x = left + k * 90;
        cv::rectangle(canvas, {x, height - 26}, {x + 12, height - 14}, colors[k], cv::FILLED);
        cv::putText(canvas, names[k], {x + 18, height - 15}, cv::FONT_HERSHEY_SIMPLEX, 0.45, axis, 1);
    }

    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), canvas);
    } catch (const cv::Exception &) {
        ok = false;
    }
    if (!ok) {
        throw Error(ErrorCode::UnwritablePath, "cannot write plot '" + path.string() + "'");
    }
}

} // namespace

ReportFormat report_format_from_string(const std::string & name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "csv") return ReportFormat::Csv;
    if (name == "markdown" || name == "md") return ReportFormat::Markdown;
    if (name == "plot" || name == "png") return ReportFormat::Plot;
    throw Error(ErrorCode::InvalidConfig, "unknown report format '" + name + "'");
}

nlohmann::json to_json(const EvalReport & r) {
    return {
        {"dataset", r.dataset},         {"target_dim", r.target_dim}, {"plcc", r.plcc},
        {"srcc", r.srcc},               {"krcc", r.krcc},             {"variant", r.variant},
        {"setting", r.setting},         {"config_hash", r.config_hash}, {"timestamp", r.timestamp},
        {"checkpoint", r.checkpoint},
    };
}

EvalReport eval_report_from_json(const nlohmann::json & j) {
    try {
        EvalReport r;
        r.dataset = j.at("dataset").get<std::string>();
        r.target_dim = j.value("target_dim", std::string("quality"));
        r.plcc = j.at("plcc").get<double>();
        r.srcc = j.at("srcc").get<double>();
        r.krcc = j.at("krcc").get<double>();
        r.variant = j.value("variant", std::string("full"));
        r.setting = j.value("setting", std::string());
        r.config_hash = j.value("config_hash", std::string());
        r.timestamp = j.value("timestamp", std::string());
        r.checkpoint = j.value("checkpoint", std::string("last"));
        return r;
    } catch (const nlohmann::json::exception & e) {
        throw Error(ErrorCode::MalformedReport, e.what());
    }
}

std::vector<EvalReport> ordered_by_variant(std::vector<EvalReport> reports) {
    std::stable_sort(reports.begin(), reports.end(), [](const EvalReport & a, const EvalReport & b) {
        return variant_rank(a.variant) < variant_rank(b.variant);
    });
    return reports;
}

std::string render_json(const std::vector<EvalReport> & reports) {
    auto arr = nlohmann::json::array();
    for (const auto & r : reports) arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
}

std::string render_csv(const std::vector<EvalReport> & reports) {
    std::string out;
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
        out += (i ? "," : "") + kCsvColumns[i];
    }
    out += "\n";
    for (const auto & r : reports) {
        out += csv::quote(r.dataset) + "," + csv::quote(r.target_dim) + "," + csv::quote(r.variant) + "," +
               csv::quote(r.setting) + "," + csv::format_number(r.plcc) + "," + csv::format_number(r.srcc) + "," +
               csv::format_number(r.krcc) + "," + csv::quote(r.config_hash) + "," + csv::quote(r.timestamp) + "," +
               csv::quote(r.checkpoint) + "\n";
    }
    return out;
}

std::string render_markdown(const std::vector<EvalReport> & reports) {
    std::string out = "| No. | Ablation | Setting | PLCC | SRCC | KRCC |\n";
    out += "|---|---|---|---|---|---|\n";
    int n = 1;
    for (const auto & r : reports) {
        std::string setting = r.setting;
        if (r.checkpoint != "last") setting += " (" + r.checkpoint + ")";
        out += "| " + std::to_string(n++) + " | " + variant_label(r.variant) + " | " + setting + " | " + fixed4(r.plcc) +
               " | " + fixed4(r.srcc) + " | " + fixed4(r.krcc) + " |\n";
    }
    return out;
}

std::vector<EvalReport> parse_reports_json(const std::string & text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception & e) {
        throw Error(ErrorCode::MalformedReport, e.what());
    }
    std::vector<EvalReport> out;
    if (j.is_array()) {
        for (const auto & item : j) out.push_back(eval_report_from_json(item));
    } else if (j.is_object()) {
        out.push_back(eval_report_from_json(j));
    } else {
        throw Error(ErrorCode::MalformedReport, "expected a report object or array");
    }
    return out;
}

std::vector<EvalReport> parse_reports_csv(const std::string & text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::MalformedReport, "empty CSV report");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = csv::split_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[csv::trim(header[i])] = i;
    for (const char * required : {"dataset", "plcc", "srcc", "krcc"}) {
        if (!col.count(required)) {
            throw Error(ErrorCode::MalformedReport, std::string("CSV report lacks column '") + required + "'");
        }
    }
    std::vector<EvalReport> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        const auto fields = csv::split_line(line);
        if (fields.size() != header.size()) {
            throw Error(ErrorCode::MalformedReport, "line " + std::to_string(line_no) + ": expected " +
                                                        std::to_string(header.size()) + " fields");
        }
        const auto get = [&](const std::string & name, const std::string & fallback) {
            const auto it = col.find(name);
            return it == col.end() ? fallback : fields[it->second];
        };
        const auto num = [&](const std::string & name) {
            double v = 0.0;
            if (!csv::parse_number(fields[col.at(name)], v)) {
                throw Error(ErrorCode::MalformedReport, "line " + std::to_string(line_no) + ": bad " + name);
            }
            return v;
        };
        EvalReport r;
        r.dataset = get("dataset", "");
        r.target_dim = get("target_dim", "quality");
        r.variant = get("variant", "full");
        r.setting = get("setting", "");
        r.plcc = num("plcc");
        r.srcc = num("srcc");
        r.krcc = num("krcc");
        r.config_hash = get("config_hash", "");
        r.timestamp = get("timestamp", "");
        r.checkpoint = get("checkpoint", "last");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<EvalReport> read_reports(const std::filesystem::path & path) {
    const std::string text = read_file(path);
    if (path.extension() == ".csv") return parse_reports_csv(text);
    return parse_reports_json(text);
}

void emit_report(const std::vector<EvalReport> & reports, ReportFormat format, const std::filesystem::path & path) {
    if (reports.empty()) {
        throw Error(ErrorCode::EmptyReportList, "no reports to emit");
    }
    switch (format) {
    case ReportFormat::Json: write_text(render_json(reports), path); break;
    case ReportFormat::Csv: write_text(render_csv(reports), path); break;
    case ReportFormat::Markdown: write_text(render_markdown(reports), path); break;
    case ReportFormat::Plot: render_plot(reports, path); break;
    }
}

std::string utc_timestamp() {
    std::time_t t = 0;
    if (const char * sde = std::getenv("SOURCE_DATE_EPOCH"); sde && *sde) {
        t = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace aigiqa

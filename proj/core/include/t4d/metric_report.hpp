#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

namespace t4d {

using Json = nlohmann::ordered_json;

// Evaluation results for a batch of sequence pairs. Stored values are raw
// mm / mm^2; the paper-style scale factors apply only when formatting the
// CSV table. Metadata records every flag-switchable convention used, so a
// report is reproducible from its own header.
struct MetricReport {
  struct Entry {
    std::string id;
    std::string mode;  // "registered" or "unregistered"
    std::vector<std::pair<std::string, double>> values;
    std::vector<std::pair<std::string, std::vector<double>>> per_frame;
  };

  std::vector<Entry> sequences;
  Json metadata = Json::object();
};

// Reporting scale factor of a metric: the table column lists value / scale,
// i.e. "dtw x 1e-2 (mm)" columns hold raw_mm / 1e-2.
double metric_scale(const std::string& metric);
double scaled_for_display(const std::string& metric, double raw_value);
std::string scaled_column_name(const std::string& metric);

// Full report tree: metadata, per-sequence entries, aggregate mean/std.
Json report_to_json(const MetricReport& report);

// Deterministic writer: keys in stored order, every float printed with
// %.12g. Two runs over identical inputs yield byte-identical files.
std::string dump_json(const Json& value, int indent = 2);

void write_report_json(const std::filesystem::path& path, const MetricReport& report);
void write_report_csv(const std::filesystem::path& path, const MetricReport& report);

Json load_json(const std::filesystem::path& path);

}  // namespace t4d

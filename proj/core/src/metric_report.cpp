#include "t4d/metric_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "t4d/errors.hpp"

namespace t4d {

double metric_scale(const std::string& metric) {
  if (metric == "dtw") return 1e-2;
  if (metric == "frechet") return 1e-3;
  if (metric == "delta_m") return 1e-6;
  return 1.0;
}

double scaled_for_display(const std::string& metric, double raw_value) {
  return raw_value / metric_scale(metric);
}

std::string scaled_column_name(const std::string& metric) {
  if (metric == "dtw") return "dtw_x1e-2_mm";
  if (metric == "frechet") return "dfd_x1e-3_mm";
  if (metric == "delta_m") return "delta_m_x1e-6_mm2";
  return metric;
}

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "null";
  if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  // keep the token a JSON float so it round-trips as one
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void dump_value(std::ostringstream& out, const Json& value, int indent, int depth) {
  const std::string pad(static_cast<size_t>(depth) * indent, ' ');
  const std::string pad_in(static_cast<size_t>(depth + 1) * indent, ' ');
  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out << ",\n";
        first = false;
        out << pad_in << Json(it.key()).dump() << ": ";
        dump_value(out, it.value(), indent, depth + 1);
      }
      out << "\n" << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out << "[]";
        return;
      }
      out << "[\n";
      bool first = true;
      for (const auto& item : value) {
        if (!first) out << ",\n";
        first = false;
        out << pad_in;
        dump_value(out, item, indent, depth + 1);
      }
      out << "\n" << pad << "]";
      return;
    }
    case Json::value_t::number_float:
      out << format_double(value.get<double>());
      return;
    default:
      out << value.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::ostringstream out;
  dump_value(out, value, indent, 0);
  out << "\n";
  return out.str();
}

Json report_to_json(const MetricReport& report) {
  Json root = Json::object();
  root["metadata"] = report.metadata;

  Json sequences = Json::array();
  for (const auto& entry : report.sequences) {
    Json e = Json::object();
    e["id"] = entry.id;
    e["mode"] = entry.mode;
    Json values = Json::object();
    for (const auto& [name, v] : entry.values) values[name] = v;
    e["metrics"] = values;
    if (!entry.per_frame.empty()) {
      Json pf = Json::object();
      for (const auto& [name, arr] : entry.per_frame) pf[name] = arr;
      e["per_frame"] = pf;
    }
    sequences.push_back(std::move(e));
  }
  root["sequences"] = std::move(sequences);

  // aggregate mean and population std per metric, in first-seen order
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> samples;
  for (const auto& entry : report.sequences) {
    for (const auto& [name, v] : entry.values) {
      if (!samples.count(name)) order.push_back(name);
      samples[name].push_back(v);
    }
  }
  Json aggregate = Json::object();
  for (const std::string& name : order) {
    const auto& xs = samples[name];
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    Json stats = Json::object();
    stats["mean"] = mean;
    stats["std"] = std::sqrt(var);
    aggregate[name] = std::move(stats);
  }
  root["aggregate"] = std::move(aggregate);
  return root;
}

void write_report_json(const std::filesystem::path& path,
                       const MetricReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << dump_json(report_to_json(report));
  if (!out) throw ValidationError("write failed for " + path.string());
}

void write_report_csv(const std::filesystem::path& path,
                      const MetricReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());

  std::vector<std::string> columns;
  for (const auto& entry : report.sequences) {
    for (const auto& [name, v] : entry.values) {
      if (std::find(columns.begin(), columns.end(), name) == columns.end()) {
        columns.push_back(name);
      }
    }
  }

  out << "sequence";
  for (const auto& name : columns) out << "," << scaled_column_name(name);
  out << "\n";
  for (const auto& entry : report.sequences) {
    out << entry.id;
    for (const auto& name : columns) {
      out << ",";
      for (const auto& [n, v] : entry.values) {
        if (n == name) {
          char buf[40];
          std::snprintf(buf, sizeof(buf), "%.12g", scaled_for_display(name, v));
          out << buf;
          break;
        }
      }
    }
    out << "\n";
  }
  if (!out) throw ValidationError("write failed for " + path.string());
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace t4d

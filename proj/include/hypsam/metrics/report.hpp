#pragma once

#include <string>

#include "hypsam/metrics/metrics.hpp"

namespace hypsam::metrics {

// Named dataset-level result, as serialized to report.json / consumed by
// plot-pr.
struct NamedReport {
    std::string name;
    MetricReport report;
};

void write_report_json(const std::string& path, const NamedReport& r,
                       bool include_per_image = true);
NamedReport read_report_json(const std::string& path);  // throws MalformedReport

void write_report_csv(const std::string& path, const NamedReport& r);
void write_per_image_csv(const std::string& path, const MetricReport& r);
void write_pr_csv(const std::string& path, const PrCurve& pr);

// human-readable table printed by cmd_eval
std::string format_table(const NamedReport& r);

}  // namespace hypsam::metrics

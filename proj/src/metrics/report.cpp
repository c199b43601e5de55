#include "hypsam/metrics/report.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "hypsam/core/errors.hpp"

namespace hypsam::metrics {

using nlohmann::json;

namespace {

json scalars_to_json(const MetricReport& m) {
    return json{{"f_avg", m.f_avg}, {"f_max", m.f_max},     {"f_adp", m.f_adp},
                {"f_w", m.f_w},     {"mae", m.mae},         {"e_m", m.e_m},
                {"e_m_max", m.e_m_max}, {"s_m", m.s_m}};
}

}  // namespace

void write_report_json(const std::string& path, const NamedReport& r, bool include_per_image) {
    json j;
    j["name"] = r.name;
    j["images"] = r.report.images;
    j["scalars"] = scalars_to_json(r.report);
    j["pr"] = {{"thresholds", r.report.pr.thresholds},
               {"precision", r.report.pr.precision},
               {"recall", r.report.pr.recall}};
    if (!r.report.attribute_fw.empty()) {
        json attrs = json::array();
        for (const auto& [tag, fw] : r.report.attribute_fw)
            attrs.push_back({{"attribute", tag}, {"f_w", fw}});
        j["attributes"] = attrs;
    }
    if (include_per_image) {
        json rows = json::array();
        for (const auto& img : r.report.per_image) {
            rows.push_back({{"name", img.name},
                            {"f_avg", img.f_avg},
                            {"f_max", img.f_max},
                            {"f_adp", img.f_adp},
                            {"f_w", img.f_w},
                            {"mae", img.mae},
                            {"e_m", img.e_m},
                            {"e_m_max", img.e_m_max},
                            {"s_m", img.s_m}});
        }
        j["per_image"] = rows;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot write report: " + path);
    out << j.dump(2) << "\n";
}

NamedReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MalformedReport("cannot open " + path);
    json j;
    try {
        in >> j;
        NamedReport r;
        r.name = j.at("name").get<std::string>();
        r.report.images = j.at("images").get<int>();
        const json& s = j.at("scalars");
        r.report.f_avg = s.at("f_avg").get<double>();
        r.report.f_max = s.at("f_max").get<double>();
        r.report.f_adp = s.value("f_adp", 0.0);
        r.report.f_w = s.at("f_w").get<double>();
        r.report.mae = s.at("mae").get<double>();
        r.report.e_m = s.at("e_m").get<double>();
        r.report.e_m_max = s.value("e_m_max", 0.0);
        r.report.s_m = s.at("s_m").get<double>();
        r.report.pr.thresholds = j.at("pr").at("thresholds").get<std::vector<double>>();
        r.report.pr.precision = j.at("pr").at("precision").get<std::vector<double>>();
        r.report.pr.recall = j.at("pr").at("recall").get<std::vector<double>>();
        if (r.report.pr.precision.size() != r.report.pr.thresholds.size() ||
            r.report.pr.recall.size() != r.report.pr.thresholds.size())
            throw MalformedReport("pr arrays have inconsistent lengths in " + path);
        return r;
    } catch (const json::exception& e) {
        throw MalformedReport(path + ": " + e.what());
    }
}

void write_report_csv(const std::string& path, const NamedReport& r) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write report: " + path);
    out << "name,images,f_avg,f_max,f_adp,f_w,mae,e_m,e_m_max,s_m\n";
    const auto& m = r.report;
    out << r.name << "," << m.images << "," << m.f_avg << "," << m.f_max << "," << m.f_adp << ","
        << m.f_w << "," << m.mae << "," << m.e_m << "," << m.e_m_max << "," << m.s_m << "\n";
}

void write_per_image_csv(const std::string& path, const MetricReport& r) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write report: " + path);
    out << "name,f_avg,f_max,f_adp,f_w,mae,e_m,e_m_max,s_m\n";
    for (const auto& img : r.per_image)
        out << img.name << "," << img.f_avg << "," << img.f_max << "," << img.f_adp << ","
            << img.f_w << "," << img.mae << "," << img.e_m << "," << img.e_m_max << ","
            << img.s_m << "\n";
}

void write_pr_csv(const std::string& path, const PrCurve& pr) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write report: " + path);
    out << "threshold,precision,recall\n";
    for (int i = 0; i < pr.size(); ++i)
        out << pr.thresholds[i] << "," << pr.precision[i] << "," << pr.recall[i] << "\n";
}

std::string format_table(const NamedReport& r) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-16s %6s %7s %7s %7s %7s %7s %7s %7s\n", "method", "imgs",
                  "F_avg", "F_max", "F_w", "MAE", "E_m", "S_m", "F_adp");
    os << buf;
    const auto& m = r.report;
    std::snprintf(buf, sizeof(buf), "%-16s %6d %7.4f %7.4f %7.4f %7.4f %7.4f %7.4f %7.4f\n",
                  r.name.c_str(), m.images, m.f_avg, m.f_max, m.f_w, m.mae, m.e_m, m.s_m, m.f_adp);
    os << buf;
    if (!m.attribute_fw.empty()) {
        os << "per-attribute F_w:\n";
        for (const auto& [tag, fw] : m.attribute_fw) {
            std::snprintf(buf, sizeof(buf), "  %-6s %7.4f\n", tag.c_str(), fw);
            os << buf;
        }
    }
    return os.str();
}

}  // namespace hypsam::metrics

#include "fsl/bench.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fsl {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json config_json(const ExperimentConfig& c) {
    return {
        {"experiment", to_string(c.experiment)},
        {"n", c.n},
        {"L", c.L},
        {"kappa", c.kappa},
        {"iterations", c.iterations},
        {"tol", c.tol},
        {"tol_points", c.tol_points},
        {"repeats", c.repeats},
        {"seed", c.seed},
        {"backend", to_string(c.backends)},
        {"dim", c.dim},
        {"parallel_repeats", c.parallel_repeats},
        {"reconstruct_cap", c.reconstruct_cap},
    };
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
    return end && *end == '\0';
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json values = nlohmann::json::object();
        for (const auto& [k, v] : r.values) values[k] = v;
        rows.push_back({{"kind", r.kind},
                        {"index", r.index},
                        {"L", r.L},
                        {"backend", r.backend},
                        {"values", values}});
    }
    nlohmann::json j = {{"version", report.version},
                        {"config", config_json(report.config)},
                        {"cap_hit", report.cap_hit},
                        {"rows", rows}};
    return j.dump(2) + "\n";
}

std::string report_to_csv(const ExperimentReport& report) {
    std::set<std::string> keys;
    for (const auto& r : report.rows) {
        for (const auto& kv : r.values) keys.insert(kv.first);
    }
    std::ostringstream os;
    os << "# version=" << report.version << "\n";
    os << "# config=" << config_json(report.config).dump() << "\n";
    os << "kind,index,L,backend";
    for (const auto& k : keys) os << ',' << k;
    os << '\n';
    for (const auto& r : report.rows) {
        os << r.kind << ',' << r.index << ',' << r.L << ',' << r.backend;
        for (const auto& k : keys) {
            os << ',';
            if (auto it = r.values.find(k); it != r.values.end()) os << format_double(it->second);
        }
        os << '\n';
    }
    return os.str();
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<std::string> header;
    std::vector<ReportRow> rows;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv_line(line);
        if (header.empty()) {
            header = std::move(cells);
            if (header.size() < 4 || header[0] != "kind") {
                throw ConfigError("report CSV: unexpected header");
            }
            continue;
        }
        if (cells.size() != header.size()) throw ConfigError("report CSV: ragged row");
        ReportRow row;
        row.kind = cells[0];
        row.index = std::stoi(cells[1]);
        row.L = std::stoi(cells[2]);
        row.backend = cells[3];
        for (std::size_t c = 4; c < cells.size(); ++c) {
            if (cells[c].empty()) continue;
            double v = 0.0;
            if (!parse_number(cells[c], v)) throw ConfigError("report CSV: bad number " + cells[c]);
            row.values[header[c]] = v;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Vector parse_scores(const std::string& text) {
    const std::string body = trim(text);
    std::vector<double> values;
    if (!body.empty() && body.front() == '[') {
        try {
            const auto j = nlohmann::json::parse(body);
            for (const auto& v : j) values.push_back(v.get<double>());
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("scores JSON: ") + e.what());
        }
    } else {
        std::istringstream is(body);
        std::string line;
        bool first = true;
        while (std::getline(is, line)) {
            line = trim(line);
            if (line.empty()) continue;
            const std::string cell = trim(line.substr(0, line.find(',')));
            double v = 0.0;
            if (!parse_number(cell, v)) {
                if (first) {
                    first = false;
                    continue;
                }
                throw ConfigError("scores CSV: bad number " + cell);
            }
            first = false;
            values.push_back(v);
        }
    }
    if (values.empty()) throw ConfigError("no scores in input");
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace fsl

#include "sbench/records.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sbench/errors.hpp"

namespace sbench {

std::string utc_timestamp_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string to_json_line(const RunRecord& rec) {
    nlohmann::json j;
    j["benchmark"] = rec.benchmark;
    j["config"] = rec.config;
    j["timestamp"] = rec.timestamp;
    j["wall_seconds"] = rec.wall_seconds;
    j["metric"] = rec.metric_name;
    j["value"] = rec.metric_value;
    j["work_units"] = rec.work_units;
    j["checksum"] = rec.checksum;
    j["run_index"] = rec.run_index;
    j["runs"] = rec.runs;
    j["best_of"] = rec.best_of;
    return j.dump();
}

RunRecord record_from_json_line(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    RunRecord rec;
    rec.benchmark = j.at("benchmark").get<std::string>();
    rec.config = j.at("config").get<std::map<std::string, std::string>>();
    rec.timestamp = j.at("timestamp").get<std::string>();
    rec.wall_seconds = j.at("wall_seconds").get<double>();
    rec.metric_name = j.at("metric").get<std::string>();
    rec.metric_value = j.at("value").get<double>();
    rec.work_units = j.at("work_units").get<std::uint64_t>();
    rec.checksum = j.at("checksum").get<double>();
    rec.run_index = j.at("run_index").get<int>();
    rec.runs = j.at("runs").get<int>();
    rec.best_of = j.at("best_of").get<std::string>();
    return rec;
}

void append_record(const std::string& path, const RunRecord& rec) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw ConfigError("cannot open record file '" + path + "'");
    out << to_json_line(rec) << '\n';
}

std::vector<RunRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open record file '" + path + "'");
    std::vector<RunRecord> recs;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) recs.push_back(record_from_json_line(line));
    return recs;
}

std::string format_dat_line(double x, double y) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", x, y);
    return buf;
}

struct DatWriter::FileHandle {
    std::ofstream stream;
};

DatWriter::DatWriter(const std::string& path, bool append)
    : out_(new FileHandle) {
    out_->stream.open(path, append ? std::ios::app : std::ios::trunc);
    if (!out_->stream) {
        delete out_;
        throw ConfigError("cannot open dat file '" + path + "'");
    }
}

DatWriter::~DatWriter() { delete out_; }

void DatWriter::point(double x, double y) {
    out_->stream << format_dat_line(x, y);
}

}  // namespace sbench

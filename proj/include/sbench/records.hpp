#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sbench {

/// One reported benchmark measurement. The metric is recomputable from the
/// work/seconds pair it carries.
struct RunRecord {
    std::string benchmark;
    std::map<std::string, std::string> config;  // flat snapshot
    std::string timestamp;                      // UTC, ISO 8601
    double wall_seconds = 0.0;
    std::string metric_name;  // "glups" | "gbps" | "seconds"
    double metric_value = 0.0;
    std::uint64_t work_units = 0;  // lattice updates or bytes moved
    double checksum = 0.0;
    int run_index = 0;  // which repetition is being reported
    int runs = 1;
    std::string best_of;  // policy, e.g. "min-time" / "max-glups"
};

std::string utc_timestamp_now();

std::string to_json_line(const RunRecord& rec);
RunRecord record_from_json_line(const std::string& line);

/// Appends one JSON line; records are append-only, re-running never
/// overwrites earlier measurements.
void append_record(const std::string& path, const RunRecord& rec);

std::vector<RunRecord> load_records(const std::string& path);

/// gnuplot-ready series: one "<x> <y>\n" line per point.
class DatWriter {
  public:
    DatWriter(const std::string& path, bool append);
    ~DatWriter();

    void point(double x, double y);

  private:
    struct FileHandle;
    FileHandle* out_;
};

std::string format_dat_line(double x, double y);

}  // namespace sbench

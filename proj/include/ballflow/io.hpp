#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ballflow/curvature.hpp"
#include "ballflow/flow.hpp"
#include "ballflow/packing.hpp"

namespace ballflow {

inline constexpr const char* kVersion = "1.0.0";

/// Shortest form that round-trips: 17 significant digits.
std::string format_real(double x);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// One positive decimal per line; '#' comments and blank lines are skipped.
PackingVector parse_radii(const std::string& text);
std::vector<double> parse_reals(const std::string& text);  // any finite reals, same layout
std::string format_radii(std::span<const double> r);

std::string trace_csv_header(std::size_t n);
std::string format_trace_csv(const FlowTrace& trace);

struct TraceRow {
    double t = 0.0;
    std::vector<double> r;
    std::vector<double> k;
    double lambda = 0.0;
    double s = 0.0;
    double l1 = 0.0;
    double min_q = 0.0;
    double min_ratio = 0.0;
    std::size_t n_virtual = 0;
};

/// Parses a CSV produced by format_trace_csv.
std::vector<TraceRow> parse_trace_csv(const std::string& text);

/// Line-oriented text record: "key value..." per line.
std::string format_curvature_report(const CurvatureReport& rep, bool extended);
/// Columns: vertex, radius, K.
std::string format_curvature_csv(const CurvatureReport& rep, const PackingVector& r);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string digest(const std::string& bytes);

class RunManifest {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value) { set(key, format_real(value)); }
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    std::string text() const;

    /// "<output>.manifest" beside the output file.
    static std::filesystem::path path_for(const std::filesystem::path& output);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// UTC ISO-8601 time stamp.
std::string timestamp_now();

}  // namespace ballflow

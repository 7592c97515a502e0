#include "ballflow/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "ballflow/error.hpp"

namespace ballflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& tok, int line, int column) {
    double x = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc() || ptr != last) throw ParseError(line, column, "expected a number, got '" + tok + "'");
    if (!std::isfinite(x)) throw ParseError(line, column, "value is not finite");
    return x;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(trim(cell));
    return out;
}

}  // namespace

std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("write failed for " + path.string());
}

std::vector<double> parse_reals(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string tok = trim(raw);
        if (tok.empty()) continue;
        const int column = static_cast<int>(raw.find_first_not_of(" \t")) + 1;
        out.push_back(parse_double(tok, line, column));
    }
    return out;
}

PackingVector parse_radii(const std::string& text) {
    std::vector<double> r = parse_reals(text);
    for (std::size_t i = 0; i < r.size(); ++i)
        if (!(r[i] > 0.0)) throw InputError("radius " + std::to_string(i) + " is not positive");
    if (r.empty()) throw InputError("radii file is empty");
    return PackingVector(std::move(r));
}

std::string format_radii(std::span<const double> r) {
    std::string out;
    for (double x : r) out += format_real(x) + "\n";
    return out;
}

std::string trace_csv_header(std::size_t n) {
    std::string h = "t";
    for (std::size_t i = 0; i < n; ++i) h += ",r_" + std::to_string(i);
    for (std::size_t i = 0; i < n; ++i) h += ",K_" + std::to_string(i);
    h += ",lambda,S,l1,minQ,min_ratio,n_virtual";
    return h;
}

std::string format_trace_csv(const FlowTrace& trace) {
    const std::size_t n = trace.records.empty() ? 0 : trace.records.front().r.size();
    std::string out = trace_csv_header(n) + "\n";
    for (const FlowRecord& rec : trace.records) {
        out += format_real(rec.t);
        for (double x : rec.r) out += "," + format_real(x);
        for (double x : rec.k) out += "," + format_real(x);
        out += "," + format_real(rec.lambda) + "," + format_real(rec.s) + "," + format_real(rec.l1) + "," +
               format_real(rec.min_q) + "," + format_real(rec.min_ratio) + "," +
               std::to_string(rec.virtual_tets.size()) + "\n";
    }
    return out;
}

std::vector<TraceRow> parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    if (!std::getline(in, raw)) throw ParseError(1, 1, "missing header");
    const auto header = split_csv(trim(raw));
    if (header.size() < 7 || (header.size() - 7) % 2 != 0 || header.front() != "t")
        throw ParseError(1, 1, "unrecognised trace header");
    const std::size_t n = (header.size() - 7) / 2;
    if (trim(raw) != trace_csv_header(n)) throw ParseError(1, 1, "unrecognised trace header");

    std::vector<TraceRow> rows;
    int line = 1;
    while (std::getline(in, raw)) {
        ++line;
        if (trim(raw).empty()) continue;
        const auto cells = split_csv(trim(raw));
        if (cells.size() != header.size())
            throw ParseError(line, 1, "expected " + std::to_string(header.size()) + " columns");
        std::vector<double> v(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) v[c] = parse_double(cells[c], line, static_cast<int>(c) + 1);
        TraceRow row;
        row.t = v[0];
        row.r.assign(v.begin() + 1, v.begin() + 1 + n);
        row.k.assign(v.begin() + 1 + n, v.begin() + 1 + 2 * n);
        row.lambda = v[2 * n + 1];
        row.s = v[2 * n + 2];
        row.l1 = v[2 * n + 3];
        row.min_q = v[2 * n + 4];
        row.min_ratio = v[2 * n + 5];
        row.n_virtual = static_cast<std::size_t>(v[2 * n + 6]);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_curvature_report(const CurvatureReport& rep, bool extended) {
    std::string out;
    out += std::string("mode ") + (extended ? "extended" : "real") + "\n";
    for (std::size_t i = 0; i < rep.k.size(); ++i) out += "K " + std::to_string(i) + " " + format_real(rep.k[i]) + "\n";
    out += "S " + format_real(rep.s) + "\n";
    out += "lambda " + format_real(rep.lambda) + "\n";
    out += "l1 " + format_real(rep.l1) + "\n";
    out += "minQ " + format_real(rep.min_q) + "\n";
    out += "virtual_tets " + std::to_string(rep.virtual_tets.size()) + "\n";
    for (const VirtualTet& v : rep.virtual_tets)
        out += "virtual " + std::to_string(v.tet) + " apex " + std::to_string(v.apex) + "\n";
    return out;
}

std::string format_curvature_csv(const CurvatureReport& rep, const PackingVector& r) {
    std::string out = "vertex,radius,K\n";
    for (std::size_t i = 0; i < rep.k.size(); ++i)
        out += std::to_string(i) + "," + format_real(r[i]) + "," + format_real(rep.k[i]) + "\n";
    return out;
}

std::string digest(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RunManifest::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

std::string RunManifest::text() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
}

std::filesystem::path RunManifest::path_for(const std::filesystem::path& output) {
    std::filesystem::path p = output;
    p += ".manifest";
    return p;
}

std::string timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

}  // namespace ballflow

#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "coadjoint/diagnostics.hpp"
#include "coadjoint/noise.hpp"
#include "coadjoint/trajectory.hpp"

namespace coadjoint {

// Shortest decimal that parses back to the same binary double; CSV output is
// therefore bitwise round-trippable.
inline std::string format_double(double x) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double x = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc() || res.ptr != last)
        throw std::runtime_error("csv: malformed number '" + s + "'");
    return x;
}

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("csv: cannot open " + path.string() + " for writing");
    return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace detail

// Columns: t, each dual coordinate by name, each Casimir by name, hamiltonian.
// Thinning keeps every record_every-th row plus the final state.
inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                                 const std::vector<std::string>& coord_names,
                                 std::int64_t record_every = 1) {
    if (record_every < 1) throw std::invalid_argument("write_trajectory_csv: record_every >= 1");
    auto out = detail::open_csv(path);
    out << "t";
    for (const auto& n : coord_names) out << ',' << n;
    for (const auto& n : traj.casimir_names) out << ',' << n;
    out << ",hamiltonian\n";
    const std::size_t last = traj.times.size() - 1;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (k % std::size_t(record_every) != 0 && k != last) continue;
        out << format_double(traj.times[k]);
        for (double x : traj.states[k]) out << ',' << format_double(x);
        for (const auto& series : traj.casimir_series) out << ',' << format_double(series[k]);
        out << ',' << format_double(traj.hamiltonian_series[k]) << '\n';
    }
}

inline void write_meta_csv(const std::filesystem::path& path, const Trajectory& traj) {
    auto out = detail::open_csv(path);
    out << "step,t,chord_iters,residual\n";
    for (std::size_t k = 0; k < traj.steps.size(); ++k)
        out << k << ',' << format_double(traj.times[k + 1]) << ',' << traj.steps[k].chord_iters
            << ',' << format_double(traj.steps[k].residual_norm) << '\n';
}

inline void write_drift_csv(const std::filesystem::path& path, const Trajectory& traj) {
    const auto series = drift_series(traj);
    auto out = detail::open_csv(path);
    out << "t,casimir_name,rel_error\n";
    for (const auto& [name, drift] : series)
        for (std::size_t k = 0; k < drift.size(); ++k)
            out << format_double(traj.times[k]) << ',' << name << ',' << format_double(drift[k])
                << '\n';
}

inline void write_wiener_csv(const std::filesystem::path& path, const WienerPath& w) {
    auto out = detail::open_csv(path);
    out << "step,driver,dw\n";
    for (std::int64_t k = 0; k < w.grid().steps; ++k)
        for (int i = 0; i < w.m(); ++i)
            out << k << ',' << i << ',' << format_double(w.dw(k, i)) << '\n';
}

// Reads increments exported by write_wiener_csv back onto the given grid.
inline WienerPath read_wiener_csv(const std::filesystem::path& path, int m, const TimeGrid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open " + path.string() + " for reading");
    std::string line;
    if (!std::getline(in, line) || detail::split_csv_line(line) !=
                                       std::vector<std::string>{"step", "driver", "dw"})
        throw std::runtime_error("csv: " + path.string() + " lacks the step,driver,dw header");
    const std::size_t total = std::size_t(grid.steps) * std::size_t(m);
    std::vector<double> incs(total, std::numeric_limits<double>::quiet_NaN());
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 3)
            throw std::runtime_error("csv: malformed replay row '" + line + "'");
        const auto step = std::int64_t(parse_double(fields[0]));
        const auto driver = int(parse_double(fields[1]));
        if (step < 0 || step >= grid.steps || driver < 0 || driver >= m)
            throw std::runtime_error("csv: replay row out of range '" + line + "'");
        const std::size_t idx = std::size_t(step) * std::size_t(m) + std::size_t(driver);
        if (incs[idx] == incs[idx])  // already assigned (NaN sentinel)
            throw std::runtime_error("csv: duplicate replay row '" + line + "'");
        incs[idx] = parse_double(fields[2]);
        ++seen;
    }
    if (seen != total)
        throw std::runtime_error("csv: replay file covers " + std::to_string(seen) +
                                 " increments, expected " + std::to_string(total));
    return WienerPath(grid, m, std::move(incs), 0, 0);
}

inline void write_order_fit_csv(const std::filesystem::path& path, const OrderFit& fit) {
    auto out = detail::open_csv(path);
    out << "dt,mean_error,n\n";
    for (std::size_t l = 0; l < fit.dts.size(); ++l)
        out << format_double(fit.dts[l]) << ',' << format_double(fit.errors[l]) << ','
            << fit.level_counts[l] << '\n';
}

inline void write_stability_csv(const std::filesystem::path& path, const StabilityReport& report) {
    auto out = detail::open_csv(path);
    out << "dt,verdict\n";
    for (const auto& [dt, verdict] : report.verdicts)
        out << format_double(dt) << ',' << to_string(verdict) << '\n';
}

// Side-by-side drift columns, one per (method, casimir) pair.
inline void write_compare_csv(const std::filesystem::path& path, const Vec& times,
                              const std::vector<std::string>& column_names,
                              const std::vector<Vec>& columns) {
    if (column_names.size() != columns.size())
        throw std::invalid_argument("write_compare_csv: column count mismatch");
    auto out = detail::open_csv(path);
    out << "t";
    for (const auto& n : column_names) out << ',' << n;
    out << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << format_double(times[k]);
        for (const auto& col : columns) {
            if (col.size() != times.size())
                throw std::invalid_argument("write_compare_csv: column length mismatch");
            out << ',' << format_double(col[k]);
        }
        out << '\n';
    }
}

}  // namespace coadjoint

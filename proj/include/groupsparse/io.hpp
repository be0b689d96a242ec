#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "groupsparse/data.hpp"
#include "groupsparse/dictionary.hpp"
#include "groupsparse/error.hpp"
#include "groupsparse/problem.hpp"
#include "groupsparse/solver.hpp"
#include "groupsparse/stability.hpp"

#include <nlohmann/json.hpp>

namespace groupsparse {

/// Shortest round-trip decimal representation; keeps CSV payloads
/// byte-stable across runs of the same build.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return s;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    require(out.good(), errc::io_failure, "cannot open " + path.string() + " for writing");
    return out;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = open_output(path);
    out << j.dump(2) << "\n";
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), errc::io_failure, "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(errc::bad_config, path.string() + ": " + e.what());
    }
    return j;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    auto out = open_output(path);
    for (std::size_t j = 0; j < header.size(); ++j)
        out << (j ? "," : "") << header[j];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
        out << "\n";
    }
    require(out.good(), errc::io_failure, "write failed for " + path.string());
}

/// Dictionary as CSV: header row of canonical column names, one data row per
/// sample.
inline void dictionary_to_csv(const Dictionary& d, const std::filesystem::path& path) {
    std::vector<std::string> header;
    for (std::size_t j = 0; j < d.cols(); ++j) header.push_back(d.column_name(j));
    std::vector<std::vector<std::string>> rows(d.rows());
    for (std::size_t i = 0; i < d.rows(); ++i) {
        rows[i].reserve(d.cols());
        for (std::size_t j = 0; j < d.cols(); ++j) rows[i].push_back(format_double(d.matrix(i, j)));
    }
    write_csv(path, header, rows);
}

inline void series_to_csv(const TimeSeriesSet& ts, const std::filesystem::path& path) {
    std::vector<std::string> header = {"t"};
    for (const auto& [name, v] : ts.series) header.push_back(name);
    std::vector<std::vector<std::string>> rows(ts.t.size());
    for (std::size_t i = 0; i < ts.t.size(); ++i) {
        rows[i].push_back(format_double(ts.t[i]));
        for (const auto& [name, v] : ts.series) rows[i].push_back(format_double(v[i]));
    }
    write_csv(path, header, rows);
}

/// Field as CSV: one row per sample with coordinates, time, and species
/// values.
inline void field_to_csv(const SpatioTemporalField& f, const std::filesystem::path& path) {
    std::vector<std::string> header = {"x"};
    if (!f.is_1d()) header.push_back("y");
    header.push_back("t");
    for (const auto& s : f.species) header.push_back(s);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(f.nx * f.ny * f.nt);
    for (std::size_t it = 0; it < f.nt; ++it)
        for (std::size_t iy = 0; iy < f.ny; ++iy)
            for (std::size_t ix = 0; ix < f.nx; ++ix) {
                std::vector<std::string> row;
                row.push_back(format_double(f.x(ix)));
                if (!f.is_1d()) row.push_back(format_double(f.y(iy)));
                row.push_back(format_double(f.t[it]));
                for (std::size_t s = 0; s < f.species.size(); ++s)
                    row.push_back(format_double(f.at(s, ix, iy, it)));
                rows.push_back(std::move(row));
            }
    write_csv(path, header, rows);
}

/// Stability path as long-format CSV: lambda, group, importance.
inline void path_to_csv(const StabilityPath& path, const std::filesystem::path& file) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t li = 0; li < path.lambdas.size(); ++li)
        for (std::size_t g = 0; g < path.group_names.size(); ++g)
            rows.push_back({format_double(path.lambdas[li]), path.group_names[g],
                            format_double(path.importance(g, li))});
    write_csv(file, {"lambda", "group", "importance"}, rows);
}

inline void curve_to_csv(const AchievabilityCurve& curve, const std::filesystem::path& file) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& pt : curve.points)
        rows.push_back({format_double(pt.x), format_double(pt.success_prob),
                        format_double(pt.band)});
    write_csv(file, {"x", "success_prob", "band"}, rows);
}

inline nlohmann::json estimate_to_json(const ModelEstimate& est, const Dictionary& dict) {
    nlohmann::json support = nlohmann::json::array();
    for (std::size_t i = 0; i < est.support_groups.size(); ++i)
        support.push_back({{"group", est.support_names[i]}});
    nlohmann::json cols = nlohmann::json::array();
    for (std::size_t j : est.support_columns)
        cols.push_back({{"index", j + 1},
                        {"name", dict.column_name(j)},
                        {"coefficient", est.coefficients[j]}});
    return {{"support_groups", support},
            {"support_columns", cols},
            {"residual_norm", est.residual_norm},
            {"iterations", est.iterations_used},
            {"converged", est.converged},
            {"lambda", est.lambda},
            {"warnings", est.warnings}};
}

/// Problem directory: matrix CSV, target CSV, groups JSON and metadata JSON.
inline void problem_to_dir(const RegressionProblem& p, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    dictionary_to_csv(p.dict, dir / "matrix.csv");
    std::vector<std::vector<std::string>> rows(p.target.size());
    for (std::size_t i = 0; i < p.target.size(); ++i) rows[i] = {format_double(p.target[i])};
    write_csv(dir / "target.csv", {"target"}, rows);
    write_json(dir / "groups.json", p.groups.to_json());
    write_json(dir / "metadata.json", p.metadata);
}

}  // namespace groupsparse

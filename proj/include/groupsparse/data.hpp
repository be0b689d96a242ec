#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "groupsparse/error.hpp"
#include "groupsparse/matrix.hpp"

namespace groupsparse {

/// Named concentration time courses on a shared time grid.
struct TimeSeriesSet {
    Vector t;
    std::vector<std::pair<std::string, Vector>> series;

    const Vector& get(const std::string& name) const {
        for (const auto& [n, v] : series)
            if (n == name) return v;
        throw Error(errc::invalid_argument, "no series named " + name);
    }

    Vector& get(const std::string& name) {
        for (auto& [n, v] : series)
            if (n == name) return v;
        throw Error(errc::invalid_argument, "no series named " + name);
    }

    bool has(const std::string& name) const {
        for (const auto& [n, v] : series)
            if (n == name) return true;
        return false;
    }
};

/// Periodic regular-grid field data, 1D (ny == 1) or 2D, for one or more
/// species. Sample layout is x-fastest: index (ix, iy, it).
struct SpatioTemporalField {
    std::size_t nx = 0, ny = 1, nt = 0;
    double lx = 0.0, ly = 0.0;  // domain lengths (periodic)
    double x0 = 0.0, y0 = 0.0;  // coordinate origins
    Vector t;
    std::vector<std::string> species;
    std::vector<Vector> values;  // one array of size nx*ny*nt per species
    std::vector<std::string> notes;

    bool is_1d() const { return ny == 1; }
    double dx() const { return lx / static_cast<double>(nx); }
    double dy() const { return ly / static_cast<double>(ny); }
    double x(std::size_t ix) const { return x0 + dx() * static_cast<double>(ix); }
    double y(std::size_t iy) const { return y0 + dy() * static_cast<double>(iy); }

    std::size_t index(std::size_t ix, std::size_t iy, std::size_t it) const {
        return (it * ny + iy) * nx + ix;
    }

    double at(std::size_t s, std::size_t ix, std::size_t iy, std::size_t it) const {
        return values[s][index(ix, iy, it)];
    }

    std::size_t species_index(const std::string& name) const {
        for (std::size_t s = 0; s < species.size(); ++s)
            if (species[s] == name) return s;
        throw Error(errc::invalid_argument, "no species named " + name);
    }
};

}  // namespace groupsparse

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace whitlyap {

// A point of the ambient space, one coordinate per axis.
using Point = std::vector<double>;

inline double sqr(double v) { return v * v; }

inline std::string point_str(const Point& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p[i]);
    }
    return s + ")";
}

inline void check_dim(const Point& p, std::size_t dim, const char* what) {
    if (p.size() != dim)
        throw std::invalid_argument(std::string(what) + ": point has dimension " +
                                    std::to_string(p.size()) + ", expected " + std::to_string(dim));
}

// Reduce v into [0, period).
inline double wrap_coord(double v, double period) {
    double r = std::fmod(v, period);
    if (r < 0) r += period;
    if (r >= period) r = 0.0;  // fmod can land exactly on period after the add
    return r;
}

}  // namespace whitlyap

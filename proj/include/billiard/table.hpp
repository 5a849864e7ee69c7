#pragma once

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "billiard/vec2.hpp"

namespace billiard {

enum class Boundary { walls, periodic };

inline const char* to_string(Boundary b) {
    return b == Boundary::walls ? "walls" : "periodic";
}

inline Boundary boundary_from_string(const std::string& s) {
    if (s == "walls") return Boundary::walls;
    if (s == "periodic") return Boundary::periodic;
    throw std::invalid_argument("unknown boundary mode: " + s);
}

struct TableConfig {
    double side = 4096.0;       // L, pixels
    double radius = 16.0;       // R, pixels
    int n_balls = 2;            // N_b
    Boundary boundary = Boundary::walls;

    // disk-area packing fraction N_b * pi * R^2 / L^2
    double void_ratio() const {
        return n_balls * std::numbers::pi * radius * radius / (side * side);
    }

    void validate() const {
        if (!(side > 0.0)) throw std::invalid_argument("table side must be positive");
        if (!(radius >= 1.0 && radius <= side / 4.0))
            throw std::invalid_argument("radius must satisfy 1 <= R <= L/4");
        if (n_balls < 2) throw std::invalid_argument("need at least 2 balls");
        if (void_ratio() >= 0.9)
            throw std::invalid_argument("packing fraction too high to place disks (>= 0.9)");
    }
};

// R for a target packing fraction at given N_b and L.
inline double radius_for_void_ratio(double rv, int n_balls, double side = 4096.0) {
    return side * std::sqrt(rv / (n_balls * std::numbers::pi));
}

struct BallState {
    int id = 0;
    Vec2 pos;
    Vec2 vel;
    std::uint64_t shocks = 0;       // ball-ball collisions experienced
    std::uint64_t wall_shocks = 0;  // wall reflections (kept separate, see N_c accounting)
};

} // namespace billiard

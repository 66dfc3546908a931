#pragma once

// Shared test fixtures: a scripted random source with known draws and an
// independent geometric coverage oracle.

#include <cmath>
#include <cstdint>
#include <deque>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsn/sensing.hpp"
#include "dsn/stochastic.hpp"

namespace dsn::testing {

/// Replays fixed draws and fails loudly when a kind runs out, so tests also
/// pin how many draws of each kind an operation consumes.
class ScriptedStream {
public:
    std::deque<double> uniforms, gaussians, cauchys;
    std::deque<std::uint64_t> indices;

    double uniform() { return next(uniforms, "uniform"); }
    double gaussian() { return next(gaussians, "gaussian"); }
    double cauchy() { return next(cauchys, "cauchy"); }
    std::uint64_t index(std::uint64_t n) {
        const auto v = next(indices, "index");
        if (v >= n) throw std::logic_error("scripted index " + std::to_string(v) + " >= " + std::to_string(n));
        return v;
    }

    bool exhausted() const { return uniforms.empty() && gaussians.empty() && cauchys.empty() && indices.empty(); }

private:
    template <class T>
    static T next(std::deque<T>& q, const char* kind) {
        if (q.empty()) throw std::logic_error(std::string("scripted stream ran out of ") + kind + " draws");
        T v = q.front();
        q.pop_front();
        return v;
    }
};

static_assert(stochastic::random_source<ScriptedStream>);

/// Sector membership through dot products instead of bearings.
inline bool oracle_covers(const sensing::SensorConfig& s, std::size_t j, sensing::Point2D t) {
    const double dx = t.x - s.position.x, dy = t.y - s.position.y;
    const double d = std::hypot(dx, dy);
    if (d > s.radius) return false;
    if (d == 0.0) return true;
    const double alpha = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(s.direction_count);
    const double cos_offset = (dx * std::cos(alpha) + dy * std::sin(alpha)) / d;
    return cos_offset >= std::cos(s.view_angle / 2.0) - 1e-12;
}

/// Targets covered by any sensor, counted target by target without bitsets.
inline std::size_t oracle_fitness(const sensing::Instance& inst, const std::vector<std::size_t>& a) {
    std::size_t n = 0;
    for (const auto& t : inst.targets) {
        bool hit = false;
        for (std::size_t i = 0; i < inst.sensors.size() && !hit; ++i) hit = oracle_covers(inst.sensors[i], a[i], t);
        n += hit;
    }
    return n;
}

struct RandomInstanceShape {
    std::size_t max_sensors = 20;
    std::size_t max_targets = 100;
    std::size_t max_directions = 8;
    double field = 100.0;
};

inline sensing::Instance random_instance(stochastic::RandomStream& rng, const RandomInstanceShape& shape = {}) {
    sensing::Instance inst;
    inst.length = shape.field;
    inst.width = shape.field;
    const auto d = 1 + rng.index(shape.max_sensors);
    const auto m = 1 + rng.index(shape.max_targets);
    for (std::uint64_t i = 0; i < d; ++i) {
        sensing::SensorConfig s;
        s.position = {rng.uniform() * shape.field, rng.uniform() * shape.field};
        s.radius = 5.0 + rng.uniform() * shape.field / 2.0;
        s.view_angle = 0.2 + rng.uniform() * (2.0 * std::numbers::pi - 0.2);
        s.direction_count = 1 + rng.index(shape.max_directions);
        inst.sensors.push_back(s);
    }
    for (std::uint64_t k = 0; k < m; ++k) inst.targets.push_back({rng.uniform() * shape.field, rng.uniform() * shape.field});
    return inst;
}

inline std::vector<std::size_t> random_assignment(const sensing::Instance& inst, stochastic::RandomStream& rng) {
    std::vector<std::size_t> a;
    for (const auto& s : inst.sensors) a.push_back(rng.index(s.direction_count));
    return a;
}

}  // namespace dsn::testing

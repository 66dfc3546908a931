#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsn::sensing {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Point2D {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2D&, const Point2D&) = default;
};

/// A directional sensor. Its sensing region for direction j is the closed
/// circular sector of radius `radius` and opening `view_angle`, centred on the
/// bearing j * 2pi / direction_count from the x-axis.
struct SensorConfig {
    Point2D position;
    double radius = 0.0;
    double view_angle = 0.0;
    std::size_t direction_count = 1;

    double direction_angle(std::size_t j) const {
        return static_cast<double>(j) * (two_pi / static_cast<double>(direction_count));
    }

    void validate() const {
        if (!std::isfinite(position.x) || !std::isfinite(position.y))
            throw std::domain_error("sensor position must be finite");
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw std::domain_error("sensor radius must be positive");
        if (!(view_angle > 0.0) || view_angle > two_pi)
            throw std::domain_error("sensor view angle must lie in (0, 2pi]");
        if (direction_count == 0) throw std::domain_error("sensor needs at least one direction");
    }

    friend bool operator==(const SensorConfig&, const SensorConfig&) = default;
};

/// A deployment: an L x W field with sensors and targets inside it.
struct Instance {
    double length = 0.0;
    double width = 0.0;
    std::vector<SensorConfig> sensors;
    std::vector<Point2D> targets;

    bool contains(Point2D p) const {
        return std::isfinite(p.x) && std::isfinite(p.y) && p.x >= 0.0 && p.x <= length &&
               p.y >= 0.0 && p.y <= width;
    }

    void validate() const {
        if (!(length > 0.0) || !(width > 0.0) || !std::isfinite(length) || !std::isfinite(width))
            throw std::domain_error("field dimensions must be positive");
        if (sensors.empty()) throw std::domain_error("instance needs at least one sensor");
        if (targets.empty()) throw std::domain_error("instance needs at least one target");
        for (std::size_t i = 0; i < sensors.size(); ++i) {
            sensors[i].validate();
            if (!contains(sensors[i].position))
                throw std::domain_error("sensor " + std::to_string(i) + " lies outside the field");
        }
        for (std::size_t k = 0; k < targets.size(); ++k)
            if (!contains(targets[k]))
                throw std::domain_error("target " + std::to_string(k) + " lies outside the field");
    }

    friend bool operator==(const Instance&, const Instance&) = default;
};

/// One direction index per sensor.
using Assignment = std::vector<std::size_t>;

/// Slack on the sector half-angle so bearings that are mathematically on the
/// boundary stay inside after rounding.
inline constexpr double angle_tolerance = 1e-12;

/// Coverage predicate: distance within the radius and bearing within half
/// the view angle of the chosen direction, both boundaries inclusive. A target
/// at the sensor's own position is covered.
inline bool covers(const SensorConfig& sensor, std::size_t direction_index, Point2D target) {
    if (direction_index >= sensor.direction_count)
        throw std::domain_error("direction index " + std::to_string(direction_index) +
                                " out of range for " + std::to_string(sensor.direction_count) +
                                " directions");
    const double dx = target.x - sensor.position.x;
    const double dy = target.y - sensor.position.y;
    const double dist2 = dx * dx + dy * dy;
    if (dist2 > sensor.radius * sensor.radius) return false;
    if (dist2 == 0.0) return true;
    const double bearing = std::atan2(dy, dx);
    const double offset = std::abs(std::remainder(bearing - sensor.direction_angle(direction_index), two_pi));
    return offset <= sensor.view_angle / 2.0 + angle_tolerance;
}

/// Per-(sensor, direction) target bitsets, stored as one flat word array.
class CoverageTable {
public:
    using word_type = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    CoverageTable() = default;

    explicit CoverageTable(const Instance& instance) {
        instance.validate();
        target_count_ = instance.targets.size();
        words_per_set_ = (target_count_ + word_bits - 1) / word_bits;
        first_cell_.reserve(instance.sensors.size() + 1);
        first_cell_.push_back(0);
        for (const auto& s : instance.sensors) first_cell_.push_back(first_cell_.back() + s.direction_count);
        words_.assign(first_cell_.back() * words_per_set_, 0);

        for (std::size_t i = 0; i < instance.sensors.size(); ++i) {
            const auto& sensor = instance.sensors[i];
            for (std::size_t j = 0; j < sensor.direction_count; ++j) {
                word_type* cell = words_.data() + (first_cell_[i] + j) * words_per_set_;
                for (std::size_t k = 0; k < target_count_; ++k)
                    if (covers(sensor, j, instance.targets[k])) cell[k / word_bits] |= word_type{1} << (k % word_bits);
            }
        }
    }

    std::size_t sensor_count() const { return first_cell_.empty() ? 0 : first_cell_.size() - 1; }
    std::size_t target_count() const { return target_count_; }
    std::size_t words_per_set() const { return words_per_set_; }
    std::size_t direction_count(std::size_t sensor) const {
        return first_cell_.at(sensor + 1) - first_cell_[sensor];
    }
    std::vector<std::size_t> direction_counts() const {
        std::vector<std::size_t> counts(sensor_count());
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = direction_count(i);
        return counts;
    }

    std::span<const word_type> cell(std::size_t sensor, std::size_t direction) const {
        if (sensor >= sensor_count() || direction >= direction_count(sensor))
            throw std::domain_error("coverage cell out of range");
        return {words_.data() + (first_cell_[sensor] + direction) * words_per_set_, words_per_set_};
    }

    bool contains(std::size_t sensor, std::size_t direction, std::size_t target) const {
        if (target >= target_count_) return false;
        return (cell(sensor, direction)[target / word_bits] >> (target % word_bits)) & 1U;
    }

    std::size_t cell_size(std::size_t sensor, std::size_t direction) const {
        std::size_t n = 0;
        for (word_type w : cell(sensor, direction)) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    void check_assignment(std::span<const std::size_t> assignment) const {
        if (assignment.size() != sensor_count())
            throw std::domain_error("assignment has " + std::to_string(assignment.size()) +
                                    " entries for " + std::to_string(sensor_count()) + " sensors");
        for (std::size_t i = 0; i < assignment.size(); ++i)
            if (assignment[i] >= direction_count(i))
                throw std::domain_error("assignment index out of range at sensor " + std::to_string(i));
    }

    /// Number of distinct targets covered under `assignment` (NCT).
    std::size_t fitness(std::span<const std::size_t> assignment) const {
        check_assignment(assignment);
        std::vector<word_type> covered(words_per_set_, 0);
        for (std::size_t i = 0; i < assignment.size(); ++i) {
            const word_type* cell = words_.data() + (first_cell_[i] + assignment[i]) * words_per_set_;
            for (std::size_t w = 0; w < words_per_set_; ++w) covered[w] |= cell[w];
        }
        std::size_t n = 0;
        for (word_type w : covered) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

private:
    std::size_t target_count_ = 0;
    std::size_t words_per_set_ = 0;
    std::vector<std::size_t> first_cell_;  // prefix sums of direction counts
    std::vector<word_type> words_;
};

inline CoverageTable build_coverage_table(const Instance& instance) { return CoverageTable(instance); }

inline std::size_t fitness(const CoverageTable& table, std::span<const std::size_t> assignment) {
    return table.fitness(assignment);
}

}  // namespace dsn::sensing

#pragma once

// Reference optimizers for the coverage problem: random search, sequential
// greedy and exhaustive enumeration.

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsn/sensing.hpp"
#include "dsn/stochastic.hpp"

namespace dsn::baselines {

using sensing::Assignment;
using sensing::CoverageTable;

struct BaselineResult {
    Assignment assignment;
    std::size_t fitness = 0;
    std::size_t evaluations_used = 0;
    std::vector<std::size_t> trace;  // best-so-far after each evaluation
};

/// Thrown when exhaustive search is asked to enumerate more than its limit.
class SearchSpaceTooLarge : public std::runtime_error {
public:
    SearchSpaceTooLarge(double size, std::uint64_t limit)
        : std::runtime_error("search space of " + std::to_string(size) + " assignments exceeds the limit of " +
                             std::to_string(limit)),
          limit_(limit) {}
    std::uint64_t limit() const { return limit_; }

private:
    std::uint64_t limit_;
};

inline constexpr std::uint64_t exhaustive_limit = 1'000'000;

/// Best of `budget_evals` uniformly random assignments (D index draws each,
/// sensor order).
template <stochastic::random_source S>
BaselineResult random_search(const CoverageTable& table, std::size_t budget_evals, S& stream) {
    if (budget_evals == 0) throw std::domain_error("random_search: budget must be at least 1");
    const auto counts = table.direction_counts();
    BaselineResult best;
    best.trace.reserve(budget_evals);
    Assignment candidate(counts.size());
    for (std::size_t e = 0; e < budget_evals; ++e) {
        for (std::size_t i = 0; i < counts.size(); ++i)
            candidate[i] = static_cast<std::size_t>(stream.index(counts[i]));
        const std::size_t f = table.fitness(candidate);
        if (e == 0 || f > best.fitness) {
            best.fitness = f;
            best.assignment = candidate;
        }
        best.trace.push_back(best.fitness);
    }
    best.evaluations_used = budget_evals;
    return best;
}

/// Sensors in index order each take the direction adding the most uncovered
/// targets; ties go to the smaller direction index.
inline BaselineResult greedy_assign(const CoverageTable& table) {
    std::vector<CoverageTable::word_type> covered(table.words_per_set(), 0);
    BaselineResult result;
    result.assignment.resize(table.sensor_count());
    for (std::size_t i = 0; i < table.sensor_count(); ++i) {
        std::size_t best_dir = 0;
        std::size_t best_gain = 0;
        for (std::size_t j = 0; j < table.direction_count(i); ++j) {
            const auto cell = table.cell(i, j);
            std::size_t gain = 0;
            for (std::size_t w = 0; w < cell.size(); ++w)
                gain += static_cast<std::size_t>(std::popcount(cell[w] & ~covered[w]));
            if (gain > best_gain) {
                best_gain = gain;
                best_dir = j;
            }
            ++result.evaluations_used;
        }
        result.assignment[i] = best_dir;
        const auto chosen = table.cell(i, best_dir);
        for (std::size_t w = 0; w < chosen.size(); ++w) covered[w] |= chosen[w];
    }
    result.fitness = table.fitness(result.assignment);
    result.trace = {result.fitness};
    return result;
}

/// Size of the assignment space, as a double so huge products don't wrap.
inline double search_space_size(const CoverageTable& table) {
    double size = 1.0;
    for (std::size_t i = 0; i < table.sensor_count(); ++i) size *= static_cast<double>(table.direction_count(i));
    return size;
}

/// True optimum by enumeration in lexicographic order; the first maximiser
/// wins ties. Refuses spaces larger than `limit`.
inline BaselineResult exhaustive(const CoverageTable& table, std::uint64_t limit = exhaustive_limit) {
    const double size = search_space_size(table);
    if (size > static_cast<double>(limit)) throw SearchSpaceTooLarge(size, limit);

    const auto counts = table.direction_counts();
    const std::size_t d = counts.size();
    const std::size_t words = table.words_per_set();

    // prefix[i] holds the union of cells for sensors [0, i) so each odometer
    // tick only recomputes the suffix that changed
    std::vector<std::vector<CoverageTable::word_type>> prefix(d + 1, std::vector<CoverageTable::word_type>(words, 0));
    Assignment current(d, 0);
    auto rebuild_from = [&](std::size_t from) {
        for (std::size_t i = from; i < d; ++i) {
            const auto cell = table.cell(i, current[i]);
            for (std::size_t w = 0; w < words; ++w) prefix[i + 1][w] = prefix[i][w] | cell[w];
        }
    };
    rebuild_from(0);

    BaselineResult best;
    bool first = true;
    for (;;) {
        std::size_t f = 0;
        for (auto w : prefix[d]) f += static_cast<std::size_t>(std::popcount(w));
        ++best.evaluations_used;
        if (first || f > best.fitness) {
            best.fitness = f;
            best.assignment = current;
            first = false;
        }

        std::size_t pos = d;
        while (pos > 0) {
            --pos;
            if (++current[pos] < counts[pos]) break;
            current[pos] = 0;
            if (pos == 0) {
                best.trace = {best.fitness};
                return best;
            }
        }
        rebuild_from(pos);
    }
}

}  // namespace dsn::baselines

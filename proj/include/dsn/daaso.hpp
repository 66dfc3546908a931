#pragma once

// Discrete army ant search optimizer.
//
// Each ant is a vector of angles, one per dimension, restricted after every
// move to a uniform grid of `levels` directions on [0, 2pi). Up to four elite
// solutions (the prey odors) guide the search. Per iteration:
//
//   1. the number of active odors shrinks from 4 toward 1 (prey_count),
//   2. a truncated-Poisson number of ants is recruited at random,
//   3. recruited ants follow every active odor with a Gaussian step and move to
//      the mean of those moves; all other ants wander between two random
//      companions with Cauchy noise,
//   4. positions wrap onto [0, 2pi) and are stochastically rounded onto the grid,
//   5. all ants are evaluated and merged into the elitist archive.
//
// Random draws happen in one fixed order so a seed fully determines a run:
// recruitment count, recruit selection, then ants in index order (Gaussian
// vectors prey by prey for recruits; companion indices then two Cauchy vectors
// for wanderers), then one rounding draw per ant per dimension.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "dsn/stochastic.hpp"

namespace dsn::daaso {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr std::size_t max_prey = 4;

struct OptimizerParams {
    std::size_t population = 50;
    std::vector<std::size_t> levels;  // grid size per dimension
    std::size_t max_iterations = 100;
    /// Mean recruitment at the start of the run; N/2 when unset.
    std::optional<double> initial_recruitment;

    std::size_t dimension() const { return levels.size(); }

    double num_ini() const {
        return initial_recruitment.value_or(static_cast<double>(population) / 2.0);
    }

    void validate() const {
        if (population < max_prey) throw std::domain_error("population must be at least 4");
        if (levels.empty()) throw std::domain_error("dimension must be at least 1");
        for (std::size_t l : levels)
            if (l == 0) throw std::domain_error("every dimension needs at least one level");
        if (max_iterations == 0) throw std::domain_error("max_iterations must be positive");
        const double ini = num_ini();
        if (!(ini >= 0.0) || !std::isfinite(ini)) throw std::domain_error("initial recruitment must be non-negative");
    }
};

/// Uniform grid V_j = j * 2pi / levels on the circle.
struct AngleGrid {
    std::size_t levels = 0;

    double step() const { return two_pi / static_cast<double>(levels); }
    double value(std::size_t j) const { return static_cast<double>(j) * step(); }
};

/// Maps an angle onto [0, 2pi).
inline double wrap_angle(double x) {
    double r = std::fmod(x, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

inline void check_same_length(std::span<const double> a, std::span<const double> b, const char* op) {
    if (a.size() != b.size()) throw std::domain_error(std::string(op) + ": vector lengths differ");
}

/// prey + (prey - ant) ⊙ ε with ε ~ N(0, I).
template <stochastic::random_source S>
std::vector<double> following_move(std::span<const double> ant, std::span<const double> prey, S& stream) {
    check_same_length(ant, prey, "following_move");
    std::vector<double> out(prey.size());
    for (std::size_t d = 0; d < prey.size(); ++d) {
        const double eps = stream.gaussian();
        out[d] = prey[d] + (prey[d] - ant[d]) * eps;
    }
    return out;
}

/// Elementwise mean of the per-odor following moves.
inline std::vector<double> attacking_move(std::span<const std::vector<double>> follow_results) {
    if (follow_results.empty()) throw std::domain_error("attacking_move: no odor attracts this ant");
    std::vector<double> out(follow_results.front().size(), 0.0);
    for (const auto& v : follow_results) {
        check_same_length(out, v, "attacking_move");
        for (std::size_t d = 0; d < out.size(); ++d) out[d] += v[d];
    }
    for (double& x : out) x /= static_cast<double>(follow_results.size());
    return out;
}

/// ((a + c_a) + (b + c_b)) / 2 with c_a, c_b standard Cauchy vectors, drawn
/// a's vector first.
template <stochastic::random_source S>
std::vector<double> wander_move(std::span<const double> companion_a, std::span<const double> companion_b, S& stream) {
    check_same_length(companion_a, companion_b, "wander_move");
    std::vector<double> out(companion_a.size());
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = companion_a[d] + stream.cauchy();
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = (out[d] + companion_b[d] + stream.cauchy()) / 2.0;
    return out;
}

inline void check_iteration(std::size_t t, std::size_t t_max) {
    if (t < 1 || t > t_max)
        throw std::domain_error("iteration " + std::to_string(t) + " outside [1, " + std::to_string(t_max) + "]");
}

/// Mean recruitment: num_ini + (N - num_ini) t / T_max.
inline double recruitment_mean(std::size_t t, const OptimizerParams& params) {
    check_iteration(t, params.max_iterations);
    const double n = static_cast<double>(params.population);
    const double ini = params.num_ini();
    return ini + (n - ini) * static_cast<double>(t) / static_cast<double>(params.max_iterations);
}

/// Number of recruited ants: Poisson(recruitment_mean(t)) truncated to [0, N].
template <stochastic::random_source S>
std::size_t recruitment_count(std::size_t t, const OptimizerParams& params, S& stream) {
    return static_cast<std::size_t>(
        stochastic::sample_truncated_poisson(stream, recruitment_mean(t, params), params.population));
}

/// Chooses `count` of `population` ants uniformly without replacement
/// (partial Fisher-Yates). Returns a membership mask.
template <stochastic::random_source S>
std::vector<bool> select_recruits(std::size_t population, std::size_t count, S& stream) {
    if (count > population) throw std::domain_error("select_recruits: count exceeds population");
    std::vector<std::size_t> order(population);
    for (std::size_t i = 0; i < population; ++i) order[i] = i;
    std::vector<bool> mask(population, false);
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(stream.index(population - i));
        std::swap(order[i], order[j]);
        mask[order[i]] = true;
    }
    return mask;
}

/// Active odor count: max(1, round(4 - 4 (t - 1) / T_max)).
inline std::size_t prey_count(std::size_t t, std::size_t t_max) {
    check_iteration(t, t_max);
    const double raw = std::round(4.0 - 4.0 * static_cast<double>(t - 1) / static_cast<double>(t_max));
    return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

/// Stochastic rounding of an angle onto the grid. With V_i <= x < V_{i+1}
/// (V_levels wrapping to V_0), returns i + 1 when a uniform draw on (0, 1]
/// falls below (x - V_i) / step and i otherwise. Always consumes one draw.
template <stochastic::random_source S>
std::size_t discretize(double x, const AngleGrid& grid, S& stream) {
    if (grid.levels == 0) throw std::domain_error("discretize: empty grid");
    if (!(x >= 0.0 && x < two_pi)) throw std::domain_error("discretize: angle outside [0, 2pi)");
    const double pos = x / grid.step();
    auto lower = static_cast<std::size_t>(std::floor(pos));
    double fraction = pos - static_cast<double>(lower);
    // x that is a grid value up to rounding is treated as that grid value
    constexpr double snap = 1e-12;
    if (fraction > 1.0 - snap) {
        ++lower;
        fraction = 0.0;
    } else if (fraction < snap) {
        fraction = 0.0;
    }
    lower %= grid.levels;
    const double r2 = stream.uniform();
    return r2 < fraction ? (lower + 1) % grid.levels : lower;
}

template <class Score>
struct Ant {
    std::vector<double> position;          // angles in [0, 2pi), on the grid after each step
    std::vector<std::size_t> assignment;   // grid index per dimension
    Score fitness{};
};

template <class Score>
using AntPopulation = std::vector<Ant<Score>>;

template <class Score>
struct Prey {
    std::vector<double> position;
    std::vector<std::size_t> assignment;
    Score fitness{};
    std::uint64_t discovered = 0;  // tie-break: earlier wins
};

/// Up to four best-ever distinct solutions, best first. The first
/// `active_count()` entries act as odors.
template <class Score>
class PreyArchive {
public:
    const std::vector<Prey<Score>>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    const Prey<Score>& best() const {
        if (entries_.empty()) throw std::logic_error("prey archive is empty");
        return entries_.front();
    }

    std::size_t active_count() const { return std::min(active_, entries_.size()); }
    void set_active(std::size_t n) { active_ = std::clamp<std::size_t>(n, 1, max_prey); }

    /// Merges ant i of `population` with discovery stamp first_stamp + i,
    /// keeping the best four distinct assignments. Order: fitness descending,
    /// then earlier discovery, then lexicographically smaller assignment.
    void merge(const AntPopulation<Score>& population, std::uint64_t first_stamp) {
        std::vector<Prey<Score>> pool = entries_;
        pool.reserve(pool.size() + population.size());
        for (std::size_t i = 0; i < population.size(); ++i) {
            const auto& ant = population[i];
            pool.push_back({ant.position, ant.assignment, ant.fitness, first_stamp + i});
        }
        std::stable_sort(pool.begin(), pool.end(), [](const Prey<Score>& a, const Prey<Score>& b) {
            if (a.fitness != b.fitness) return a.fitness > b.fitness;
            if (a.discovered != b.discovered) return a.discovered < b.discovered;
            return a.assignment < b.assignment;
        });
        entries_.clear();
        for (auto& candidate : pool) {
            if (entries_.size() == max_prey) break;
            const bool duplicate = std::any_of(entries_.begin(), entries_.end(), [&](const Prey<Score>& e) {
                return e.assignment == candidate.assignment;
            });
            if (!duplicate) entries_.push_back(std::move(candidate));
        }
    }

private:
    std::vector<Prey<Score>> entries_;
    std::size_t active_ = max_prey;
};

template <class Score>
struct OptimizationResult {
    std::vector<std::size_t> assignment;
    Score fitness{};
    std::vector<Score> history;  // best-so-far; index 0 is the initial population
    std::size_t evaluations = 0;
};

/// Fitness functions take the grid-index vector of one ant.
template <class F>
concept fitness_function = std::invocable<const F&, std::span<const std::size_t>> &&
    std::totally_ordered<std::invoke_result_t<const F&, std::span<const std::size_t>>>;

template <class F>
using score_t = std::remove_cvref_t<std::invoke_result_t<const F&, std::span<const std::size_t>>>;

struct no_observer {
    template <class... Args>
    void operator()(Args&&...) const {}
};

/// One iteration of the optimizer (t in [1, T_max]); updates both the
/// population and the archive in place.
template <fitness_function F, stochastic::random_source S>
void step(AntPopulation<score_t<F>>& population, PreyArchive<score_t<F>>& archive, std::size_t t,
          const F& fitness_fn, S& stream, const OptimizerParams& params) {
    using Score = score_t<F>;
    if (archive.empty()) throw std::domain_error("step: prey archive is empty");
    if (population.size() != params.population) throw std::domain_error("step: population size mismatch");
    if (population.size() < 3) throw std::domain_error("step: wandering needs two companions");

    archive.set_active(prey_count(t, params.max_iterations));
    const std::size_t odors = archive.active_count();

    const std::size_t n = population.size();
    const std::size_t recruits = recruitment_count(t, params, stream);
    const std::vector<bool> recruited = select_recruits(n, recruits, stream);

    std::vector<std::vector<double>> next(n);
    std::vector<std::vector<double>> follows(odors);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& here = population[i].position;
        if (recruited[i]) {
            for (std::size_t j = 0; j < odors; ++j)
                follows[j] = following_move(here, archive.entries()[j].position, stream);
            next[i] = attacking_move(follows);
        } else {
            // two distinct companions other than ant i
            auto a = static_cast<std::size_t>(stream.index(n - 1));
            if (a >= i) ++a;
            auto b = static_cast<std::size_t>(stream.index(n - 2));
            const std::size_t lo = std::min(i, a);
            const std::size_t hi = std::max(i, a);
            if (b >= lo) ++b;
            if (b >= hi) ++b;
            next[i] = wander_move(population[a].position, population[b].position, stream);
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        auto& ant = population[i];
        ant.position = std::move(next[i]);
        ant.assignment.resize(ant.position.size());
        for (std::size_t d = 0; d < ant.position.size(); ++d) {
            const AngleGrid grid{params.levels.at(d)};
            const std::size_t level = discretize(wrap_angle(ant.position[d]), grid, stream);
            ant.assignment[d] = level;
            ant.position[d] = grid.value(level);
        }
    }

    for (auto& ant : population) ant.fitness = static_cast<Score>(fitness_fn(std::span<const std::size_t>(ant.assignment)));

    archive.merge(population, static_cast<std::uint64_t>(t) * n);
}

/// Random grid-valued population, evaluated.
template <fitness_function F, stochastic::random_source S>
AntPopulation<score_t<F>> initial_population(const F& fitness_fn, const OptimizerParams& params, S& stream) {
    AntPopulation<score_t<F>> population(params.population);
    for (auto& ant : population) {
        ant.position.resize(params.dimension());
        ant.assignment.resize(params.dimension());
        for (std::size_t d = 0; d < params.dimension(); ++d) {
            const AngleGrid grid{params.levels[d]};
            ant.assignment[d] = static_cast<std::size_t>(stream.index(grid.levels));
            ant.position[d] = grid.value(ant.assignment[d]);
        }
    }
    for (auto& ant : population) ant.fitness = fitness_fn(std::span<const std::size_t>(ant.assignment));
    return population;
}

/// Full run. `observer(t, population, archive)` is called after
/// initialisation (t = 0) and after every iteration.
template <fitness_function F, stochastic::random_source S, class Observer = no_observer>
OptimizationResult<score_t<F>> optimize(const F& fitness_fn, const OptimizerParams& params, S& stream,
                                        Observer&& observer = {}) {
    using Score = score_t<F>;
    params.validate();

    AntPopulation<Score> population = initial_population(fitness_fn, params, stream);
    PreyArchive<Score> archive;
    archive.merge(population, 0);
    observer(std::size_t{0}, std::as_const(population), std::as_const(archive));

    OptimizationResult<Score> result;
    result.history.reserve(params.max_iterations + 1);
    result.history.push_back(archive.best().fitness);
    for (std::size_t t = 1; t <= params.max_iterations; ++t) {
        step(population, archive, t, fitness_fn, stream, params);
        result.history.push_back(archive.best().fitness);
        observer(t, std::as_const(population), std::as_const(archive));
    }
    result.assignment = archive.best().assignment;
    result.fitness = archive.best().fitness;
    result.evaluations = params.population * (params.max_iterations + 1);
    return result;
}

template <fitness_function F>
OptimizationResult<score_t<F>> optimize(const F& fitness_fn, const OptimizerParams& params, std::uint64_t seed) {
    stochastic::RandomStream stream(seed);
    return optimize(fitness_fn, params, stream);
}

}  // namespace dsn::daaso

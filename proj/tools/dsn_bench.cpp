// Command-line front end for the coverage optimizer and its benchmark harness.
//
//   dsn-bench generate --scenario <file> --seed <u64> --out <instance-file>
//   dsn-bench run      --instance <file> --algo <name> --pop <N> --iters <T> --seed <u64> --out <csv>
//   dsn-bench bench    --scenario <file> --algo <name> --runs <k> --seed <u64> --out-dir <dir>
//   dsn-bench oracle   --instance <file>
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 search-space guard.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dsn/baselines.hpp"
#include "dsn/bench.hpp"

namespace {

constexpr int exit_invalid = 2;
constexpr int exit_guard = 3;

using namespace dsn;

void print_assignment(const sensing::Assignment& a) {
    for (std::size_t i = 0; i < a.size(); ++i) std::cout << (i ? " " : "") << a[i];
    std::cout << '\n';
}

int cmd_generate(const std::string& scenario_path, std::uint64_t seed, const std::string& out_path) {
    const auto scenario = bench::load_scenario(scenario_path);
    stochastic::RandomStream stream(seed);
    const auto instance = bench::generate_instance(scenario, stream);
    bench::write_instance(instance, out_path);
    std::cout << "wrote " << instance.sensors.size() << " sensors, " << instance.targets.size() << " targets to "
              << out_path << '\n';
    return 0;
}

int cmd_run(const std::string& instance_path, const std::string& algo, std::size_t pop, std::size_t iters,
            std::uint64_t seed, const std::string& out_path) {
    const auto algorithm = bench::parse_algorithm(algo);
    if (pop < daaso::max_prey) throw bench::InputError("--pop must be at least 4");
    if (iters == 0) throw bench::InputError("--iters must be positive");
    const sensing::CoverageTable table(bench::read_instance(instance_path));

    stochastic::RandomStream stream(seed);
    auto record = bench::run_algorithm(table, algorithm, {pop, iters}, stream);
    record.run_id = 1;
    record.seed = seed;

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    bench::write_runs_csv(out, {record});

    std::cout << bench::algorithm_name(algorithm) << ": initial " << record.initial_nct << ", final "
              << record.final_nct << " of " << table.target_count() << " targets (" << record.wall_time << " s)\n";
    return 0;
}

int cmd_bench(const std::string& scenario_path, const std::string& algo, std::optional<std::size_t> runs,
              std::optional<std::uint64_t> seed, const std::string& out_dir, bool fixed_instance) {
    auto scenario = bench::load_scenario(scenario_path);
    if (runs) scenario.runs = *runs;
    if (seed) scenario.master_seed = *seed;
    scenario.validate();
    const auto algorithm = bench::parse_algorithm(algo);

    const auto result = bench::run_experiment(scenario, algorithm, {fixed_instance});

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream runs_out(dir / "runs.csv", std::ios::binary);
        bench::write_runs_csv(runs_out, result.records);
        std::ofstream summary_out(dir / "summary.csv", std::ios::binary);
        bench::write_summary_csv(summary_out, {result.summary});
        if (!runs_out || !summary_out) throw std::runtime_error("failed writing CSV output in " + out_dir);
    }
    bench::emit_convergence_svg(result.records, (dir / "convergence.svg").string());

    double deployment_mean = 0.0;
    for (auto n : result.deployment_nct) deployment_mean += static_cast<double>(n);
    deployment_mean /= static_cast<double>(result.deployment_nct.size());

    const auto& s = result.summary;
    std::printf("%s %s: runs=%zu mean=%.2f std=%.2f min=%zu max=%zu (random deployment mean %.2f)\n",
                s.scenario.c_str(), s.algorithm.c_str(), s.runs, s.mean, s.std, s.min, s.max, deployment_mean);
    return 0;
}

int cmd_oracle(const std::string& instance_path) {
    const sensing::CoverageTable table(bench::read_instance(instance_path));
    const auto result = baselines::exhaustive(table);
    std::cout << "optimum " << result.fitness << " of " << table.target_count() << " targets after "
              << result.evaluations_used << " assignments\nassignment ";
    print_assignment(result.assignment);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Directional sensor coverage optimizer and benchmark harness"};
    app.require_subcommand(1);

    std::string scenario_path, instance_path, out_path, out_dir, algo = "daaso";
    std::uint64_t seed = 1;
    std::size_t pop = 50, iters = 100;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> bench_seed;
    bool fixed_instance = false;

    auto* generate = app.add_subcommand("generate", "Draw a random deployment from a scenario");
    generate->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    generate->add_option("--seed", seed, "Random seed")->required();
    generate->add_option("--out", out_path, "Instance file to write")->required();

    auto* run = app.add_subcommand("run", "Solve one instance with one algorithm");
    run->add_option("--instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);
    run->add_option("--algo", algo, "daaso, random, greedy or exhaustive")->required();
    run->add_option("--pop", pop, "Population size N")->capture_default_str();
    run->add_option("--iters", iters, "Iterations T_max")->capture_default_str();
    run->add_option("--seed", seed, "Random seed")->required();
    run->add_option("--out", out_path, "Convergence CSV to write")->required();

    auto* bench_cmd = app.add_subcommand("bench", "Multi-run experiment over fresh deployments");
    bench_cmd->add_option("--scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--algo", algo, "daaso, random, greedy or exhaustive")->required();
    bench_cmd->add_option("--runs", runs, "Number of runs (overrides the scenario)");
    bench_cmd->add_option("--seed", bench_seed, "Master seed (overrides the scenario)");
    bench_cmd->add_option("--out-dir", out_dir, "Output directory")->required();
    bench_cmd->add_flag("--fixed-instance", fixed_instance, "Reuse one deployment for every run");

    auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum of a small instance");
    oracle->add_option("--instance", instance_path, "Instance file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_invalid;
    }

    try {
        if (*generate) return cmd_generate(scenario_path, seed, out_path);
        if (*run) return cmd_run(instance_path, algo, pop, iters, seed, out_path);
        if (*bench_cmd) return cmd_bench(scenario_path, algo, runs, bench_seed, out_dir, fixed_instance);
        if (*oracle) return cmd_oracle(instance_path);
    } catch (const baselines::SearchSpaceTooLarge& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_guard;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coopgraph/generators.hpp"

namespace coop {

/// Deterministic 64-bit generator (splitmix64). Used instead of the
/// standard distributions so seeded runs replay identically everywhere.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    /// Uniform value in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t state_;
};

struct TraversalResult {
    bool solved = false;
    std::size_t steps = 0;
    std::uint64_t digest = 0;     // order-sensitive hash of the chosen items
    double online_seconds = 0;    // engine time only
};

/// Solves the model by picking one random feasible item per online step,
/// completing its actions (hyper-arcs) or marking it met (nodes).
TraversalResult random_traversal(HierGraph& model, std::uint64_t seed);

struct BenchmarkRecord {
    std::string encoding;
    int legs = 0;
    std::size_t designed_nodes = 0, designed_arcs = 0;
    std::size_t spawned_nodes = 0, spawned_arcs = 0;
    double offline_mean_s = 0, offline_std_s = 0;
    double online_mean_s = 0, online_std_s = 0;
    int repetitions = 0;
    unsigned seed = 0;
    std::uint64_t digest = 0;  // combined event digest across repetitions
    std::vector<double> offline_samples;
    std::vector<double> online_samples;
};

struct BenchmarkOptions {
    std::vector<TableEncoding> encodings{TableEncoding::Fol, TableEncoding::Hierarchical};
    int legs_min = 1;
    int legs_max = 9;
    int repetitions = 10;
    unsigned seed = 42;
    std::size_t path_cap = AndOrGraph::kDefaultPathCap;
};

/// Builds each model from its serialized files (timed: parse + validate +
/// path enumeration) and solves it with seeded random traversal (timed:
/// online engine calls only). The standard encoding is capped at 5 legs.
std::vector<BenchmarkRecord> run_benchmark(const BenchmarkOptions& options);

/// Comma-separated table with a one-line header.
std::string benchmark_csv(const std::vector<BenchmarkRecord>& records);
/// Whitespace table of (legs, mean online/offline per encoding) for plotting.
std::string benchmark_plot_data(const std::vector<BenchmarkRecord>& records);

struct QuadraticFit {
    double b0 = 0, b1 = 0, b2 = 0;
    double p_quadratic = 1.0;  // two-sided p-value of the quadratic term
};

/// Least squares y = b0 + b1 x + b2 x^2 with a t-test on b2.
QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y);

}  // namespace coop

#include "coopgraph/bench.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "coopgraph/bundle.hpp"
#include "coopgraph/model_io.hpp"

namespace coop {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t n) {
    // rejection sampling keeps the draw unbiased
    std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
        std::uint64_t r = next();
        if (r >= threshold) return r % n;
    }
}

namespace {

std::uint64_t mix_string(std::uint64_t h, const std::string& s) {
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

double seconds_between(std::chrono::steady_clock::time_point a,
                       std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

}  // namespace

TraversalResult random_traversal(HierGraph& model, std::uint64_t seed) {
    SplitMix64 rng(seed);
    TraversalResult result;
    result.digest = 0xcbf29ce484222325ULL;
    HierEvents events;
    for (;;) {
        auto t0 = std::chrono::steady_clock::now();
        HierPhaseResult phase = model.online_hierarchical_phase(events);
        auto t1 = std::chrono::steady_clock::now();
        result.online_seconds += seconds_between(t0, t1);
        events = HierEvents{};
        if (phase.status == PhaseStatus::Solved) {
            result.solved = true;
            return result;
        }
        if (phase.status == PhaseStatus::Failed) {
            return result;
        }
        const HierSuggestion& pick =
            phase.suggestions[rng.below(phase.suggestions.size())];
        if (pick.is_arc) {
            model.graph(pick.graph).complete_actions(pick.item);
            events.solved_arcs[pick.graph].push_back(pick.item);
        } else {
            events.met_nodes[pick.graph].push_back(pick.item);
        }
        result.digest = mix_string(mix_string(result.digest, pick.graph), pick.item);
        ++result.steps;
    }
}

std::vector<BenchmarkRecord> run_benchmark(const BenchmarkOptions& options) {
    std::vector<BenchmarkRecord> records;
    for (TableEncoding encoding : options.encodings) {
        int max_legs = options.legs_max;
        if (encoding == TableEncoding::Standard) max_legs = std::min(max_legs, 5);
        for (int legs = options.legs_min; legs <= max_legs; ++legs) {
            ScenarioBundle generated = generate_table_model(legs, encoding);
            auto files = render_bundle(generated);
            BenchmarkRecord rec;
            rec.encoding = to_string(encoding);
            rec.legs = legs;
            rec.repetitions = options.repetitions;
            rec.seed = options.seed;
            auto [dn, da] = designed_size(generated);
            rec.designed_nodes = dn;
            rec.designed_arcs = da;
            rec.digest = 0xcbf29ce484222325ULL;
            for (int rep = 0; rep < options.repetitions; ++rep) {
                auto t0 = std::chrono::steady_clock::now();
                ScenarioBundle bundle = load_bundle_files(files, generated.name);
                HierGraph model = build_model(bundle, options.path_cap);
                auto t1 = std::chrono::steady_clock::now();
                rec.offline_samples.push_back(seconds_between(t0, t1));
                if (rep == 0) {
                    rec.spawned_nodes = model.spawned_nodes();
                    rec.spawned_arcs = model.spawned_arcs();
                }
                std::uint64_t run_seed = options.seed;
                run_seed = mix_string(run_seed, rec.encoding);
                run_seed = mix_string(run_seed, std::to_string(legs));
                run_seed = mix_string(run_seed, std::to_string(rep));
                TraversalResult tr = random_traversal(model, run_seed);
                if (!tr.solved) {
                    throw ModelError("random traversal failed on " + generated.name);
                }
                rec.online_samples.push_back(tr.online_seconds);
                rec.digest ^= tr.digest;
            }
            auto stats = [](const std::vector<double>& xs) {
                double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
                double var = 0;
                for (double v : xs) var += (v - mean) * (v - mean);
                var = xs.size() > 1 ? var / (xs.size() - 1) : 0;
                return std::make_pair(mean, std::sqrt(var));
            };
            std::tie(rec.offline_mean_s, rec.offline_std_s) = stats(rec.offline_samples);
            std::tie(rec.online_mean_s, rec.online_std_s) = stats(rec.online_samples);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

std::string benchmark_csv(const std::vector<BenchmarkRecord>& records) {
    std::string out =
        "encoding,legs,designed_nodes,designed_arcs,spawned_nodes,spawned_arcs,"
        "offline_mean_s,offline_std_s,online_mean_s,online_std_s,reps,seed,digest\n";
    for (const BenchmarkRecord& r : records) {
        std::ostringstream ss;
        ss << r.encoding << ',' << r.legs << ',' << r.designed_nodes << ',' << r.designed_arcs
           << ',' << r.spawned_nodes << ',' << r.spawned_arcs << ',' << format_double(r.offline_mean_s)
           << ',' << format_double(r.offline_std_s) << ',' << format_double(r.online_mean_s) << ','
           << format_double(r.online_std_s) << ',' << r.repetitions << ',' << r.seed << ','
           << std::hex << r.digest << '\n';
        out += ss.str();
    }
    return out;
}

std::string benchmark_plot_data(const std::vector<BenchmarkRecord>& records) {
    std::string out = "# encoding legs offline_mean_s online_mean_s\n";
    for (const BenchmarkRecord& r : records) {
        out += r.encoding + " " + std::to_string(r.legs) + " " + format_double(r.offline_mean_s) +
               " " + format_double(r.online_mean_s) + "\n";
    }
    return out;
}

QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 4 || y.size() != n) throw ModelError("quadratic fit needs at least 4 points");
    // normal equations for the 3-parameter model
    double s[5] = {0, 0, 0, 0, 0};
    double t[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        double xi = x[i], p = 1;
        for (int k = 0; k <= 4; ++k) {
            s[k] += p;
            if (k <= 2) t[k] += p * y[i];
            p *= xi;
        }
    }
    double a[3][4] = {{s[0], s[1], s[2], t[0]}, {s[1], s[2], s[3], t[1]}, {s[2], s[3], s[4], t[2]}};
    // gaussian elimination with partial pivoting
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        if (a[col][col] == 0) throw ModelError("singular design matrix in quadratic fit");
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
        }
    }
    QuadraticFit fit;
    fit.b0 = a[0][3] / a[0][0];
    fit.b1 = a[1][3] / a[1][1];
    fit.b2 = a[2][3] / a[2][2];

    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = fit.b0 + fit.b1 * x[i] + fit.b2 * x[i] * x[i];
        rss += (y[i] - pred) * (y[i] - pred);
    }
    const double dof = static_cast<double>(n) - 3.0;
    if (dof <= 0) return fit;
    double sigma2 = rss / dof;
    // variance of b2 = sigma^2 * [ (X'X)^-1 ]_22, via the inverse of the
    // normal matrix computed from scratch
    double m[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
    double inv[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        std::swap(m[col], m[pivot]);
        std::swap(inv[col], inv[pivot]);
        double d = m[col][col];
        if (d == 0) return fit;
        for (int c = 0; c < 3; ++c) {
            m[col][c] /= d;
            inv[col][c] /= d;
        }
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = m[r][col];
            for (int c = 0; c < 3; ++c) {
                m[r][c] -= f * m[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    double se = std::sqrt(sigma2 * inv[2][2]);
    if (se == 0) {
        fit.p_quadratic = fit.b2 == 0 ? 1.0 : 0.0;
        return fit;
    }
    double tstat = fit.b2 / se;
    boost::math::students_t dist(dof);
    fit.p_quadratic = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(tstat)));
    return fit;
}

}  // namespace coop

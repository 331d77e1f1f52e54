#ifndef SNAPTRAJ_BENCH_HPP
#define SNAPTRAJ_BENCH_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "snaptraj/oracle.hpp"
#include "snaptraj/solver.hpp"
#include "snaptraj/trajectory_table.hpp"
#include "snaptraj/waypoints.hpp"

namespace snaptraj {

enum class BenchMethod { structured, dense, both };

// past this the dense path's cubic cost stops being a benchmark and starts
// being a space heater
constexpr int kDenseBenchCap = 200;

struct BenchRow {
    std::string method;
    int k = 0;
    double median_seconds = 0.0;
};

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Times solves of random-walk waypoint problems (the classic pattern:
/// positions everywhere, rest endpoints, s=5). One problem per k, shared by
/// all repetitions and both methods.
inline std::vector<BenchRow> run_bench(const std::vector<int>& ks,
                                       BenchMethod method, int reps,
                                       std::uint64_t seed) {
    if (reps < 1)
        throw ValidationError("benchmark needs at least one repetition");
    const bool structured =
        method == BenchMethod::structured || method == BenchMethod::both;
    const bool dense =
        method == BenchMethod::dense || method == BenchMethod::both;
    std::vector<BenchRow> rows;
    for (int k : ks) {
        if (k < 1)
            throw ValidationError("benchmark k must be positive");
        if (dense && k > kDenseBenchCap)
            throw ValidationError(
                "dense benchmark capped at k <= " +
                std::to_string(kDenseBenchCap) + ", got " + std::to_string(k));
        const WaypointDocument doc = random_walk_document(k, seed);
        const ProblemSpec spec = channel_problem(doc, doc.channels[0].second);
        if (structured) {
            std::vector<double> t(reps);
            for (int r = 0; r < reps; ++r) {
                const auto t0 = std::chrono::steady_clock::now();
                auto solved = solve_minimum_snap(spec);
                t[r] = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
                (void)solved;
            }
            rows.push_back({"structured", k, median(t)});
        }
        if (dense) {
            std::vector<double> t(reps);
            for (int r = 0; r < reps; ++r) {
                const auto t0 = std::chrono::steady_clock::now();
                auto solved = solve_dense(spec, Frame::nondimensional);
                t[r] = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
                (void)solved;
            }
            rows.push_back({"dense", k, median(t)});
        }
    }
    return rows;
}

inline void write_bench_csv(std::ostream& os,
                            const std::vector<BenchRow>& rows) {
    os << "method,k,median_seconds\n";
    for (const auto& r : rows)
        os << r.method << "," << r.k << "," << format_sig(r.median_seconds)
           << "\n";
}

} // namespace snaptraj

#endif

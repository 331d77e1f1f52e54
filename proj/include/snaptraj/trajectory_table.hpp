#ifndef SNAPTRAJ_TRAJECTORY_TABLE_HPP
#define SNAPTRAJ_TRAJECTORY_TABLE_HPP

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "snaptraj/spline.hpp"
#include "snaptraj/types.hpp"

namespace snaptraj {

/// 12 significant digits: enough to round-trip the solve tolerances without
/// dumping full double noise into the files.
inline std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Sampled multi-channel trajectory: one row per sample time, per channel
/// the value plus derivative columns up to `deriv_orders`.
struct TrajectoryTable {
    std::vector<std::string> channel_names;
    int deriv_orders = 2;
    std::vector<double> times;
    Eigen::MatrixXd values; // times.size() x channels*(1+deriv_orders)
    double sample_period = 0.0;
};

/// Samples t_0, t_0 + 1/rate, ... plus the final knot, which the fixed-step
/// ladder may miss; strictly increasing, both ends inclusive.
inline std::vector<double> sample_times(const TimeGrid& grid, double rate) {
    if (!(rate > 0.0))
        throw ValidationError("sample rate must be positive");
    const double t0 = grid.start();
    const double tk = grid.end();
    const double span = tk - t0;
    std::vector<double> out;
    for (long j = 0;; ++j) {
        const double t = t0 + static_cast<double>(j) / rate;
        if (t >= tk - 1e-9 * std::max(1.0, span))
            break;
        out.push_back(t);
    }
    out.push_back(tk);
    return out;
}

inline TrajectoryTable
sample_trajectories(const std::vector<std::pair<std::string, Spline>>& chans,
                    double rate, int deriv_orders = 2) {
    if (chans.empty())
        throw ValidationError("no channels to sample");
    TrajectoryTable table;
    table.deriv_orders = deriv_orders;
    table.sample_period = 1.0 / rate;
    table.times = sample_times(chans.front().second.grid, rate);
    const int cols = static_cast<int>(chans.size()) * (1 + deriv_orders);
    table.values.resize(static_cast<int>(table.times.size()), cols);
    int col = 0;
    for (const auto& [name, spline] : chans) {
        table.channel_names.push_back(name);
        for (int r = 0; r <= deriv_orders; ++r, ++col)
            for (std::size_t row = 0; row < table.times.size(); ++row)
                table.values(static_cast<int>(row), col) =
                    eval_spline(spline, table.times[row], r);
    }
    return table;
}

inline void write_csv(std::ostream& os, const TrajectoryTable& table) {
    os << "t";
    for (const auto& name : table.channel_names) {
        os << "," << name;
        for (int r = 1; r <= table.deriv_orders; ++r)
            os << "," << name << "_d" << r;
    }
    os << "\n";
    for (std::size_t row = 0; row < table.times.size(); ++row) {
        os << format_sig(table.times[row]);
        for (int c = 0; c < table.values.cols(); ++c)
            os << "," << format_sig(table.values(static_cast<int>(row), c));
        os << "\n";
    }
}

} // namespace snaptraj

#endif

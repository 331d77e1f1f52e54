#ifndef SNAPTRAJ_TESTS_HELPERS_HPP
#define SNAPTRAJ_TESTS_HELPERS_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "snaptraj/snaptraj.hpp"

namespace testutil {

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}
    double uniform(double a, double b) {
        return a + (b - a) * (static_cast<double>(eng() >> 11) * 0x1.0p-53);
    }
    int integer(int lo, int hi) { // inclusive
        return lo + static_cast<int>(eng() % static_cast<std::uint64_t>(
                                                 hi - lo + 1));
    }
};

/// Random well-posed instance: positions fixed at every boundary, rest
/// endpoints; optionally extra random fixed orders at interior boundaries.
inline snaptraj::ProblemSpec random_instance(Rng& rng, int max_k = 10,
                                             double dmin = 0.1,
                                             double dmax = 10.0,
                                             bool random_patterns = false) {
    snaptraj::ProblemSpec spec;
    const int svals[3] = {2, 3, 5};
    spec.continuity_depth = svals[rng.integer(0, 2)];
    spec.coeff_count = 2 * spec.continuity_depth;
    spec.segment_count = rng.integer(1, max_k);
    std::vector<double> times{rng.uniform(-10.0, 10.0)};
    for (int i = 0; i < spec.segment_count; ++i)
        times.push_back(times.back() + 2.0 * rng.uniform(dmin, dmax));
    spec.grid = snaptraj::TimeGrid(times);
    const int k = spec.segment_count;
    const int s = spec.continuity_depth;
    for (int j = 0; j <= k; ++j) {
        spec.constraints.fixed.push_back({j, 0, rng.uniform(-10.0, 10.0)});
        for (int r = 1; r < s; ++r) {
            if (j == 0 || j == k)
                spec.constraints.fixed.push_back({j, r, 0.0});
            else if (random_patterns && rng.uniform(0.0, 1.0) < 0.3)
                spec.constraints.fixed.push_back(
                    {j, r, rng.uniform(-2.0, 2.0)});
        }
    }
    return spec;
}

/// Random grid confined to |t| <= 5 with segment conditioning accepted by
/// the dimensional oracle's guard; regenerates until every block passes.
inline snaptraj::ProblemSpec small_time_instance(Rng& rng, int s) {
    for (;;) {
        snaptraj::ProblemSpec spec;
        spec.continuity_depth = s;
        spec.coeff_count = 2 * s;
        spec.segment_count = rng.integer(1, 6);
        std::vector<double> widths;
        double total = 0.0;
        for (int i = 0; i < spec.segment_count; ++i) {
            widths.push_back(rng.uniform(0.4, 1.2));
            total += widths.back();
        }
        std::vector<double> times{rng.uniform(-5.0, 5.0 - total)};
        for (double w : widths)
            times.push_back(times.back() + w);
        spec.grid = snaptraj::TimeGrid(times);
        bool ok = true;
        for (int i = 0; i < spec.segment_count && ok; ++i)
            ok = snaptraj::condition_number(snaptraj::build_A(
                     times[i], times[i + 1], spec.coeff_count, s)) <
                 snaptraj::kOracleConditionLimit;
        if (!ok)
            continue;
        const int k = spec.segment_count;
        for (int j = 0; j <= k; ++j) {
            spec.constraints.fixed.push_back({j, 0, rng.uniform(-10.0, 10.0)});
            if (j == 0 || j == k)
                for (int r = 1; r < s; ++r)
                    spec.constraints.fixed.push_back({j, r, 0.0});
        }
        return spec;
    }
}

/// Max relative gap between the endpoint-derivative vectors of two solved
/// splines (frame-independent comparison of the optimized d).
inline double d_relative_gap(const snaptraj::ProblemSpec& spec,
                             const snaptraj::Spline& a,
                             const snaptraj::Spline& b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < spec.segment_count; ++i)
        for (int side = 0; side < 2; ++side)
            for (int r = 0; r < spec.continuity_depth; ++r) {
                const double va = snaptraj::eval_segment_end(a, i, side, r);
                const double vb = snaptraj::eval_segment_end(b, i, side, r);
                num = std::max(num, std::abs(va - vb));
                den = std::max(den, std::abs(va));
            }
    return num / (1.0 + den);
}

/// Recursive adaptive Simpson; plenty for polynomial integrands.
template <typename F>
double adaptive_simpson(F f, double a, double b, double tol, int depth = 28) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    struct Rec {
        F& f;
        double tol;
        double step(double a, double m, double b, double fa, double fm,
                    double fb, double whole, int depth) {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return step(a, lm, m, fa, flm, fm, left, depth - 1) +
                   step(m, rm, b, fm, frm, fb, right, depth - 1);
        }
    } rec{f, tol};
    return rec.step(a, m, b, fa, fm, fb, whole, depth);
}

/// Expand a nondimensional piece into monomial coefficients in raw time t
/// by composing with tau(t) = (t - t_begin)/delta - 1.
inline Eigen::VectorXd dimensional_coefficients(
    const snaptraj::SegmentPolynomial& seg, double delta) {
    const int n = static_cast<int>(seg.coefficients.size());
    const double tc = seg.t_begin + delta; // tau = (t - tc) / delta
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < n; ++a) {
        double binom = 1.0;
        for (int b = 0; b <= a; ++b) {
            out[b] += seg.coefficients[a] * binom *
                      std::pow(-tc, a - b) / std::pow(delta, a);
            binom *= static_cast<double>(a - b) / (b + 1.0);
        }
    }
    return out;
}

/// Max relative gap between position samples of two solved splines.
inline double sampled_relative_gap(const snaptraj::ProblemSpec& spec,
                                   const snaptraj::Spline& a,
                                   const snaptraj::Spline& b,
                                   int samples = 200) {
    double num = 0.0, den = 0.0;
    const double t0 = spec.grid.start();
    const double span = spec.grid.end() - t0;
    for (int q = 0; q <= samples; ++q) {
        // min() keeps rounding from stepping a ulp past the domain end
        const double t = q == samples
                             ? spec.grid.end()
                             : std::min(t0 + span * q / samples,
                                        spec.grid.end());
        const double va = snaptraj::eval_spline(a, t, 0);
        const double vb = snaptraj::eval_spline(b, t, 0);
        num = std::max(num, std::abs(va - vb));
        den = std::max(den, std::abs(va));
    }
    return num / (1.0 + den);
}

} // namespace testutil

#endif

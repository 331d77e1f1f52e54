#ifndef SNAPTRAJ_SPLINE_HPP
#define SNAPTRAJ_SPLINE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "snaptraj/basis.hpp"
#include "snaptraj/types.hpp"

namespace snaptraj {

/// r-th derivative of the monomial polynomial at t:
/// sum over a >= r of a!/(a-r)! * t^{a-r} * p_a. Horner on the
/// differentiated coefficients.
inline double eval_derivative(const SegmentPolynomial& seg, double t, int r) {
    const int n = static_cast<int>(seg.coefficients.size());
    if (r >= n || r < 0)
        return 0.0;
    double acc = 0.0;
    for (int a = n - 1; a >= r; --a)
        acc = acc * t + falling_factorial(a, r) * seg.coefficients[a];
    return acc;
}

/// Dimensional r-th derivative of the spline at physical time t. Interior
/// knots evaluate on the left segment; the final knot is closed. In the
/// nondimensional frame the segment polynomial lives in
/// tau = (t - t_{i-1}) / Δ_i - 1, so the chain rule contributes Δ_i^{-r}.
inline double eval_spline(const Spline& spline, double t, int r) {
    const int i = spline.grid.segment_index(t);
    const SegmentPolynomial& seg = spline.segments[i];
    if (spline.frame == Frame::dimensional)
        return eval_derivative(seg, t, r);
    const double delta = spline.grid.widths[i];
    const double tau = (t - spline.grid.times[i]) / delta - 1.0;
    return std::pow(delta, -r) * eval_derivative(seg, tau, r);
}

/// Integral of the squared r-th derivative over the whole spline, in
/// physical time. For a nondimensional spline each piece contributes
/// Δ^{1-2r} * p^T Q_ref p; a dimensional piece uses its own interval's Q.
inline double snap_cost(const Spline& spline, int r) {
    double cost = 0.0;
    Eigen::MatrixXd Q_ref; // shared across pieces in the scaled frame
    for (int i = 0; i < spline.segment_count(); ++i) {
        const auto& seg = spline.segments[i];
        const int n = static_cast<int>(seg.coefficients.size());
        if (spline.frame == Frame::dimensional) {
            const Eigen::MatrixXd Q = build_Q(seg.t_begin, seg.t_end, n, r);
            cost += seg.coefficients.dot(Q * seg.coefficients);
        } else {
            if (Q_ref.rows() != n)
                Q_ref = build_Q(-1.0, 1.0, n, r);
            const double delta = spline.grid.widths[i];
            cost += std::pow(delta, 1 - 2 * r) *
                    seg.coefficients.dot(Q_ref * seg.coefficients);
        }
    }
    return cost;
}

/// Dimensional r-th derivative of segment i evaluated at one of its own
/// endpoints (side 0 = begin, 1 = end), regardless of which segment
/// eval_spline would pick at that knot.
inline double eval_segment_end(const Spline& spline, int i, int side, int r) {
    const SegmentPolynomial& seg = spline.segments[i];
    if (spline.frame == Frame::dimensional)
        return eval_derivative(seg, side == 0 ? seg.t_begin : seg.t_end, r);
    const double delta = spline.grid.widths[i];
    return std::pow(delta, -r) *
           eval_derivative(seg, side == 0 ? -1.0 : 1.0, r);
}

/// |jump| of each derivative order 0..s-1 across each interior knot,
/// ordered by knot then order. Empty for a single segment.
inline std::vector<double> continuity_residuals(const Spline& spline, int s) {
    std::vector<double> res;
    const int k = spline.segment_count();
    res.reserve(static_cast<std::size_t>(std::max(0, k - 1)) * s);
    for (int i = 0; i + 1 < k; ++i)
        for (int r = 0; r < s; ++r)
            res.push_back(std::abs(eval_segment_end(spline, i, 1, r) -
                                   eval_segment_end(spline, i + 1, 0, r)));
    return res;
}

/// Rebuild a spline from prescribed endpoint derivative values: for each
/// segment, solve (Gamma_i A_ref) p_i = d_i. Used to recover coefficients
/// from the optimized derivative vector and by perturbation tests.
inline Spline spline_from_boundary_derivatives(
    const ProblemSpec& spec, const ReferenceBasis& basis,
    const std::vector<Eigen::VectorXd>& d) {
    Spline out;
    out.frame = Frame::nondimensional;
    out.grid = spec.grid;
    out.segments.resize(spec.segment_count);
    for (int i = 0; i < spec.segment_count; ++i) {
        const Eigen::VectorXd gamma_inv =
            build_Gamma(spec.grid.widths[i], spec.coeff_count,
                        spec.continuity_depth)
                .cwiseInverse();
        auto& seg = out.segments[i];
        seg.coefficients = basis.lu.solve(gamma_inv.cwiseProduct(d[i]));
        seg.t_begin = spec.grid.times[i];
        seg.t_end = spec.grid.times[i + 1];
    }
    return out;
}

} // namespace snaptraj

#endif

#ifndef SNAPTRAJ_BASIS_HPP
#define SNAPTRAJ_BASIS_HPP

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "snaptraj/types.hpp"

namespace snaptraj {

/// Falling factorial a·(a−1)···(a−r+1), the coefficient picked up by
/// differentiating t^a r times.
inline double falling_factorial(int a, int r) {
    double f = 1.0;
    for (int q = 0; q < r; ++q)
        f *= static_cast<double>(a - q);
    return f;
}

/// Endpoint-derivative matrix of the monomial basis: rows are derivative
/// orders 0..s-1 at t0 followed by the same orders at t1, columns are
/// monomials 1, t, ..., t^{n-1}. Transposed confluent Vandermonde; square
/// and invertible when n = 2s and t0 != t1.
inline Eigen::MatrixXd build_A(double t0, double t1, int n, int s) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * s, n);
    const double ts[2] = {t0, t1};
    for (int e = 0; e < 2; ++e)
        for (int r = 0; r < s; ++r)
            for (int a = r; a < n; ++a)
                A(e * s + r, a) =
                    falling_factorial(a, r) * std::pow(ts[e], a - r);
    return A;
}

/// Gram matrix of the r-th monomial derivatives on [t0, t1], so that
/// p^T Q p = ∫ (d^r/dt^r Σ p_a t^a)^2 dt. Zero matrix when r >= n.
inline Eigen::MatrixXd build_Q(double t0, double t1, int n, int r) {
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (int a = r; a < n; ++a) {
        const double ca = falling_factorial(a, r);
        for (int b = r; b < n; ++b) {
            const int e = a + b - 2 * r + 1;
            Q(a, b) = ca * falling_factorial(b, r) *
                      (std::pow(t1, e) - std::pow(t0, e)) / e;
        }
    }
    return Q;
}

/// Diagonal of the derivative scaling Gamma: Δ^0, Δ^{-1}, ..., Δ^{-(s-1)}
/// repeated for both endpoints. Multiplying the reference endpoint matrix
/// on [-1,1] by Gamma turns nondimensional endpoint derivatives into
/// dimensional ones.
inline Eigen::VectorXd build_Gamma(double delta, int n, int s) {
    if (!(delta > 0.0))
        throw GridError("Gamma requires a positive segment half-width, got " +
                        std::to_string(delta));
    if (n != 2 * s)
        throw ValidationError("Gamma is defined for n = 2s");
    Eigen::VectorXd g(n);
    for (int e = 0; e < 2; ++e)
        for (int j = 0; j < s; ++j)
            g[e * s + j] = std::pow(delta, -j);
    return g;
}

/// 2-norm condition number via singular values; +inf when the smallest
/// singular value vanishes to machine precision.
inline double condition_number(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols())
        throw ValidationError("condition number needs a square matrix");
    if (M.rows() == 0)
        return 1.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(M.rows() - 1);
    if (smin == 0.0)
        return std::numeric_limits<double>::infinity();
    return smax / smin;
}

/// Free/fixed split of the s derivative orders at one boundary.
struct EndpointSelection {
    Eigen::MatrixXd sigma; // s x m, columns are basis vectors of free orders
    Eigen::VectorXd b;     // length s, prescribed values at fixed orders
    std::vector<int> free_orders;
    std::vector<int> fixed_orders;

    int free_count() const { return static_cast<int>(free_orders.size()); }
};

/// Per-boundary selection structure. A derivative fixed at an interior
/// boundary is fixed for both adjoining segments, so one entry per boundary
/// serves as the left segment's end and the right segment's start; this is
/// what lets the two segments share one junction variable.
struct Selection {
    std::vector<EndpointSelection> boundary; // k+1 entries
    int free_total = 0; // m, counting interior boundaries once per side

    const EndpointSelection& start(int segment) const {
        return boundary[segment];
    }
    const EndpointSelection& end(int segment) const {
        return boundary[segment + 1];
    }
};

inline Selection build_selection(const ProblemSpec& spec) {
    validate(spec);
    const int s = spec.continuity_depth;
    const int k = spec.segment_count;

    std::vector<std::vector<double>> value(k + 1);
    std::vector<std::vector<bool>> is_fixed(k + 1);
    for (int j = 0; j <= k; ++j) {
        value[j].assign(s, 0.0);
        is_fixed[j].assign(s, false);
    }
    for (const auto& c : spec.constraints.fixed) {
        value[c.boundary][c.order] = c.value;
        is_fixed[c.boundary][c.order] = true;
    }

    Selection sel;
    sel.boundary.resize(k + 1);
    for (int j = 0; j <= k; ++j) {
        auto& ep = sel.boundary[j];
        ep.b = Eigen::VectorXd::Zero(s);
        for (int r = 0; r < s; ++r) {
            if (is_fixed[j][r]) {
                ep.fixed_orders.push_back(r);
                ep.b[r] = value[j][r];
            } else {
                ep.free_orders.push_back(r);
            }
        }
        ep.sigma = Eigen::MatrixXd::Zero(s, ep.free_count());
        for (int c = 0; c < ep.free_count(); ++c)
            ep.sigma(ep.free_orders[c], c) = 1.0;
        // interior boundaries are an endpoint of two segments
        const int multiplicity = (j == 0 || j == k) ? 1 : 2;
        sel.free_total += multiplicity * ep.free_count();
    }
    return sel;
}

/// The shared reference blocks on [-1,1]: endpoint matrix, penalty Gram
/// matrix, one LU factorization reused by every segment, and the congruence
/// kernel K = A^{-T} Q A^{-1} that all segment Hessians are scalings of.
struct ReferenceBasis {
    int n = 0;
    int s = 0;
    Eigen::MatrixXd A;
    Eigen::MatrixXd Q;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    Eigen::MatrixXd K;
    double kappa = 0.0;
};

inline ReferenceBasis make_reference_basis(int n, int s) {
    if (n != 2 * s)
        throw ValidationError("reference basis requires n = 2s");
    ReferenceBasis rb;
    rb.n = n;
    rb.s = s;
    rb.A = build_A(-1.0, 1.0, n, s);
    rb.Q = build_Q(-1.0, 1.0, n, s - 1);
    rb.lu.compute(rb.A);
    const Eigen::MatrixXd Ainv =
        rb.lu.solve(Eigen::MatrixXd::Identity(n, n));
    rb.K = Ainv.transpose() * rb.Q * Ainv;
    rb.K = 0.5 * (rb.K + rb.K.transpose()).eval();
    rb.kappa = condition_number(rb.A);
    return rb;
}

/// Everything one segment contributes to the QP, in the scaled frame:
/// reference A and Q, this segment's Gamma diagonal, and the selection
/// structure at both ends. Q carries the segment weight Δ^{3-2s} when the
/// problem uses the weighted (time-integral) objective.
struct EndpointBlocks {
    Eigen::MatrixXd A;
    Eigen::MatrixXd Q;
    Eigen::VectorXd gamma;
    EndpointSelection start;
    EndpointSelection end;
};

inline double segment_weight(const ProblemSpec& spec, int i) {
    return spec.weighted_cost
               ? std::pow(spec.grid.widths[i], 3 - 2 * spec.continuity_depth)
               : 1.0;
}

inline EndpointBlocks endpoint_blocks(const ProblemSpec& spec,
                                      const Selection& sel, int i) {
    EndpointBlocks eb;
    eb.A = build_A(-1.0, 1.0, spec.coeff_count, spec.continuity_depth);
    eb.Q = segment_weight(spec, i) *
           build_Q(-1.0, 1.0, spec.coeff_count, spec.penalized_order());
    eb.gamma =
        build_Gamma(spec.grid.widths[i], spec.coeff_count, spec.continuity_depth);
    eb.start = sel.start(i);
    eb.end = sel.end(i);
    return eb;
}

} // namespace snaptraj

#endif

#ifndef SNAPTRAJ_SOLVER_HPP
#define SNAPTRAJ_SOLVER_HPP

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "snaptraj/basis.hpp"
#include "snaptraj/oracle.hpp"
#include "snaptraj/spline.hpp"
#include "snaptraj/types.hpp"

namespace snaptraj {

/// One segment's contribution to the reduced system over free endpoint
/// derivatives, partitioned by endpoint: quadratic blocks B (start/start),
/// C (start/end), D (end/end) and the load vectors from the fixed values.
struct SegmentTerms {
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;
    Eigen::VectorXd g_start;
    Eigen::VectorXd g_end;
};

/// Cholesky of a small SPD block with an explicit pivot guard. Failure of
/// the guard is the well-posedness probe: a constraint pattern that leaves
/// the minimizer underdetermined surfaces as a (numerically) zero pivot.
/// Accepts 0x0 blocks, which fully fixed endpoints produce.
class BlockCholesky {
public:
    BlockCholesky() = default;
    explicit BlockCholesky(const Eigen::MatrixXd& M) { compute(M); }

    bool compute(const Eigen::MatrixXd& M) {
        const int n = static_cast<int>(M.rows());
        L_ = M;
        ok_ = true;
        const double maxdiag = n > 0 ? M.diagonal().maxCoeff() : 0.0;
        for (int j = 0; j < n; ++j) {
            double pivot = L_(j, j) - L_.row(j).head(j).squaredNorm();
            if (pivot <= 0.0 || pivot < 1e-12 * maxdiag) {
                ok_ = false;
                return false;
            }
            pivot = std::sqrt(pivot);
            L_(j, j) = pivot;
            for (int i = j + 1; i < n; ++i)
                L_(i, j) = (L_(i, j) -
                            L_.row(i).head(j).dot(L_.row(j).head(j))) /
                           pivot;
        }
        return true;
    }

    bool ok() const { return ok_; }

    template <typename Derived>
    typename Derived::PlainObject
    solve(const Eigen::MatrixBase<Derived>& rhs) const {
        typename Derived::PlainObject X = rhs;
        L_.triangularView<Eigen::Lower>().solveInPlace(X);
        L_.transpose().triangularView<Eigen::Upper>().solveInPlace(X);
        return X;
    }

private:
    Eigen::MatrixXd L_;
    bool ok_ = false;
};

struct EliminationState {
    std::vector<Eigen::MatrixXd> Bbar;
    std::vector<Eigen::VectorXd> gbar;
    std::vector<BlockCholesky> factors;
};

/// Solution of the reduced system: one free-derivative vector per boundary
/// (interior boundaries are stored once and shared by both neighbouring
/// segments, which is what keeps the continuity rows exact) and one
/// multiplier vector per interior boundary.
struct FreeDerivatives {
    std::vector<Eigen::VectorXd> boundary_values; // k+1
    std::vector<Eigen::VectorXd> multipliers;     // k-1, free orders only
};

inline SegmentTerms segment_terms(const ProblemSpec& spec,
                                  const ReferenceBasis& basis,
                                  const Selection& sel, int i) {
    const int s = spec.continuity_depth;
    const double delta = spec.grid.widths[i];
    if (!(delta > 0.0))
        throw GridError("segment " + std::to_string(i) +
                        " has zero length; endpoint matrix singular");

    // K_i = A_i^{-T} Q_i A_i^{-1} with A_i = Gamma_i A_ref collapses to an
    // entrywise scaling of the shared kernel: Gamma^{-1} K Gamma^{-1} times
    // the segment weight. No per-segment factorization.
    Eigen::VectorXd ginv(2 * s);
    for (int e = 0; e < 2; ++e)
        for (int j = 0; j < s; ++j)
            ginv[e * s + j] = std::pow(delta, j);
    const double w = segment_weight(spec, i);
    const Eigen::MatrixXd K =
        w * (ginv * ginv.transpose()).cwiseProduct(basis.K);

    const EndpointSelection& st = sel.start(i);
    const EndpointSelection& en = sel.end(i);
    Eigen::VectorXd b(2 * s);
    b << st.b, en.b;
    const Eigen::VectorXd Kb = K * b;

    const int ms = st.free_count();
    const int me = en.free_count();
    SegmentTerms t;
    t.B.resize(ms, ms);
    t.C.resize(ms, me);
    t.D.resize(me, me);
    t.g_start.resize(ms);
    t.g_end.resize(me);
    for (int a = 0; a < ms; ++a) {
        const int ra = st.free_orders[a];
        t.g_start[a] = -Kb[ra];
        for (int c = 0; c < ms; ++c)
            t.B(a, c) = K(ra, st.free_orders[c]);
        for (int c = 0; c < me; ++c)
            t.C(a, c) = K(ra, s + en.free_orders[c]);
    }
    for (int a = 0; a < me; ++a) {
        const int ra = s + en.free_orders[a];
        t.g_end[a] = -Kb[ra];
        for (int c = 0; c < me; ++c)
            t.D(a, c) = K(ra, s + en.free_orders[c]);
    }
    return t;
}

inline SegmentTerms segment_terms(const ProblemSpec& spec, int i) {
    return segment_terms(
        spec, make_reference_basis(spec.coeff_count, spec.continuity_depth),
        build_selection(spec), i);
}

/// Block-Thomas forward sweep along the boundary chain. Bbar[i] is the
/// Schur-reduced diagonal block at boundary i (i = 0..k-1); the terminal
/// boundary k is reduced inside backward_substitution.
inline EliminationState
forward_elimination(const std::vector<SegmentTerms>& terms) {
    const int k = static_cast<int>(terms.size());
    EliminationState st;
    st.Bbar.resize(k);
    st.gbar.resize(k);
    st.factors.resize(k);

    st.Bbar[0] = terms[0].B;
    st.gbar[0] = terms[0].g_start;
    if (!st.factors[0].compute(st.Bbar[0]))
        throw IllPosedError(
            "free derivatives at segment 0 start are underdetermined", 0);
    for (int i = 1; i < k; ++i) {
        const SegmentTerms& prev = terms[i - 1];
        const Eigen::MatrixXd W = st.factors[i - 1].solve(prev.C);
        Eigen::MatrixXd Bb = terms[i].B + prev.D - prev.C.transpose() * W;
        st.Bbar[i] = 0.5 * (Bb + Bb.transpose());
        st.gbar[i] =
            terms[i].g_start + prev.g_end - W.transpose() * st.gbar[i - 1];
        if (!st.factors[i].compute(st.Bbar[i]))
            throw IllPosedError("problem ill-posed: reduced block at segment " +
                                    std::to_string(i) + " is singular",
                                i);
    }
    return st;
}

/// Terminal solve plus the backward sweep; also recovers the continuity
/// multipliers from the end-row stationarity equations for diagnostics.
inline FreeDerivatives
backward_substitution(const EliminationState& state,
                      const std::vector<SegmentTerms>& terms) {
    const int k = static_cast<int>(terms.size());
    FreeDerivatives fd;
    fd.boundary_values.resize(k + 1);

    const SegmentTerms& last = terms[k - 1];
    const Eigen::MatrixXd W = state.factors[k - 1].solve(last.C);
    Eigen::MatrixXd T = last.D - last.C.transpose() * W;
    T = 0.5 * (T + T.transpose()).eval();
    BlockCholesky tails(T);
    if (!tails.ok())
        throw IllPosedError("problem ill-posed: terminal reduced block at "
                            "segment " +
                                std::to_string(k - 1) + " is singular",
                            k - 1);
    fd.boundary_values[k] =
        tails.solve(last.g_end - W.transpose() * state.gbar[k - 1]);
    for (int i = k - 1; i >= 0; --i)
        fd.boundary_values[i] = state.factors[i].solve(
            state.gbar[i] - terms[i].C * fd.boundary_values[i + 1]);

    fd.multipliers.resize(k - 1);
    for (int j = 1; j < k; ++j) {
        const SegmentTerms& t = terms[j - 1];
        fd.multipliers[j - 1] = t.g_end -
                                t.C.transpose() * fd.boundary_values[j - 1] -
                                t.D * fd.boundary_values[j];
    }
    return fd;
}

/// Same stationarity equations the dense oracle assembles, evaluated
/// block-by-block in O(k); used for the report so huge solves never build
/// a dense system.
inline double
structured_kkt_residual(const std::vector<SegmentTerms>& terms,
                        const FreeDerivatives& fd) {
    const int k = static_cast<int>(terms.size());
    double res = 0.0;
    const auto absmax = [&](const Eigen::VectorXd& v) {
        if (v.size() > 0)
            res = std::max(res, v.cwiseAbs().maxCoeff());
    };
    for (int i = 0; i < k; ++i) {
        const SegmentTerms& t = terms[i];
        Eigen::VectorXd row_start = t.B * fd.boundary_values[i] +
                                    t.C * fd.boundary_values[i + 1] -
                                    t.g_start;
        if (i > 0)
            row_start -= fd.multipliers[i - 1];
        absmax(row_start);
        Eigen::VectorXd row_end = t.C.transpose() * fd.boundary_values[i] +
                                  t.D * fd.boundary_values[i + 1] - t.g_end;
        if (i + 1 < k)
            row_end += fd.multipliers[i];
        absmax(row_end);
    }
    return res;
}

/// Fixed values at a boundary merged with the optimized free values.
inline Eigen::VectorXd merge_boundary(const EndpointSelection& ep,
                                      const Eigen::VectorXd& f) {
    Eigen::VectorXd v = ep.b;
    for (int c = 0; c < ep.free_count(); ++c)
        v[ep.free_orders[c]] = f[c];
    return v;
}

inline std::pair<Spline, SolveReport>
solve_minimum_snap(const ProblemSpec& spec) {
    validate(spec);
    const auto t_begin = std::chrono::steady_clock::now();
    const int k = spec.segment_count;
    const int s = spec.continuity_depth;

    const Selection sel = build_selection(spec);
    const ReferenceBasis basis =
        make_reference_basis(spec.coeff_count, spec.continuity_depth);

    std::vector<SegmentTerms> terms;
    terms.reserve(k);
    for (int i = 0; i < k; ++i)
        terms.push_back(segment_terms(spec, basis, sel, i));

    const EliminationState state = forward_elimination(terms);
    const FreeDerivatives fd = backward_substitution(state, terms);

    std::vector<Eigen::VectorXd> d(k);
    for (int i = 0; i < k; ++i) {
        d[i].resize(2 * s);
        d[i] << merge_boundary(sel.boundary[i], fd.boundary_values[i]),
            merge_boundary(sel.boundary[i + 1], fd.boundary_values[i + 1]);
    }
    Spline spline = spline_from_boundary_derivatives(spec, basis, d);

    SolveReport report;
    report.cost = snap_cost(spline, spec.penalized_order());
    for (double v : continuity_residuals(spline, s))
        report.max_continuity_residual =
            std::max(report.max_continuity_residual, v);
    for (const auto& c : spec.constraints.fixed)
        report.max_constraint_residual = std::max(
            report.max_constraint_residual,
            std::abs(eval_spline(spline, spec.grid.times[c.boundary], c.order) -
                     c.value));
    report.kkt_residual = structured_kkt_residual(terms, fd);
    report.condition_estimate = basis.kappa;
    report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_begin)
            .count();
    return {std::move(spline), report};
}

/// Residual of the oracle-assembled reduced KKT system at a structured
/// solution; the slow, fully independent counterpart of
/// structured_kkt_residual.
inline double kkt_residual(const ProblemSpec& spec,
                           const FreeDerivatives& fd) {
    const DenseKktSystem sys = assemble_kkt(spec, Frame::nondimensional);
    const Selection sel = build_selection(spec);
    Eigen::VectorXd f(sys.m);
    for (int i = 0; i < sys.k; ++i) {
        const int ms = sel.start(i).free_count();
        const int me = sel.end(i).free_count();
        f.segment(sys.start_offset[i], ms) = fd.boundary_values[i];
        f.segment(sys.end_offset[i], me) = fd.boundary_values[i + 1];
    }
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(sys.E.rows());
    for (int j = 1; j < sys.k; ++j) {
        const auto& bd = sel.boundary[j];
        for (int c = 0; c < bd.free_count(); ++c)
            lambda[(j - 1) * sys.s + bd.free_orders[c]] =
                fd.multipliers[j - 1][c];
    }
    double res = 0.0;
    const Eigen::VectorXd r1 =
        sys.H * f + sys.E.transpose() * lambda - sys.rhs;
    if (r1.size() > 0)
        res = r1.cwiseAbs().maxCoeff();
    const Eigen::VectorXd r2 = sys.E * f;
    if (r2.size() > 0)
        res = std::max(res, r2.cwiseAbs().maxCoeff());
    return res;
}

} // namespace snaptraj

#endif

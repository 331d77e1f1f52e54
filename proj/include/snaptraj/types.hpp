#ifndef SNAPTRAJ_TYPES_HPP
#define SNAPTRAJ_TYPES_HPP

#include <Eigen/Core>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace snaptraj {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid knot vector or nonpositive segment width.
class GridError : public Error {
public:
    using Error::Error;
};

/// Inconsistent problem description (duplicate or conflicting constraints,
/// bad indices, n != 2s, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Evaluation outside the spline's time domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The reduced system is singular: the constraint pattern does not determine
/// a unique minimizer.
class IllPosedError : public Error {
public:
    IllPosedError(const std::string& what, int segment)
        : Error(what), segment_(segment) {}
    int segment() const { return segment_; }

private:
    int segment_;
};

/// A matrix required by a dense solve is too ill-conditioned to use.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double kappa)
        : Error(what), kappa_(kappa) {}
    double kappa() const { return kappa_; }

private:
    double kappa_;
};

/// Knot vector t_0 <= t_1 <= ... <= t_k together with the per-segment
/// half-widths (t_i - t_{i-1}) / 2 used by the scaled formulation.
struct TimeGrid {
    std::vector<double> times;
    std::vector<double> widths;

    TimeGrid() = default;

    explicit TimeGrid(std::vector<double> knots) : times(std::move(knots)) {
        if (times.size() < 2)
            throw GridError("time grid needs at least two knots");
        widths.resize(times.size() - 1);
        for (std::size_t i = 0; i + 1 < times.size(); ++i) {
            if (times[i + 1] < times[i])
                throw GridError("time grid must be nondecreasing at knot " +
                                std::to_string(i + 1));
            widths[i] = (times[i + 1] - times[i]) / 2.0;
        }
    }

    int segment_count() const { return static_cast<int>(widths.size()); }
    double start() const { return times.front(); }
    double end() const { return times.back(); }

    /// Segment containing t. Interior knots resolve to the left segment;
    /// the final knot is closed.
    int segment_index(double t) const {
        if (t < times.front() || t > times.back())
            throw DomainError("time " + std::to_string(t) +
                              " outside spline domain [" +
                              std::to_string(times.front()) + ", " +
                              std::to_string(times.back()) + "]");
        auto it = std::lower_bound(times.begin() + 1, times.end(), t);
        int idx = static_cast<int>(it - times.begin()) - 1;
        return std::min(idx, segment_count() - 1);
    }
};

/// One polynomial piece, coefficients in ascending monomial order over the
/// half-open interval [t_begin, t_end).
struct SegmentPolynomial {
    Eigen::VectorXd coefficients;
    double t_begin = 0.0;
    double t_end = 0.0;
};

/// Coefficient frame of a spline. Dimensional segments are polynomials in
/// raw time t; nondimensional segments are polynomials in the per-segment
/// variable tau = (t - t_{i-1}) / width_i - 1 on [-1, 1].
enum class Frame { dimensional, nondimensional };

struct Spline {
    std::vector<SegmentPolynomial> segments;
    TimeGrid grid;
    Frame frame = Frame::dimensional;

    int segment_count() const { return static_cast<int>(segments.size()); }
};

/// One prescribed derivative value: order `order` at knot `boundary`.
struct FixedDerivative {
    int boundary = 0;
    int order = 0;
    double value = 0.0;
};

struct ConstraintSet {
    std::vector<FixedDerivative> fixed;
};

/// Full description of one scalar trajectory problem: k polynomial segments
/// of n coefficients each, derivatives 0..s-1 continuous across knots, the
/// (s-1)-th derivative penalized.
struct ProblemSpec {
    int segment_count = 0;    // k
    int coeff_count = 0;      // n, must equal 2s
    int continuity_depth = 0; // s
    TimeGrid grid;
    ConstraintSet constraints;
    // Scale each segment's reference Hessian by width^(3-2s) so the objective
    // equals the time-domain integral. Disabling reproduces the unscaled
    // reference objective, which differs on grids with unequal widths.
    bool weighted_cost = true;

    int penalized_order() const { return continuity_depth - 1; }
};

struct SolveReport {
    double cost = 0.0;
    double max_continuity_residual = 0.0;
    double max_constraint_residual = 0.0;
    double kkt_residual = 0.0;
    double wall_time = 0.0;
    double condition_estimate = 0.0;
};

inline void validate(const ProblemSpec& spec) {
    if (spec.segment_count < 1)
        throw ValidationError("segment count must be positive");
    if (spec.continuity_depth < 1)
        throw ValidationError("continuity depth must be positive");
    if (spec.coeff_count != 2 * spec.continuity_depth)
        throw ValidationError(
            "coefficient count must equal twice the continuity depth (got n=" +
            std::to_string(spec.coeff_count) + ", s=" +
            std::to_string(spec.continuity_depth) + ")");
    if (spec.grid.segment_count() != spec.segment_count)
        throw ValidationError("time grid has " +
                              std::to_string(spec.grid.segment_count()) +
                              " segments, expected " +
                              std::to_string(spec.segment_count));
    for (int i = 0; i < spec.segment_count; ++i)
        if (!(spec.grid.widths[i] > 0.0))
            throw GridError("segment " + std::to_string(i) +
                            " has nonpositive length");

    std::vector<FixedDerivative> sorted = spec.constraints.fixed;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return std::tie(a.boundary, a.order) < std::tie(b.boundary, b.order);
    });
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const auto& c = sorted[i];
        if (c.boundary < 0 || c.boundary > spec.segment_count)
            throw ValidationError("constraint references boundary " +
                                  std::to_string(c.boundary) +
                                  " outside 0.." +
                                  std::to_string(spec.segment_count));
        if (c.order < 0 || c.order >= spec.continuity_depth)
            throw ValidationError("constraint order " +
                                  std::to_string(c.order) +
                                  " exceeds continuity depth " +
                                  std::to_string(spec.continuity_depth) +
                                  " at boundary " + std::to_string(c.boundary));
        if (i > 0 && sorted[i - 1].boundary == c.boundary &&
            sorted[i - 1].order == c.order) {
            if (sorted[i - 1].value == c.value)
                throw ValidationError("duplicate constraint (boundary " +
                                      std::to_string(c.boundary) + ", order " +
                                      std::to_string(c.order) + ")");
            throw ValidationError(
                "conflicting values for derivative " + std::to_string(c.order) +
                " at boundary " + std::to_string(c.boundary) + ": " +
                std::to_string(sorted[i - 1].value) + " vs " +
                std::to_string(c.value));
        }
    }
}

} // namespace snaptraj

#endif

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "snaptraj/snaptraj.hpp"

using namespace snaptraj;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

SegmentPolynomial piece(std::vector<double> c, double t0, double t1) {
    SegmentPolynomial seg;
    seg.coefficients = Eigen::Map<Eigen::VectorXd>(c.data(),
                                                   static_cast<long>(c.size()));
    seg.t_begin = t0;
    seg.t_end = t1;
    return seg;
}

Spline single(std::vector<double> c, double t0, double t1, Frame frame) {
    Spline sp;
    sp.grid = TimeGrid({t0, t1});
    sp.frame = frame;
    sp.segments.push_back(piece(std::move(c), t0, t1));
    return sp;
}

} // namespace

TEST_CASE("eval_derivative matches hand differentiation") {
    const auto cubic = piece({0.0, 0.0, 3.0, -2.0}, 0.0, 1.0); // 3t^2 - 2t^3
    CHECK(eval_derivative(cubic, 1.0, 0) == Approx(1.0));
    CHECK(eval_derivative(cubic, 0.5, 0) == Approx(0.5));
    CHECK(eval_derivative(cubic, 0.5, 1) == Approx(1.5)); // 6t - 6t^2
    CHECK(eval_derivative(cubic, 0.0, 2) == Approx(6.0)); // 6 - 12t
    CHECK(eval_derivative(cubic, 1.0, 3) == Approx(-12.0));

    const auto constant = piece({5.0}, 0.0, 1.0);
    CHECK(eval_derivative(constant, 0.3, 0) == Approx(5.0));
    CHECK(eval_derivative(constant, 0.3, 1) == 0.0); // r >= n
    CHECK(eval_derivative(cubic, 0.7, 4) == 0.0);
    CHECK(eval_derivative(cubic, 0.7, -1) == 0.0);
}

TEST_CASE("eval_derivative agrees with central differences") {
    testutil::Rng rng(101);
    const double h = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> c(8);
        for (auto& v : c)
            v = rng.uniform(-2.0, 2.0);
        const auto seg = piece(c, -1.0, 1.0);
        const double t = rng.uniform(-1.5, 1.5);
        for (int r = 1; r <= 3; ++r) {
            const double exact = eval_derivative(seg, t, r);
            const double fd = (eval_derivative(seg, t + h, r - 1) -
                               eval_derivative(seg, t - h, r - 1)) /
                              (2.0 * h);
            CHECK(std::abs(fd - exact) <= 1e-6 * (1.0 + std::abs(exact)));
        }
    }
}

TEST_CASE("eval_spline maps physical time into the scaled variable") {
    // tau = (t - 1)/1 - 1 on [1,3]: value at t = 2 is the tau = 0 value
    const auto sp = single({7.0, 99.0, -3.0, 4.0}, 1.0, 3.0,
                           Frame::nondimensional);
    CHECK(eval_spline(sp, 2.0, 0) == Approx(7.0));

    // chain rule: d/dt = delta^{-1} d/dtau, checked by differencing the
    // spline itself in physical time
    const double h = 1e-6;
    for (double t : {1.2, 1.9, 2.6}) {
        const double fd =
            (eval_spline(sp, t + h, 0) - eval_spline(sp, t - h, 0)) / (2.0 * h);
        CHECK(std::abs(fd - eval_spline(sp, t, 1)) <= 1e-5);
    }

    const auto dim = single({0.0, 0.0, 3.0, -2.0}, 0.0, 1.0,
                            Frame::dimensional);
    CHECK(eval_spline(dim, 0.5, 0) == Approx(0.5));
    CHECK(eval_spline(dim, 0.5, 1) == Approx(1.5));
}

TEST_CASE("frame expansion reproduces the nondimensional evaluation") {
    testutil::Rng rng(202);
    for (int trial = 0; trial < 20; ++trial) {
        // monomial re-centering is only stable near the origin at small
        // |t_c|/delta -- the very effect the scaled frame removes
        const double t0 = rng.uniform(-0.5, 0.5);
        const double delta = rng.uniform(0.6, 1.0);
        std::vector<double> c(10);
        for (auto& v : c)
            v = rng.uniform(-1.0, 1.0);
        const auto sp =
            single(c, t0, t0 + 2.0 * delta, Frame::nondimensional);
        SegmentPolynomial dim;
        dim.coefficients =
            testutil::dimensional_coefficients(sp.segments[0], delta);
        for (int q = 0; q <= 10; ++q) {
            // rounding can push the last sample a ulp past the knot
            const double t =
                std::min(t0 + 2.0 * delta * q / 10.0, sp.grid.end());
            const double a = eval_spline(sp, t, 0);
            const double b = eval_derivative(dim, t, 0);
            CHECK(std::abs(a - b) <= 1e-8 * (1.0 + std::abs(a)));
        }
    }
}

TEST_CASE("eval_spline picks the left segment at knots and closes the end") {
    Spline sp;
    sp.grid = TimeGrid({0.0, 1.0, 2.0});
    sp.frame = Frame::dimensional;
    sp.segments.push_back(piece({1.0}, 0.0, 1.0));
    sp.segments.push_back(piece({2.0}, 1.0, 2.0));
    CHECK(eval_spline(sp, 1.0, 0) == 1.0); // interior knot -> left segment
    CHECK(eval_spline(sp, 2.0, 0) == 2.0); // final knot closed
    CHECK(eval_spline(sp, 0.0, 0) == 1.0);
    CHECK_THROWS_AS(eval_spline(sp, 2.0 + 1e-9, 0), DomainError);
    CHECK_THROWS_AS(eval_spline(sp, -0.1, 0), DomainError);
}

TEST_CASE("snap_cost integrates the squared derivative") {
    const auto cubic = single({0.0, 0.0, 3.0, -2.0}, 0.0, 1.0,
                              Frame::dimensional);
    CHECK(snap_cost(cubic, 2) == Approx(12.0));  // int (6-12t)^2
    CHECK(snap_cost(cubic, 1) == Approx(1.2));   // int (6t-6t^2)^2
    CHECK(snap_cost(cubic, 4) == 0.0);           // r >= n
    CHECK(snap_cost(single({5.0}, 0.0, 2.0, Frame::dimensional), 1) == 0.0);

    // the same cubic written in tau = 2t - 1
    const auto scaled = single({0.5, 0.75, 0.0, -0.25}, 0.0, 1.0,
                               Frame::nondimensional);
    CHECK(snap_cost(scaled, 2) == Approx(12.0));
    CHECK(snap_cost(scaled, 1) == Approx(1.2));
}

TEST_CASE("snap_cost is invariant under time reversal") {
    const auto fwd = single({0.0, 0.0, 0.0, 1.0}, 0.0, 1.0,
                            Frame::dimensional);
    // t^3 reflected onto [1,2]: (2-t)^3
    const auto rev = single({8.0, -12.0, 6.0, -1.0}, 1.0, 2.0,
                            Frame::dimensional);
    CHECK(snap_cost(fwd, 2) == Approx(snap_cost(rev, 2)));
    CHECK(snap_cost(fwd, 1) == Approx(snap_cost(rev, 1)));
}

TEST_CASE("continuity_residuals reports jumps knot by knot") {
    ProblemSpec spec;
    spec.segment_count = 2;
    spec.continuity_depth = 2;
    spec.coeff_count = 4;
    spec.grid = TimeGrid({0.0, 1.0, 2.0});
    spec.constraints.fixed = {{0, 0, 0.0}, {0, 1, 0.0}, {1, 0, 1.0},
                              {2, 0, 0.0}, {2, 1, 0.0}};
    auto [spline, report] = solve_minimum_snap(spec);
    auto res = continuity_residuals(spline, 2);
    REQUIRE(res.size() == 2); // one interior knot, orders 0 and 1
    CHECK(res[0] <= 1e-12);
    CHECK(res[1] <= 1e-12);

    spline.segments[1].coefficients[0] += 0.125;
    res = continuity_residuals(spline, 2);
    CHECK(res[0] >= 0.1); // the value jump shows up at order 0
    CHECK(res[1] <= 1e-9); // slope untouched

    const auto one = single({1.0, 2.0}, 0.0, 1.0, Frame::dimensional);
    CHECK(continuity_residuals(one, 1).empty());
}

TEST_CASE("TimeGrid stores half-widths and locates segments") {
    const TimeGrid grid({0.0, 1.0, 4.0});
    REQUIRE(grid.segment_count() == 2);
    CHECK(grid.widths[0] == 0.5);
    CHECK(grid.widths[1] == 1.5);
    CHECK(grid.start() == 0.0);
    CHECK(grid.end() == 4.0);
    CHECK(grid.segment_index(0.0) == 0);
    CHECK(grid.segment_index(0.999) == 0);
    CHECK(grid.segment_index(1.0) == 0); // left segment at interior knots
    CHECK(grid.segment_index(1.001) == 1);
    CHECK(grid.segment_index(4.0) == 1); // closed final knot
    CHECK_THROWS_AS(grid.segment_index(4.0001), DomainError);
    CHECK_THROWS_AS(grid.segment_index(-0.0001), DomainError);

    CHECK_THROWS_AS(TimeGrid({1.0}), GridError);
    CHECK_THROWS_AS(TimeGrid({0.0, 2.0, 1.0}), GridError);
    CHECK_NOTHROW(TimeGrid({0.0, 1.0, 1.0})); // flagged later by validate
}

TEST_CASE("validate rejects malformed problems") {
    ProblemSpec spec;
    spec.segment_count = 1;
    spec.continuity_depth = 2;
    spec.coeff_count = 4;
    spec.grid = TimeGrid({0.0, 1.0});
    spec.constraints.fixed = {{0, 0, 0.0}, {0, 1, 0.0}, {1, 0, 1.0},
                              {1, 1, 0.0}};
    CHECK_NOTHROW(validate(spec));

    auto bad = spec;
    bad.coeff_count = 5;
    CHECK_THROWS_AS(validate(bad), ValidationError);

    bad = spec;
    bad.segment_count = 2;
    CHECK_THROWS_AS(validate(bad), ValidationError);

    bad = spec;
    bad.grid = TimeGrid({0.0, 0.0});
    CHECK_THROWS_AS(validate(bad), GridError);

    bad = spec;
    bad.constraints.fixed.push_back({2, 0, 0.0});
    CHECK_THROWS_AS(validate(bad), ValidationError);

    bad = spec;
    bad.constraints.fixed.push_back({0, 2, 0.0});
    CHECK_THROWS_AS(validate(bad), ValidationError);

    bad = spec;
    bad.constraints.fixed.push_back({0, 0, 0.0});
    CHECK_THROWS_WITH(validate(bad), ContainsSubstring("duplicate"));

    bad = spec;
    bad.constraints.fixed.push_back({0, 0, 3.0});
    CHECK_THROWS_WITH(validate(bad), ContainsSubstring("conflicting"));
}

TEST_CASE("penalized order trails the continuity depth by one") {
    ProblemSpec spec;
    spec.continuity_depth = 5;
    CHECK(spec.penalized_order() == 4);
    spec.continuity_depth = 2;
    CHECK(spec.penalized_order() == 1);
}

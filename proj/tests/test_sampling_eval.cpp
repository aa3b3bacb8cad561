#include "vpp/sampling_eval.hpp"

#include "vpp/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace vpp;

namespace {

DisparityMap checkerboard_gt(int w, int h) {
    DisparityMap gt(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            gt.at(y, x) = ((x + y) % 3 == 0) ? kInvalidDisparity
                                             : static_cast<float>(10 + (x + 2 * y) % 40);
    return gt;
}

}  // namespace

TEST_CASE("sample_hints: density edge cases") {
    const DisparityMap gt = checkerboard_gt(50, 20);
    CHECK(sample_hints(gt, 0.0, 1).empty());

    const auto all = sample_hints(gt, 1.0, 1);
    CHECK(static_cast<Eigen::Index>(all.size()) == gt.valid_count());

    CHECK_THROWS_AS(sample_hints(gt, -0.1, 1), std::domain_error);
    CHECK_THROWS_AS(sample_hints(gt, 1.1, 1), std::domain_error);
}

TEST_CASE("sample_hints: exact count, values from GT, valid pixels only") {
    DisparityMap gt(50, 20);  // exactly 1000 pixels, all valid
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 50; ++x) gt.at(y, x) = static_cast<float>(x + y);
    const auto hints = sample_hints(gt, 0.05, 7);
    CHECK(hints.size() == 50);
    for (const Hint& h : hints) CHECK(h.d == gt.at(h.y, h.x));

    std::set<std::pair<int, int>> unique;
    for (const Hint& h : hints) unique.insert({h.x, h.y});
    CHECK(unique.size() == hints.size());

    const DisparityMap holes = checkerboard_gt(50, 20);
    for (const Hint& h : sample_hints(holes, 0.2, 3))
        CHECK(disparity_valid(holes.at(h.y, h.x)));
}

TEST_CASE("sample_hints: deterministic per seed, ~5% pairwise overlap") {
    const DisparityMap gt = checkerboard_gt(400, 250);
    const auto a1 = sample_hints(gt, 0.05, 42);
    const auto a2 = sample_hints(gt, 0.05, 42);
    REQUIRE(a1.size() == a2.size());
    for (std::size_t i = 0; i < a1.size(); ++i) {
        CHECK(a1[i].x == a2[i].x);
        CHECK(a1[i].y == a2[i].y);
    }

    const auto b = sample_hints(gt, 0.05, 43);
    std::set<std::pair<int, int>> sa;
    for (const Hint& h : a1) sa.insert({h.x, h.y});
    int overlap = 0;
    for (const Hint& h : b) overlap += sa.count({h.x, h.y});
    const double frac = static_cast<double>(overlap) / static_cast<double>(b.size());
    CHECK(frac > 0.03);
    CHECK(frac < 0.07);
}

TEST_CASE("sample_hints: output sorted ascending (y, x)") {
    const DisparityMap gt = checkerboard_gt(64, 32);
    const auto hints = sample_hints(gt, 0.3, 5);
    for (std::size_t i = 1; i < hints.size(); ++i) {
        const bool ordered = hints[i - 1].y < hints[i].y ||
                             (hints[i - 1].y == hints[i].y && hints[i - 1].x < hints[i].x);
        CHECK(ordered);
    }
}

TEST_CASE("evaluate: hand-countable example") {
    DisparityMap disp(3, 1), gt(3, 1);
    disp.values << 2.0f, 2.0f, 2.0f;
    gt.values << 0.0f, 1.0f, 2.0f;
    const MetricsReport r = evaluate(disp, gt);
    CHECK(r.evaluated_count == 3);
    CHECK(r.bad1 == doctest::Approx(100.0 / 3.0));  // only error 2 exceeds 1
    CHECK(r.bad2 == 0.0);                           // error 2 is not > 2
    CHECK(r.avg_px == doctest::Approx(1.0));
    CHECK(r.coverage == 1.0);
}

TEST_CASE("evaluate: identity prediction scores zero") {
    const DisparityMap gt = checkerboard_gt(40, 30);
    const MetricsReport r = evaluate(gt, gt);
    CHECK(r.bad1 == 0.0);
    CHECK(r.bad4 == 0.0);
    CHECK(r.avg_px == 0.0);
    CHECK(r.evaluated_count == gt.valid_count());
}

TEST_CASE("evaluate: invalid predictions are bad at every tau") {
    DisparityMap disp(4, 1), gt(4, 1);
    disp.values.setConstant(kInvalidDisparity);
    gt.values.setConstant(5.0f);
    const MetricsReport r = evaluate(disp, gt);
    CHECK(r.bad1 == 100.0);
    CHECK(r.bad4 == 100.0);
    CHECK(r.coverage == 0.0);
    CHECK(r.avg_px == 0.0);  // no valid predictions to average
}

TEST_CASE("evaluate: badtau monotone in tau, mask respected") {
    Rng rng(91);
    DisparityMap disp(80, 60), gt(80, 60);
    for (int y = 0; y < 60; ++y)
        for (int x = 0; x < 80; ++x) {
            gt.at(y, x) = static_cast<float>(rng.below(64));
            disp.at(y, x) = gt.at(y, x) + static_cast<float>(rng.unit() * 8.0 - 4.0);
        }
    const MetricsReport r = evaluate(disp, gt);
    CHECK(r.bad1 >= r.bad2);
    CHECK(r.bad2 >= r.bad3);
    CHECK(r.bad3 >= r.bad4);

    PlaneU8 mask = PlaneU8::Zero(60, 80);
    mask.topRows(30).setConstant(1);
    const MetricsReport half = evaluate(disp, gt, &mask);
    CHECK(half.evaluated_count == 80 * 30);

    DisparityMap small(8, 8);
    CHECK_THROWS_AS(evaluate(small, gt), std::invalid_argument);
}

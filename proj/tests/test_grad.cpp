#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace dmpm {
namespace {

// Rubber block between a clamped strip (left) and a driven strip (right).
struct Driven {
  Model model;
  ParticleSet<double> state;
  WindowSpec window;
};

Driven driven_block(int controls, double vscale = 0.2, std::uint64_t seed = 7) {
  Driven d;
  const GridSpec g = test::small_grid();
  d.model = test::free_model(g, test::rubber(50.0, 50.0), Vec2d(0.0, -9.81));
  d.model.bc.regions.push_back({"clamp", select_nodes(g, [](int i, int, const Vec2d&) { return i <= 7; }),
                                {AxisConstraint::Fixed(), AxisConstraint::Fixed()}});
  d.model.bc.regions.push_back({"drive", select_nodes(g, [](int i, int, const Vec2d&) { return i >= 17; }),
                                {AxisConstraint::Fixed(), AxisConstraint::Channel(0)}});
  d.state = seed_rectangle(Vec2d(0.6, 1.0), Vec2d(1.2, 0.2), 0.1, 2, 1100.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : d.state.v) v = Vec2d(vscale * u(rng), vscale * u(rng));
  d.window.controls = controls;
  d.window.steps_per_control = 10;
  d.window.dt = 5e-4;
  d.window.channel = 0;
  return d;
}

std::vector<double> thetas(int n, double range, std::uint64_t seed) {
  return random_controls(static_cast<std::size_t>(n), range, seed);
}

TEST(WindowCost, ZeroLengthWindow) {
  const Driven d = driven_block(0);
  const std::vector<double> theta;
  const WindowResult<double> r = window_cost(d.state, std::span<const double>(theta), d.window, d.model);
  EXPECT_EQ(r.cost, 0.0);
  EXPECT_TRUE(test::same_state(r.end_state, d.state));
  const WindowGradient g = window_grad(d.state, std::span<const double>(theta), d.window, d.model);
  EXPECT_TRUE(g.grad.empty());
  EXPECT_EQ(g.cost, 0.0);
}

TEST(WindowCost, LengthMismatchThrows) {
  const Driven d = driven_block(3);
  const std::vector<double> theta(2, 0.0);
  EXPECT_THROW(window_cost(d.state, std::span<const double>(theta), d.window, d.model), ConfigError);
  EXPECT_THROW(window_grad(d.state, std::span<const double>(theta), d.window, d.model), ConfigError);
}

TEST(WindowCost, ExactRestHasZeroCostAndGradient) {
  Driven d = driven_block(4, 0.0);
  d.model.gravity = Vec2d::Zero();
  const std::vector<double> theta(4, 0.0);
  const WindowGradient g = window_grad(d.state, std::span<const double>(theta), d.window, d.model);
  EXPECT_EQ(g.cost, 0.0);
  for (double x : g.grad) EXPECT_EQ(x, 0.0);
}

TEST(WindowCost, MatchesRollout) {
  const Driven d = driven_block(3);
  const std::vector<double> theta = thetas(3, 0.3, 1);
  const WindowResult<double> w = window_cost(d.state, std::span<const double>(theta), d.window, d.model);
  ControlSequence seq;
  seq.values = theta;
  seq.hold = d.window.hold();
  RolloutOptions opt;
  opt.t1 = d.window.hold() * 3;
  opt.dt = d.window.dt;
  opt.record_every = 0;
  const RolloutRecord r = rollout(d.state, d.model, &seq, opt);
  EXPECT_NEAR(w.cost, r.cost, 1e-12 * r.cost);
  EXPECT_TRUE(test::same_state(w.end_state, r.final_state));
}

TEST(WindowCost, CostIsAdditiveOverSubWindows) {
  Driven d = driven_block(5);
  const std::vector<double> theta = thetas(5, 0.3, 2);
  const WindowResult<double> all = window_cost(d.state, std::span<const double>(theta), d.window, d.model);
  WindowSpec a = d.window, b = d.window;
  a.controls = 2;
  b.controls = 3;
  const std::span<const double> th(theta);
  const WindowResult<double> ra = window_cost(d.state, th.subspan(0, 2), a, d.model);
  const WindowResult<double> rb = window_cost(ra.end_state, th.subspan(2), b, d.model);
  EXPECT_NEAR(all.cost, ra.cost + rb.cost, 1e-13 * all.cost);
  EXPECT_TRUE(test::same_state(all.end_state, rb.end_state));
}

TEST(WindowGrad, PrimalMatchesDoubleRollout) {
  const Driven d = driven_block(4);
  const std::vector<double> theta = thetas(4, 0.3, 3);
  const WindowResult<double> r = window_cost(d.state, std::span<const double>(theta), d.window, d.model);
  const WindowGradient g = window_grad(d.state, std::span<const double>(theta), d.window, d.model);
  EXPECT_NEAR(g.cost, r.cost, 1e-12 * r.cost);
  EXPECT_LE(test::max_abs_diff(g.end_state.x, r.end_state.x), 1e-12);
}

TEST(WindowGrad, InsensitiveChannelHasZeroGradient) {
  Driven d = driven_block(3);
  // Channel 1 drives a corner patch that never carries mass.
  d.model.bc.regions.push_back({"far", select_nodes(d.model.grid, [](int i, int j, const Vec2d&) {
                                   return i <= 2 && j >= 21;
                                 }),
                                {AxisConstraint::Free(), AxisConstraint::Channel(1)}});
  d.window.channel = 1;
  const std::vector<double> theta = thetas(3, 0.3, 4);
  const WindowGradient g = window_grad(d.state, std::span<const double>(theta), d.window, d.model);
  EXPECT_GT(g.cost, 0.0);
  for (double x : g.grad) EXPECT_EQ(x, 0.0);
}

TEST(WindowGrad, DoublingMassDoublesCostAndGradient) {
  // Doubling masses, density, moduli and damping leaves accelerations
  // unchanged bit for bit, so the kinetic cost scales by exactly 2.
  const Driven d = driven_block(3);
  Driven h = d;
  for (double& m : h.state.mass) m *= 2.0;
  h.model.material.density *= 2.0;
  h.model.material.lambda *= 2.0;
  h.model.material.mu *= 2.0;
  h.model.material.lambda_d *= 2.0;
  h.model.material.mu_d *= 2.0;
  const std::vector<double> theta = thetas(3, 0.3, 5);
  const WindowGradient a = window_grad(d.state, std::span<const double>(theta), d.window, d.model);
  const WindowGradient b = window_grad(h.state, std::span<const double>(theta), h.window, h.model);
  EXPECT_EQ(b.cost, 2.0 * a.cost);
  for (std::size_t i = 0; i < theta.size(); ++i) EXPECT_EQ(b.grad[i], 2.0 * a.grad[i]);
}

TEST(FiniteDifference, QuadraticAndLinear) {
  const std::vector<double> x{0.5, -1.25, 2.0};
  auto quad = [](std::span<const double> t) { return 3.0 * t[0] * t[0] - t[1] * t[2] + t[2] * t[2]; };
  const std::vector<double> g = central_differences(quad, std::span<const double>(x), 1e-3);
  EXPECT_NEAR(g[0], 3.0, 1e-10);
  EXPECT_NEAR(g[1], -2.0, 1e-10);
  EXPECT_NEAR(g[2], 5.25, 1e-10);
  auto lin = [](std::span<const double> t) { return 2.0 * t[0] - 0.5 * t[1] + 0.25 * t[2]; };
  const std::vector<double> l = central_differences(lin, std::span<const double>(x), 0.5);
  EXPECT_DOUBLE_EQ(l[0], 2.0);
  EXPECT_DOUBLE_EQ(l[1], -0.5);
  EXPECT_DOUBLE_EQ(l[2], 0.25);
  EXPECT_THROW(central_differences(lin, std::span<const double>(x), 0.0), ConfigError);
}

TEST(FiniteDifference, ErrorMetric) {
  const std::vector<double> g{1.0, -2.0, 1e-10, 0.0};
  const std::vector<double> r{1.1, -2.0, 2e-10, 1e-9};
  const std::vector<double> e = gradient_errors(g, r);
  EXPECT_NEAR(e[0], 0.1, 1e-12);
  EXPECT_EQ(e[1], 0.0);
  EXPECT_NEAR(e[2], 1e-10 / 2.0, 1e-20);
  EXPECT_NEAR(e[3], 1e-9 / 2.0, 1e-20);
  EXPECT_NEAR(max_of(e), 0.1, 1e-12);
}

TEST(WindowGrad, MatchesFiniteDifferences) {
  const Driven d = driven_block(4);
  const std::vector<double> theta = thetas(4, 0.3, 6);
  GradcheckOptions opt;
  opt.delta = 1e-6;
  const GradientReport rep = check_gradient(d.state, std::span<const double>(theta), d.window, d.model, opt);
  EXPECT_LE(rep.max_rel_error, 1e-6);
  EXPECT_LE(rep.max_rel_error_fine, 1e-5);
  const std::vector<double> fd = fd_oracle(d.state, std::span<const double>(theta), d.window, d.model, 1e-5);
  EXPECT_LE(max_of(gradient_errors(rep.grad, fd)), 1e-5);
}

TEST(WindowGrad, ChunkedLanesAreCausal) {
  // Ten controls take two lane chunks. The second chunk's gradient equals
  // the gradient of the tail window started from the state after the first
  // eight holds; costs before a hold do not depend on its control.
  const Driven d = driven_block(10, 0.2, 8);
  const std::vector<double> theta = thetas(10, 0.3, 7);
  const WindowGradient g = window_grad(d.state, std::span<const double>(theta), d.window, d.model);
  ASSERT_EQ(g.grad.size(), 10u);
  WindowSpec head = d.window, tail = d.window;
  head.controls = 8;
  tail.controls = 2;
  const std::span<const double> th(theta);
  const WindowResult<double> pre = window_cost(d.state, th.subspan(0, 8), head, d.model);
  const WindowGradient t = window_grad(pre.end_state, th.subspan(8), tail, d.model);
  EXPECT_EQ(g.grad[8], t.grad[0]);
  EXPECT_EQ(g.grad[9], t.grad[1]);

  const std::vector<double> fd =
      fd_oracle(d.state, th, d.window, d.model, 1e-6, FdPrecision::kExtended);
  EXPECT_LE(max_of(gradient_errors(g.grad, fd)), 1e-6);
}

TEST(WindowGrad, Deterministic) {
  const Driven d = driven_block(3);
  const std::vector<double> theta = thetas(3, 0.3, 9);
  const WindowGradient a = window_grad(d.state, std::span<const double>(theta), d.window, d.model);
  const WindowGradient b = window_grad(d.state, std::span<const double>(theta), d.window, d.model);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.grad, b.grad);
}

TEST(WindowCases, HoldAlignedAndDistinct) {
  const RopeScenario sc = build_rope(test::small_rope_config());
  const std::vector<WindowCase> cases = random_window_cases(sc, 3, 8, 0.5, 1);
  ASSERT_EQ(cases.size(), 3u);
  const double hold = sc.config.hold;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const double k = (cases[i].t_start - sc.disturbance_end()) / hold;
    EXPECT_NEAR(k, std::round(k), 1e-9);
    EXPECT_LE(cases[i].t_start + 8 * hold, sc.config.horizon + 1e-9);
    if (i > 0) EXPECT_GT(cases[i].t_start, cases[i - 1].t_start);
    for (double x : cases[i].theta) EXPECT_LE(std::abs(x), 0.5);
  }
  EXPECT_THROW(random_window_cases(sc, 1, sc.control_steps() + 1, 0.5, 1), ConfigError);
}

}  // namespace
}  // namespace dmpm

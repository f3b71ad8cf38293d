#include "tempofair/instance_gen.hpp"

#include <algorithm>
#include <numeric>

#include "tempofair/errors.hpp"
#include "tempofair/objective.hpp"

namespace tempofair {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below: n must be positive");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t raw = engine_();
    if (raw < limit) return raw % n;
  }
}

std::vector<std::uint64_t> Rng::distinct(std::uint64_t n, std::uint64_t k) {
  if (k > n) throw ArgumentError("Rng::distinct: k must not exceed n");
  std::vector<std::uint64_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<std::uint64_t> out;
  out.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t j = i + below(n - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

namespace {

VrpInstance gen_vrp_impl(Rng& rng, int grid_size, int n_points, int n_vehicles) {
  if (grid_size < 1) throw ArgumentError("gen_vrp: grid size must be positive");
  const std::uint64_t cells =
      static_cast<std::uint64_t>(grid_size) * static_cast<std::uint64_t>(grid_size);
  if (n_points < 1 || static_cast<std::uint64_t>(n_points) > cells - 1) {
    throw ArgumentError("gen_vrp: point count exceeds available grid cells");
  }
  const int cx = grid_size / 2, cy = grid_size / 2;
  const std::uint64_t depot_cell =
      static_cast<std::uint64_t>(cx) * static_cast<std::uint64_t>(grid_size) +
      static_cast<std::uint64_t>(cy);

  const std::vector<std::uint64_t> draws =
      rng.distinct(cells - 1, static_cast<std::uint64_t>(n_points));
  std::vector<std::pair<int, int>> pts;
  for (std::uint64_t d : draws) {
    const std::uint64_t cell = d < depot_cell ? d : d + 1; // skip the depot cell
    pts.push_back({static_cast<int>(cell / static_cast<std::uint64_t>(grid_size)),
                   static_cast<int>(cell % static_cast<std::uint64_t>(grid_size))});
  }
  return VrpInstance(grid_size, {cx, cy}, std::move(pts), n_vehicles);
}

TapInstance gen_tap_impl(Rng& rng, int n, const std::vector<int>& constrained) {
  if (n < 4) throw ArgumentError("gen_tap: needs at least 4 tasks per agent");
  for (int a : constrained) {
    if (a < 0 || a >= n) throw ArgumentError("gen_tap: constrained agent out of range");
  }
  std::vector<char> is_constrained(static_cast<std::size_t>(n), 0);
  for (int a : constrained) is_constrained[static_cast<std::size_t>(a)] = 1;

  std::vector<std::vector<double>> cost(
      static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 30.0));
  for (int a = 0; a < n; ++a) {
    // First draw would be the cost-5 task; constrained agents lose it to a
    // cost-30 one. The next three are cost-20 tasks either way.
    const auto picks = rng.distinct(static_cast<std::uint64_t>(n), 4);
    if (!is_constrained[static_cast<std::size_t>(a)]) {
      cost[static_cast<std::size_t>(a)][static_cast<std::size_t>(picks[0])] = 5.0;
    }
    for (int i = 1; i < 4; ++i) {
      cost[static_cast<std::size_t>(a)][static_cast<std::size_t>(picks[static_cast<std::size_t>(i)])] = 20.0;
    }
  }
  std::vector<std::string> agents, tasks;
  for (int i = 0; i < n; ++i) {
    agents.push_back("a" + std::to_string(i + 1));
    tasks.push_back("t" + std::to_string(i + 1));
  }
  return TapInstance(std::move(agents), std::move(tasks), std::move(cost));
}

} // namespace

VrpInstance gen_vrp(int grid_size, int n_points, int n_vehicles, std::uint64_t seed) {
  Rng rng(seed);
  return gen_vrp_impl(rng, grid_size, n_points, n_vehicles);
}

History gen_vrp_history(int k_steps, int grid_size, int n_points, int n_vehicles,
                        std::uint64_t seed) {
  if (k_steps < 1) throw ArgumentError("gen_vrp_history: needs at least one step");
  Rng rng(seed);
  const FormulationSpec op(FormulationKind::OP, Metric::MaxMinGap);
  std::vector<UtilityVector> steps;
  std::vector<std::string> vehicle_names;
  for (int v = 0; v < n_vehicles; ++v) vehicle_names.push_back("V" + std::to_string(v + 1));
  for (int k = 0; k < k_steps; ++k) {
    const VrpInstance inst = gen_vrp_impl(rng, grid_size, n_points, n_vehicles);
    const ScoredPlan solved = solve(op, History{}, inst);
    std::vector<double> lengths = solved.per_step_utilities[0].values;
    std::sort(lengths.begin(), lengths.end()); // V1 shortest ... Vn longest
    steps.push_back(UtilityVector(vehicle_names, std::move(lengths)));
  }
  return History(std::move(steps));
}

TapInstance gen_tap(int n, const std::vector<int>& constrained, std::uint64_t seed) {
  Rng rng(seed);
  return gen_tap_impl(rng, n, constrained);
}

TapRun gen_tap_run(std::uint64_t seed, int n) {
  if (n < 9) throw ArgumentError("gen_tap_run: needs more agents than |C| = 8");
  Rng rng(seed);
  TapRun run;

  const auto c_draws = rng.distinct(static_cast<std::uint64_t>(n), 8);
  for (std::uint64_t a : c_draws) run.constrained_agents.push_back(static_cast<int>(a));
  std::sort(run.constrained_agents.begin(), run.constrained_agents.end());

  for (int i = 0; i < 3; ++i) run.instances.push_back(gen_tap_impl(rng, n, {}));
  for (int i = 0; i < 3; ++i) {
    run.instances.push_back(gen_tap_impl(rng, n, run.constrained_agents));
  }

  // Distance-blind baseline solutions decide who carries the synthetic debt.
  std::vector<double> op_total(static_cast<std::size_t>(n), 0.0);
  for (const TapInstance& inst : run.instances) {
    const HungarianResult sol = tap_hungarian(inst);
    for (int a = 0; a < n; ++a) {
      op_total[static_cast<std::size_t>(a)] +=
          inst.cost[static_cast<std::size_t>(a)]
                   [static_cast<std::size_t>(sol.task_of_agent[static_cast<std::size_t>(a)])];
    }
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return op_total[static_cast<std::size_t>(a)] < op_total[static_cast<std::size_t>(b)];
  });

  std::vector<char> in_c(static_cast<std::size_t>(n), 0);
  for (int a : run.constrained_agents) in_c[static_cast<std::size_t>(a)] = 1;
  for (auto it = order.rbegin(); it != order.rend() && run.debt_agents.size() < 4; ++it) {
    if (!in_c[static_cast<std::size_t>(*it)]) run.debt_agents.push_back(*it);
  }
  std::sort(run.debt_agents.begin(), run.debt_agents.end());

  std::vector<char> in_w(static_cast<std::size_t>(n), 0);
  for (int a : run.debt_agents) in_w[static_cast<std::size_t>(a)] = 1;
  std::vector<double> hist_cost(static_cast<std::size_t>(n), 0.0);
  int assigned = 0;
  for (int a : order) {
    if (in_w[static_cast<std::size_t>(a)]) {
      hist_cost[static_cast<std::size_t>(a)] = 180.0;
      continue;
    }
    hist_cost[static_cast<std::size_t>(a)] = assigned < 24 ? 30.0 : 120.0;
    ++assigned;
  }
  run.history =
      History({UtilityVector(run.instances.front().agents, std::move(hist_cost))});
  return run;
}

std::pair<History, History> gen_nsp_histories(std::uint64_t /*seed*/) {
  const std::vector<std::string> nurses{"n1", "n2", "n3", "n4", "n5"};
  const double u_max = 15.0; // five shifts at the top preference of 3
  std::vector<UtilityVector> steps;
  for (int week = 0; week < 15; ++week) {
    const double target = week < 5 ? 0.0 : (week < 10 ? 0.5 : 1.0);
    const double u_min = target * u_max;
    const double mid = (u_min + u_max) / 2.0;
    steps.push_back(UtilityVector(nurses, {u_min, mid, mid, mid, u_max}));
  }
  History h1(steps);
  std::reverse(steps.begin(), steps.end());
  History h2(std::move(steps));
  return {std::move(h1), std::move(h2)};
}

} // namespace tempofair

/**
 * @file instance_gen.hpp
 * @brief Seeded random instance and synthetic-history generators.
 *
 * All generators are pure functions of (parameters, seed) and reproduce
 * bit-exactly across platforms: randomness comes from std::mt19937_64 with
 * explicit rejection sampling and Fisher-Yates draws (no distribution
 * objects, whose streams are implementation-defined).
 */

#ifndef TEMPOFAIR_INSTANCE_GEN_HPP
#define TEMPOFAIR_INSTANCE_GEN_HPP

#include <cstdint>
#include <random>
#include <utility>

#include "tempofair/domains/tap.hpp"
#include "tempofair/domains/vrp.hpp"
#include "tempofair/fairness.hpp"

namespace tempofair {

/// Portable uniform draws over mt19937_64.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, n), by rejection.
  std::uint64_t below(std::uint64_t n);

  /// k distinct values from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::uint64_t> distinct(std::uint64_t n, std::uint64_t k);

private:
  std::mt19937_64 engine_;
};

/// Uniform points on a square integer grid with the depot fixed at the
/// center cell (floor(g/2), floor(g/2)). n_points must fit the remaining
/// cells.
VrpInstance gen_vrp(int grid_size, int n_points, int n_vehicles,
                    std::uint64_t seed);

/// k_steps random instances solved to distance-optimality; each step's
/// per-vehicle route lengths are sorted ascending and assigned to V1..Vn, so
/// V1 always had the shortest route and Vn the longest. Returns the
/// per-vehicle distance history (oldest step first).
History gen_vrp_history(int k_steps, int grid_size, int n_points, int n_vehicles,
                        std::uint64_t seed);

/// Cost recipe per agent: one task of cost 5, three of cost 20, the rest 30.
/// Constrained agents have their cost-5 task replaced by a cost-30 one.
TapInstance gen_tap(int n, const std::vector<int>& constrained, std::uint64_t seed);

/// One full benchmark run: 8 constrained agents C, three unconstrained and
/// three constrained instances, and a synthetic single-step history derived
/// from the min-sum solutions: the 4 worst-off agents outside C carry 180,
/// then 24 agents carry 30 and the remaining 12 carry 120.
struct TapRun {
  std::vector<TapInstance> instances; // 6: first 3 unconstrained
  History history;                    // single step of cumulative costs
  std::vector<int> constrained_agents; // C, |C| = 8
  std::vector<int> debt_agents;        // W, |W| = 4, disjoint from C
};
TapRun gen_tap_run(std::uint64_t seed, int n = 40);

/// Two 15-week nurse-utility histories with mirrored fairness trends. Week
/// fairness targets are (0 x5, 0.5 x5, 1 x5) for the first history and the
/// reverse for the second; each week realizes its target ratio exactly with
/// per-nurse utilities (u_min, mid, mid, mid, 15). The construction is
/// deterministic; the seed is accepted for interface symmetry.
std::pair<History, History> gen_nsp_histories(std::uint64_t seed);

} // namespace tempofair

#endif // TEMPOFAIR_INSTANCE_GEN_HPP

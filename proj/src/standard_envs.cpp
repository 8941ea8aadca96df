#include "envkit/envs/cvrp.hpp"
#include "envkit/envs/game2048.hpp"
#include "envkit/envs/jobshop.hpp"
#include "envkit/envs/knapsack.hpp"
#include "envkit/envs/maze.hpp"
#include "envkit/envs/rubiks_cube.hpp"
#include "envkit/envs/sliding_tile.hpp"
#include "envkit/envs/snake.hpp"
#include "envkit/envs/tsp.hpp"
#include "envkit/registry.hpp"

namespace envkit {
namespace {

Registry build_default_registry() {
    Registry r;
    r.register_env({"Game2048-v1", "logic", "Merge equal tiles to reach a high value",
                    Params{}, envs::make_game2048});
    r.register_env({"RubiksCube-v0", "logic", "Turn layers until every face is a single color",
                    Params{{"cube_size", "3"}, {"num_scrambles", "100"}, {"step_limit", "200"}},
                    envs::make_rubiks_cube});
    r.register_env({"RubiksCube-partly-scrambled-v0", "logic",
                    "Turn layers until every face is a single color",
                    Params{{"cube_size", "3"}, {"num_scrambles", "3"}, {"step_limit", "20"}},
                    envs::make_rubiks_cube});
    r.register_env({"SlidingTilePuzzle-v0", "logic", "Slide tiles until the puzzle is sorted",
                    Params{{"grid_size", "5"}, {"shuffle_moves", "200"}, {"step_limit", "500"}},
                    envs::make_sliding_tile});
    r.register_env({"Maze-v0", "routing", "Reach the single target cell",
                    Params{{"rows", "21"}, {"cols", "21"}}, envs::make_maze});
    r.register_env({"Snake-v1", "routing", "Eat fruit without colliding with wall or body",
                    Params{{"grid_size", "12"}, {"horizon", "4000"}}, envs::make_snake});
    r.register_env({"TSP-v1", "routing", "Visit every city once on the shortest closed tour",
                    Params{{"num_cities", "20"}}, envs::make_tsp});
    r.register_env({"CVRP-v1", "routing", "Serve all demands on the shortest capacitated route",
                    Params{{"num_customers", "20"}, {"capacity", "30"}, {"max_demand", "9"}},
                    envs::make_cvrp});
    r.register_env({"Knapsack-v1", "packing",
                    "Pack items maximizing value within the weight budget",
                    Params{{"num_items", "50"}, {"capacity", "12.5"}}, envs::make_knapsack});
    r.register_env({"JobShop-v0", "packing", "Schedule all job operations minimizing the makespan",
                    Params{{"num_jobs", "5"}, {"num_machines", "4"}, {"max_ops", "4"},
                           {"max_duration", "6"}},
                    envs::make_jobshop});
    return r;
}

} // namespace

const Registry& default_registry() {
    static const Registry registry = build_default_registry();
    return registry;
}

} // namespace envkit

#include "foldlab/goals.hpp"

#include "foldlab/error.hpp"

namespace foldlab {

const std::vector<GoalSpec>& builtin_goals()
{
    static const std::vector<GoalSpec> goals = {
        {"G1", "book fold twice",
         "Left half over the right half, then the top of the folded strip down onto its bottom: a quarter square.",
         {{{{0.0, 0.5}, {1.0, 0.5}}, {{0.75, 1.0}, {0.75, 0.0}}}}},
        {"G2", "diagonal then half",
         "South-west corner onto the north-east corner, then the right-angle corner folded halfway down to the crease: a trapezoid.",
         {{{{0.0, 0.0}, {1.0, 1.0}}, {{1.0, 1.0}, {0.5, 0.5}}}}},
        {"G3", "half then corner tuck",
         "Bottom half up over the top half, then the north-east corner of the strip tucked diagonally inward.",
         {{{{0.5, 0.0}, {0.5, 1.0}}, {{1.0, 1.0}, {0.6, 0.6}}}}},
        {"G4", "opposite corners to centre",
         "South-west and north-east corners each folded onto the centre: a hexagon.",
         {{{{0.0, 0.0}, {0.5, 0.5}}, {{1.0, 1.0}, {0.5, 0.5}}}}},
    };
    return goals;
}

const GoalSpec& find_goal(const std::string& id)
{
    for (const auto& g : builtin_goals())
        if (g.id == id)
            return g;
    throw Error(ErrorCode::InvalidConfig, "unknown goal '" + id + "'");
}

FoldAction to_workspace(const NormalizedAction& action, const ClothSpec& cloth, const Vec2& center)
{
    const Vec2 corner = center - Vec2::Constant(cloth.side_length / 2);
    return {corner + cloth.side_length * action.pick, corner + cloth.side_length * action.place};
}

std::vector<FoldAction> workspace_script(const GoalSpec& goal, const ClothSpec& cloth, const GridSpec& grid)
{
    std::vector<FoldAction> out;
    for (const auto& a : goal.script)
        out.push_back(to_workspace(a, cloth, grid.center()));
    return out;
}

ClothState run_script(const std::vector<FoldAction>& actions, const ClothSpec& cloth, const FoldParams& params,
                      const GridSpec& grid)
{
    check_footprint(cloth, grid.center(), grid);
    ClothState state = create_cloth(cloth, grid.center());
    for (const auto& action : actions)
        state = execute_fold(state, cloth, action, params, grid).final_state;
    return state;
}

Mask render_goal(const GoalSpec& goal, const ClothSpec& cloth, const FoldParams& params, const GridSpec& grid)
{
    return rasterize_topdown(run_script(workspace_script(goal, cloth, grid), cloth, params, grid), grid);
}

} // namespace foldlab

#pragma once

#include "foldlab/fold.hpp"

#include <array>
#include <string>
#include <vector>

namespace foldlab {

/// A pick/place pair in normalized cloth coordinates: (0,0) is the south-west
/// corner of the flat cloth and (1,1) the north-east corner.
struct NormalizedAction {
    Vec2 pick;
    Vec2 place;
};

struct GoalSpec {
    std::string id;
    std::string name;
    std::string description;
    std::array<NormalizedAction, 2> script;
};

/// G1..G4, each a distinct two-fold shape.
const std::vector<GoalSpec>& builtin_goals();

/// Throws InvalidConfig for an unknown id.
const GoalSpec& find_goal(const std::string& id);

/// Maps a normalized action onto a flat cloth of `cloth` centred at `center`.
FoldAction to_workspace(const NormalizedAction& action, const ClothSpec& cloth, const Vec2& center);

std::vector<FoldAction> workspace_script(const GoalSpec& goal, const ClothSpec& cloth, const GridSpec& grid);

/// Runs `actions` in order on a fresh flat cloth centred in the workspace.
ClothState run_script(const std::vector<FoldAction>& actions, const ClothSpec& cloth, const FoldParams& params,
                      const GridSpec& grid);

/// Executes the goal's script on a fresh flat cloth and rasterizes the result.
Mask render_goal(const GoalSpec& goal, const ClothSpec& cloth, const FoldParams& params, const GridSpec& grid);

} // namespace foldlab

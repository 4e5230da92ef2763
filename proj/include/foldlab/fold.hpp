#pragma once

#include "foldlab/cloth.hpp"

#include <array>
#include <vector>

namespace foldlab {

/// A top-down pick-and-place action in workspace coordinates (meters).
struct FoldAction {
    Vec2 pick = Vec2::Zero();
    Vec2 place = Vec2::Zero();

    bool operator==(const FoldAction&) const = default;
};

inline constexpr double kMinPickPlaceSeparation = 0.005;

/// Throws InvalidAction when pick and place are closer than 5 mm or either
/// point leaves the workspace.
void validate(const FoldAction& action, const GridSpec& workspace);

struct FoldParams {
    double approach_clearance = 0.040;  // phase 1 stops this far above the cloth top
    double release_height = 0.020;      // phase 5 stops this far above the ground plane
    double lift_height = 0.05;          // height of the phase 4 traverse
    double pinch_radius = 0.015;
    double pinch_band = 0.006;          // vertical extent of a single pinch below the highest candidate
    double gripper_speed = 0.25;        // m/s
    double frame_interval = 1.0 / 30.0; // s of simulated time between frames
    double settle_tolerance = kDefaultSettleTolerance;
    int settle_max_steps = 2000;

    void validate() const;
};

enum class Gripper { Open, Closed };

/// One straight gripper segment; `gripper` is the jaw state at its end.
struct Phase {
    int id = 0;
    Vec3 start = Vec3::Zero();
    Vec3 end = Vec3::Zero();
    Gripper gripper = Gripper::Open;

    double length() const { return (end - start).norm(); }
};

struct Trajectory {
    std::array<Phase, 5> phases;
    double speed = 0.0;
    double duration = 0.0;

    /// Elapsed time at the end of phase `id` (1-based).
    double phase_end_time(int id) const;
    /// Gripper position `t` seconds after the start of phase 1, clamped to the path.
    Vec3 position_at(double t) const;
};

/// Five-segment pick/place path: approach above the pick point, descend and
/// close, lift, traverse at fixed height, descend and open above the place point.
/// Phase 1 starts at the lift height above the pick point.
Trajectory plan_fold(const FoldAction& action, double cloth_top_z, const FoldParams& params,
                     const GridSpec& workspace);

/// Particles within `pinch_radius` (horizontally) of `pick`, limited to those
/// within `pinch_band` of the highest such particle. Throws NothingGrasped.
std::vector<int> grasp_particles(const ClothState& state, const Vec2& pick, double pinch_radius,
                                 double pinch_band = 0.006);

struct FoldResult {
    ClothState final_state;
    std::vector<ClothState> frames;
    int grasped_count = 0;
    bool settled = false;
};

/// Grasp, carry and release along plan_fold's path, then settle. Frames are
/// sampled every frame_interval of simulated time and end with final_state.
FoldResult execute_fold(const ClothState& state, const ClothSpec& spec, const FoldAction& action,
                        const FoldParams& params, const GridSpec& workspace);

} // namespace foldlab

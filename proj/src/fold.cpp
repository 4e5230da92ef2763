#include "foldlab/fold.hpp"

#include "foldlab/error.hpp"

#include <algorithm>
#include <cmath>

namespace foldlab {

void validate(const FoldAction& action, const GridSpec& workspace)
{
    if (!workspace.contains(action.pick) || !workspace.contains(action.place))
        throw Error(ErrorCode::InvalidAction, "pick and place must lie inside the workspace");
    if ((action.pick - action.place).norm() < kMinPickPlaceSeparation)
        throw Error(ErrorCode::InvalidAction, "pick and place must be at least 5 mm apart");
}

void FoldParams::validate() const
{
    const auto fail = [](const char* why) { throw Error(ErrorCode::InvalidSpec, why); };
    if (!(approach_clearance > 0.0) || !(release_height > 0.0) || !(lift_height > 0.0)
        || !(pinch_radius > 0.0) || !(pinch_band > 0.0) || !(gripper_speed > 0.0)
        || !(frame_interval > 0.0) || !(settle_tolerance > 0.0))
        fail("fold parameters must be positive");
    if (!(release_height < lift_height))
        fail("release_height must be below lift_height");
    if (settle_max_steps < 0)
        fail("settle_max_steps must be non-negative");
}

double Trajectory::phase_end_time(int id) const
{
    double length = 0.0;
    for (int k = 0; k < id; ++k)
        length += phases[k].length();
    return length / speed;
}

Vec3 Trajectory::position_at(double t) const
{
    double remaining = std::max(0.0, t) * speed;
    for (const auto& phase : phases) {
        const double len = phase.length();
        if (remaining <= len) {
            if (len == 0.0)
                return phase.end;
            return phase.start + (remaining / len) * (phase.end - phase.start);
        }
        remaining -= len;
    }
    return phases.back().end;
}

Trajectory plan_fold(const FoldAction& action, double cloth_top_z, const FoldParams& params,
                     const GridSpec& workspace)
{
    validate(action, workspace);
    params.validate();

    const auto at = [](const Vec2& xy, double z) { return Vec3(xy.x(), xy.y(), z); };
    const Vec3 home = at(action.pick, params.lift_height);
    const Vec3 approach = at(action.pick, cloth_top_z + params.approach_clearance);
    const Vec3 pinch = at(action.pick, cloth_top_z);
    const Vec3 lifted = at(action.pick, params.lift_height);
    const Vec3 over_place = at(action.place, params.lift_height);
    const Vec3 release = at(action.place, params.release_height);

    Trajectory traj;
    traj.phases = {{
        {1, home, approach, Gripper::Open},
        {2, approach, pinch, Gripper::Closed},
        {3, pinch, lifted, Gripper::Closed},
        {4, lifted, over_place, Gripper::Closed},
        {5, over_place, release, Gripper::Open},
    }};
    traj.speed = params.gripper_speed;
    traj.duration = traj.phase_end_time(5);
    return traj;
}

std::vector<int> grasp_particles(const ClothState& state, const Vec2& pick, double pinch_radius,
                                 double pinch_band)
{
    if (!(pinch_radius > 0.0))
        throw Error(ErrorCode::InvalidSpec, "pinch_radius must be positive");

    std::vector<int> candidates;
    double highest = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Vec3& p = state.positions[i];
        if (std::hypot(p.x() - pick.x(), p.y() - pick.y()) <= pinch_radius) {
            candidates.push_back(static_cast<int>(i));
            highest = std::max(highest, p.z());
        }
    }
    if (candidates.empty())
        throw Error(ErrorCode::NothingGrasped, "pick point misses the cloth");

    std::erase_if(candidates, [&](int i) { return state.positions[i].z() < highest - pinch_band; });
    return candidates;
}

FoldResult execute_fold(const ClothState& state, const ClothSpec& spec, const FoldAction& action,
                        const FoldParams& params, const GridSpec& workspace)
{
    params.validate();
    validate(action, workspace);
    const auto grasped = grasp_particles(state, action.pick, params.pinch_radius, params.pinch_band);

    double cloth_top = 0.0;
    for (int i : grasped)
        cloth_top = std::max(cloth_top, state.positions[i].z());
    const Trajectory traj = plan_fold(action, cloth_top, params, workspace);

    const double dt = spec.timestep;
    const int frame_stride = std::max(1, static_cast<int>(std::lround(params.frame_interval / dt)));
    const double grasp_time = traj.phase_end_time(2);
    const int total_steps = static_cast<int>(std::ceil(traj.duration / dt - 1e-9));

    FoldResult result;
    result.grasped_count = static_cast<int>(grasped.size());
    result.frames.push_back(state);

    ClothState s = state;
    std::vector<Vec3> grasp_offsets;
    Vec3 grasp_point = traj.position_at(grasp_time);
    int step = 0;
    for (int k = 1; k <= total_steps; ++k) {
        if (grasp_offsets.empty() && (k - 1) * dt >= grasp_time - 1e-12) {
            for (int i : grasped)
                grasp_offsets.push_back(s.positions[i] - grasp_point);
        }
        if (!grasp_offsets.empty()) {
            const Vec3 gripper = traj.position_at(std::min(k * dt, traj.duration));
            s.pins.clear();
            for (std::size_t j = 0; j < grasped.size(); ++j)
                s.pins.push_back({grasped[j], gripper + grasp_offsets[j]});
        }
        s = step_sim(std::move(s), spec, 1);
        if (++step % frame_stride == 0)
            result.frames.push_back(s);
    }

    // Release. Cloth still hanging clear of its support becomes a new layer
    // that rests one thickness above everything laid down before it.
    s.pins.clear();
    const double layer_height = spec.thickness * (s.fold_count + 2);
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.positions[i].z() > s.contact_height[i] + 2 * spec.thickness)
            s.contact_height[i] = std::max(s.contact_height[i], layer_height);
    ++s.fold_count;

    auto settled = settle(std::move(s), spec, params.settle_tolerance, params.settle_max_steps,
                          [&](const ClothState& now) {
                              if (++step % frame_stride == 0)
                                  result.frames.push_back(now);
                          });
    s = std::move(settled.state);
    if (result.frames.back().sim_time != s.sim_time)
        result.frames.push_back(s);

    result.settled = settled.converged;
    result.final_state = std::move(s);
    return result;
}

} // namespace foldlab

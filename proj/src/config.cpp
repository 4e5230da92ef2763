#include "foldlab/config.hpp"

#include "foldlab/error.hpp"
#include "foldlab/goals.hpp"

#include <functional>
#include <map>

namespace foldlab {
namespace {

using Json = nlohmann::ordered_json;
using Setter = std::function<void(const Json&)>;

void apply_fields(const Json& j, const char* what, const std::map<std::string, Setter>& fields)
{
    if (!j.is_object())
        throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be an object");
    for (const auto& [key, value] : j.items()) {
        const auto it = fields.find(key);
        if (it == fields.end())
            throw Error(ErrorCode::InvalidConfig, std::string("unknown ") + what + " key '" + key + "'");
        try {
            it->second(value);
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::InvalidConfig, std::string(what) + " key '" + key + "' has the wrong type");
        }
    }
}

template <typename T>
Setter field(T& target)
{
    return [&target](const Json& v) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean())
                throw Error(ErrorCode::InvalidConfig, "expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer())
                throw Error(ErrorCode::InvalidConfig, "expected an integer");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number())
                throw Error(ErrorCode::InvalidConfig, "expected a number");
        } else {
            if (!v.is_string())
                throw Error(ErrorCode::InvalidConfig, "expected a string");
        }
        target = v.get<T>();
    };
}

} // namespace

void SessionConfig::validate() const
{
    if (n_folds < 1)
        throw Error(ErrorCode::InvalidConfig, "n_folds must be at least 1");
    try {
        cloth.validate();
        fold.validate();
        grid.validate();
        check_footprint(cloth, grid.center(), grid);
    } catch (const Error& e) {
        throw Error(ErrorCode::InvalidConfig, e.what());
    }
    find_goal(goal_id);
}

Json to_json(const ClothSpec& s)
{
    Json j;
    j["side_length"] = s.side_length;
    j["resolution"] = s.resolution;
    j["mass_per_particle"] = s.mass_per_particle;
    j["structural_stiffness"] = s.structural_stiffness;
    j["shear_stiffness"] = s.shear_stiffness;
    j["bend_stiffness"] = s.bend_stiffness;
    j["ground_friction"] = s.ground_friction;
    j["gravity"] = s.gravity;
    j["timestep"] = s.timestep;
    j["solver_iterations"] = s.solver_iterations;
    j["thickness"] = s.thickness;
    j["velocity_damping"] = s.velocity_damping;
    return j;
}

Json to_json(const FoldParams& p)
{
    Json j;
    j["approach_clearance"] = p.approach_clearance;
    j["release_height"] = p.release_height;
    j["lift_height"] = p.lift_height;
    j["pinch_radius"] = p.pinch_radius;
    j["pinch_band"] = p.pinch_band;
    j["gripper_speed"] = p.gripper_speed;
    j["frame_interval"] = p.frame_interval;
    j["settle_tolerance"] = p.settle_tolerance;
    j["settle_max_steps"] = p.settle_max_steps;
    return j;
}

Json to_json(const GridSpec& g)
{
    Json j;
    j["workspace_side"] = g.workspace_side;
    j["pixels_per_side"] = g.pixels_per_side;
    j["origin_x"] = g.origin.x();
    j["origin_y"] = g.origin.y();
    return j;
}

Json to_json(const SessionConfig& c)
{
    Json j;
    j["n_folds"] = c.n_folds;
    j["preview_enabled"] = c.preview_enabled;
    j["goal_id"] = c.goal_id;
    j["cloth"] = to_json(c.cloth);
    j["fold"] = to_json(c.fold);
    j["grid"] = to_json(c.grid);
    return j;
}

ClothSpec cloth_spec_from_json(const Json& j)
{
    ClothSpec s;
    apply_fields(j, "cloth",
                 {
                     {"side_length", field(s.side_length)},
                     {"resolution", field(s.resolution)},
                     {"mass_per_particle", field(s.mass_per_particle)},
                     {"structural_stiffness", field(s.structural_stiffness)},
                     {"shear_stiffness", field(s.shear_stiffness)},
                     {"bend_stiffness", field(s.bend_stiffness)},
                     {"ground_friction", field(s.ground_friction)},
                     {"gravity", field(s.gravity)},
                     {"timestep", field(s.timestep)},
                     {"solver_iterations", field(s.solver_iterations)},
                     {"thickness", field(s.thickness)},
                     {"velocity_damping", field(s.velocity_damping)},
                 });
    return s;
}

FoldParams fold_params_from_json(const Json& j)
{
    FoldParams p;
    apply_fields(j, "fold",
                 {
                     {"approach_clearance", field(p.approach_clearance)},
                     {"release_height", field(p.release_height)},
                     {"lift_height", field(p.lift_height)},
                     {"pinch_radius", field(p.pinch_radius)},
                     {"pinch_band", field(p.pinch_band)},
                     {"gripper_speed", field(p.gripper_speed)},
                     {"frame_interval", field(p.frame_interval)},
                     {"settle_tolerance", field(p.settle_tolerance)},
                     {"settle_max_steps", field(p.settle_max_steps)},
                 });
    return p;
}

GridSpec grid_spec_from_json(const Json& j)
{
    GridSpec g;
    double ox = g.origin.x();
    double oy = g.origin.y();
    apply_fields(j, "grid",
                 {
                     {"workspace_side", field(g.workspace_side)},
                     {"pixels_per_side", field(g.pixels_per_side)},
                     {"origin_x", field(ox)},
                     {"origin_y", field(oy)},
                 });
    g.origin = {ox, oy};
    return g;
}

SessionConfig session_config_from_json(const Json& j)
{
    SessionConfig c;
    Json cloth = Json::object();
    Json fold = Json::object();
    Json grid = Json::object();
    apply_fields(j, "session config",
                 {
                     {"n_folds", field(c.n_folds)},
                     {"preview_enabled", field(c.preview_enabled)},
                     {"goal_id", field(c.goal_id)},
                     {"cloth", [&](const Json& v) { cloth = v; }},
                     {"fold", [&](const Json& v) { fold = v; }},
                     {"grid", [&](const Json& v) { grid = v; }},
                 });
    c.cloth = cloth_spec_from_json(cloth);
    c.fold = fold_params_from_json(fold);
    c.grid = grid_spec_from_json(grid);
    return c;
}

} // namespace foldlab

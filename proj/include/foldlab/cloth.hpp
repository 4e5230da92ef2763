#pragma once

#include "foldlab/mask.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace foldlab {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Physical and numerical parameters of a square particle-grid cloth.
struct ClothSpec {
    double side_length = 0.30;          // m
    int resolution = 25;                // particles per side
    double mass_per_particle = 0.001;   // kg
    double structural_stiffness = 1.0;
    double shear_stiffness = 0.9;
    double bend_stiffness = 0.05;
    double ground_friction = 3.0;
    double gravity = 9.81;              // m/s^2, acting along -z
    double timestep = 1.0 / 120.0;      // s
    int solver_iterations = 10;
    double thickness = 0.002;           // m; rest height of a flat cloth and per-layer offset
    double velocity_damping = 0.01;     // fraction of velocity removed per substep

    void validate() const;
    double spacing() const { return side_length / (resolution - 1); }
};

/// Rasterization target: a square workspace with its south-west corner at origin.
struct GridSpec {
    double workspace_side = 0.5;        // m
    int pixels_per_side = 256;
    Vec2 origin = Vec2::Zero();

    void validate() const;
    double pixel_size() const { return workspace_side / pixels_per_side; }
    bool contains(const Vec2& p) const;
    Vec2 clamp(const Vec2& p) const;
    Vec2 center() const { return origin + Vec2::Constant(workspace_side / 2); }
};

enum class EdgeKind : std::uint8_t { Structural, Shear, Bend };

struct Edge {
    int a = 0;
    int b = 0;
    double rest = 0.0;
    EdgeKind kind = EdgeKind::Structural;
};

/// Immutable mesh connectivity, shared between snapshots of the same cloth.
struct ClothTopology {
    int resolution = 0;
    std::vector<Edge> edges;                 // projection order: structural, shear, bend
    std::vector<std::array<int, 3>> triangles;

    std::size_t count(EdgeKind kind) const;
};

struct Pin {
    int index = 0;
    Vec3 target = Vec3::Zero();
};

struct ClothState {
    std::shared_ptr<const ClothTopology> topology;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    /// Per-particle collision height; raised for layers laid down by folds.
    std::vector<double> contact_height;
    std::vector<Pin> pins;                   // sorted by index
    double sim_time = 0.0;
    int fold_count = 0;

    std::size_t size() const { return positions.size(); }
    bool pinned(int index) const;
    double max_speed() const;
    double top_z() const;
};

/// Exact equality of every dynamic field, including pin targets and time.
bool bit_identical(const ClothState& a, const ClothState& b);

/// Ground penetration allowed before a state is considered invalid.
inline constexpr double kPenetrationTolerance = 0.001;

/// Flat cloth centred on `center`, lying at z = thickness with zero velocity.
ClothState create_cloth(const ClothSpec& spec, const Vec2& center);

/// Throws InvalidSpec when the flat footprint at `center` leaves the workspace.
void check_footprint(const ClothSpec& spec, const Vec2& center, const GridSpec& grid);

/// Advance by `substeps` fixed timesteps of predict / project / update.
ClothState step_sim(ClothState state, const ClothSpec& spec, int substeps = 1);

struct SettleResult {
    ClothState state;
    int steps_used = 0;
    bool converged = false;
};

inline constexpr double kDefaultSettleTolerance = 0.005;

/// Integrate until the fastest particle stays below `velocity_tol` for five
/// consecutive substeps, or until `max_steps` substeps have run. `on_step`, if
/// set, observes the state after every substep.
SettleResult settle(ClothState state, const ClothSpec& spec, double velocity_tol, int max_steps,
                    const std::function<void(const ClothState&)>& on_step = {});

/// Orthographic top-down coverage: a pixel is set iff its centre lies inside
/// the vertical projection of some mesh triangle.
Mask rasterize_topdown(const ClothState& state, const GridSpec& grid);

} // namespace foldlab

#include "foldlab/cloth.hpp"

#include "foldlab/error.hpp"

#include <algorithm>
#include <cassert>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#if defined(__x86_64__) && defined(__GNUC__)
#include <immintrin.h>
#elif defined(__SSE2__)
#include <emmintrin.h>
#endif

namespace foldlab {
namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

// Per-iteration stiffness that compounds to `k` over `iterations` passes.
double iteration_stiffness(double k, int iterations)
{
    if (k >= 1.0)
        return 1.0;
    return 1.0 - std::pow(1.0 - k, 1.0 / iterations);
}

std::shared_ptr<const ClothTopology> build_topology(int n, const std::vector<Vec3>& x)
{
    auto topo = std::make_shared<ClothTopology>();
    topo->resolution = n;
    const auto id = [n](int row, int col) { return row * n + col; };
    const auto add = [&](int a, int b, EdgeKind kind) {
        topo->edges.push_back({a, b, (x[a] - x[b]).norm(), kind});
    };

    // Edges are emitted in batches that share no particle (alternating
    // columns/rows), which keeps consecutive projections independent.
    for (int parity = 0; parity < 2; ++parity)
        for (int r = 0; r < n; ++r)
            for (int c = parity; c + 1 < n; c += 2)
                add(id(r, c), id(r, c + 1), EdgeKind::Structural);
    for (int parity = 0; parity < 2; ++parity)
        for (int r = parity; r + 1 < n; r += 2)
            for (int c = 0; c < n; ++c)
                add(id(r, c), id(r + 1, c), EdgeKind::Structural);

    for (int parity = 0; parity < 2; ++parity)
        for (int r = parity; r + 1 < n; r += 2)
            for (int c = 0; c + 1 < n; ++c)
                add(id(r, c), id(r + 1, c + 1), EdgeKind::Shear);
    for (int parity = 0; parity < 2; ++parity)
        for (int r = parity; r + 1 < n; r += 2)
            for (int c = 0; c + 1 < n; ++c)
                add(id(r, c + 1), id(r + 1, c), EdgeKind::Shear);

    for (int phase = 0; phase < 2; ++phase)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c + 2 < n; ++c)
                if ((c / 2) % 2 == phase)
                    add(id(r, c), id(r, c + 2), EdgeKind::Bend);
    for (int phase = 0; phase < 2; ++phase)
        for (int r = 0; r + 2 < n; ++r)
            if ((r / 2) % 2 == phase)
                for (int c = 0; c < n; ++c)
                    add(id(r, c), id(r + 2, c), EdgeKind::Bend);

    for (int r = 0; r + 1 < n; ++r) {
        for (int c = 0; c + 1 < n; ++c) {
            topo->triangles.push_back({id(r, c), id(r, c + 1), id(r + 1, c + 1)});
            topo->triangles.push_back({id(r, c), id(r + 1, c + 1), id(r + 1, c)});
        }
    }
    return topo;
}

// Particles are projected in a padded copy of the positions, four doubles
// per particle, so that one particle fits a 256-bit register.
constexpr std::size_t kStride = 4;

struct PackedEdge {
    std::size_t a, b; // offsets of the x coordinate in the padded buffer
    double rest, wa, wb;
};

inline void project_one(double* pos, const PackedEdge& e)
{
    double* pa = pos + e.a;
    double* pb = pos + e.b;
    const double dx = pa[0] - pb[0];
    const double dy = pa[1] - pb[1];
    const double dz = pa[2] - pb[2];
    const double len2 = dx * dx + dy * dy + dz * dz;
    if (len2 < 1e-24)
        return;
    const double stretch = 1.0 - e.rest / std::sqrt(len2);
    const double sa = e.wa * stretch;
    const double sb = e.wb * stretch;
    pa[0] -= sa * dx;
    pa[1] -= sa * dy;
    pa[2] -= sa * dz;
    pb[0] += sb * dx;
    pb[1] += sb * dy;
    pb[2] += sb * dz;
}

// Projection schedule for one substep: edges in Gauss-Seidel order, with
// runs of adjacent edges that touch pairwise distinct particles grouped in
// fours or twos. Edges in such a group commute, so any evaluation order of
// the group gives the same result as the sequential sweep.
struct EdgeSchedule {
    template <int N>
    struct alignas(32) Group {
        double rest[N], wa[N], wb[N];
        std::size_t a[N], b[N];
    };
    using Pair = Group<2>;
    using Quad = Group<4>;
    enum class Kind : unsigned char { Single, Pair, Quad };
    struct Item {
        Kind kind;
        std::size_t index; // into singles, pairs or quads
    };
    std::vector<Quad> quads;
    std::vector<Pair> pairs;
    std::vector<PackedEdge> singles;
    std::vector<Item> items;

    static bool disjoint(const PackedEdge* e, std::size_t n)
    {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (e[i].a == e[j].a || e[i].a == e[j].b || e[i].b == e[j].a || e[i].b == e[j].b)
                    return false;
        return true;
    }

    template <int N>
    static Group<N> group(const PackedEdge* e)
    {
        Group<N> g;
        for (int i = 0; i < N; ++i) {
            g.rest[i] = e[i].rest;
            g.wa[i] = e[i].wa;
            g.wb[i] = e[i].wb;
            g.a[i] = e[i].a;
            g.b[i] = e[i].b;
        }
        return g;
    }

    explicit EdgeSchedule(const std::vector<PackedEdge>& edges)
    {
        std::size_t i = 0;
        while (i < edges.size()) {
            const PackedEdge* e = edges.data() + i;
            const std::size_t left = edges.size() - i;
            if (left >= 4 && disjoint(e, 4)) {
                items.push_back({Kind::Quad, quads.size()});
                quads.push_back(group<4>(e));
                i += 4;
            } else if (left >= 2 && disjoint(e, 2)) {
                items.push_back({Kind::Pair, pairs.size()});
                pairs.push_back(group<2>(e));
                i += 2;
            } else {
                items.push_back({Kind::Single, singles.size()});
                singles.push_back(*e);
                ++i;
            }
        }
    }
};

template <int N>
void project_group_scalar(double* pos, const EdgeSchedule::Group<N>& g)
{
    for (int i = 0; i < N; ++i)
        project_one(pos, {g.a[i], g.b[i], g.rest[i], g.wa[i], g.wb[i]});
}

// Both lanes of a pair perform the same correctly rounded operations as
// project_one, so results are bit-identical to a scalar sweep.
#if defined(__SSE2__)
inline void project_pair(double* pos, const EdgeSchedule::Pair& p)
{
    double* a0 = pos + p.a[0];
    double* a1 = pos + p.a[1];
    double* b0 = pos + p.b[0];
    double* b1 = pos + p.b[1];
    const __m128d ax = _mm_loadh_pd(_mm_load_sd(a0), a1);
    const __m128d ay = _mm_loadh_pd(_mm_load_sd(a0 + 1), a1 + 1);
    const __m128d az = _mm_loadh_pd(_mm_load_sd(a0 + 2), a1 + 2);
    const __m128d bx = _mm_loadh_pd(_mm_load_sd(b0), b1);
    const __m128d by = _mm_loadh_pd(_mm_load_sd(b0 + 1), b1 + 1);
    const __m128d bz = _mm_loadh_pd(_mm_load_sd(b0 + 2), b1 + 2);
    const __m128d dx = _mm_sub_pd(ax, bx);
    const __m128d dy = _mm_sub_pd(ay, by);
    const __m128d dz = _mm_sub_pd(az, bz);
    const __m128d len2 = _mm_add_pd(_mm_add_pd(_mm_mul_pd(dx, dx), _mm_mul_pd(dy, dy)), _mm_mul_pd(dz, dz));
    if (_mm_movemask_pd(_mm_cmplt_pd(len2, _mm_set1_pd(1e-24))) != 0) {
        project_group_scalar(pos, p);
        return;
    }
    const __m128d stretch = _mm_sub_pd(_mm_set1_pd(1.0), _mm_div_pd(_mm_load_pd(p.rest), _mm_sqrt_pd(len2)));
    const __m128d sa = _mm_mul_pd(_mm_load_pd(p.wa), stretch);
    const __m128d sb = _mm_mul_pd(_mm_load_pd(p.wb), stretch);
    const __m128d nax = _mm_sub_pd(ax, _mm_mul_pd(sa, dx));
    const __m128d nay = _mm_sub_pd(ay, _mm_mul_pd(sa, dy));
    const __m128d naz = _mm_sub_pd(az, _mm_mul_pd(sa, dz));
    const __m128d nbx = _mm_add_pd(bx, _mm_mul_pd(sb, dx));
    const __m128d nby = _mm_add_pd(by, _mm_mul_pd(sb, dy));
    const __m128d nbz = _mm_add_pd(bz, _mm_mul_pd(sb, dz));
    _mm_storel_pd(a0, nax);
    _mm_storel_pd(a0 + 1, nay);
    _mm_storel_pd(a0 + 2, naz);
    _mm_storeh_pd(a1, nax);
    _mm_storeh_pd(a1 + 1, nay);
    _mm_storeh_pd(a1 + 2, naz);
    _mm_storel_pd(b0, nbx);
    _mm_storel_pd(b0 + 1, nby);
    _mm_storel_pd(b0 + 2, nbz);
    _mm_storeh_pd(b1, nbx);
    _mm_storeh_pd(b1 + 1, nby);
    _mm_storeh_pd(b1 + 2, nbz);
}
#else
inline void project_pair(double* pos, const EdgeSchedule::Pair& p)
{
    project_group_scalar(pos, p);
}
#endif

void project_edges_generic(double* pos, const EdgeSchedule& schedule)
{
    for (const auto& item : schedule.items) {
        switch (item.kind) {
        case EdgeSchedule::Kind::Single:
            project_one(pos, schedule.singles[item.index]);
            break;
        case EdgeSchedule::Kind::Pair:
            project_pair(pos, schedule.pairs[item.index]);
            break;
        case EdgeSchedule::Kind::Quad:
            project_group_scalar(pos, schedule.quads[item.index]);
            break;
        }
    }
}

#if defined(__x86_64__) && defined(__GNUC__)
#define FOLDLAB_HAVE_AVX_PATH 1

__attribute__((target("avx"))) inline void load_xyz(double* const* rows, __m256d& x, __m256d& y, __m256d& z)
{
    const __m256d r0 = _mm256_load_pd(rows[0]);
    const __m256d r1 = _mm256_load_pd(rows[1]);
    const __m256d r2 = _mm256_load_pd(rows[2]);
    const __m256d r3 = _mm256_load_pd(rows[3]);
    const __m256d t0 = _mm256_unpacklo_pd(r0, r1); // x0 x1 z0 z1
    const __m256d t1 = _mm256_unpackhi_pd(r0, r1); // y0 y1 w0 w1
    const __m256d t2 = _mm256_unpacklo_pd(r2, r3);
    const __m256d t3 = _mm256_unpackhi_pd(r2, r3);
    x = _mm256_permute2f128_pd(t0, t2, 0x20);
    y = _mm256_permute2f128_pd(t1, t3, 0x20);
    z = _mm256_permute2f128_pd(t0, t2, 0x31);
}

__attribute__((target("avx"))) inline void store_xyz(double* const* rows, const __m256d& x, const __m256d& y,
                                                     const __m256d& z)
{
    const __m256d t0 = _mm256_unpacklo_pd(x, y); // x0 y0 x2 y2
    const __m256d t1 = _mm256_unpackhi_pd(x, y); // x1 y1 x3 y3
    const __m256d t2 = _mm256_unpacklo_pd(z, z); // z0 z0 z2 z2
    const __m256d t3 = _mm256_unpackhi_pd(z, z); // z1 z1 z3 z3
    _mm256_store_pd(rows[0], _mm256_permute2f128_pd(t0, t2, 0x20));
    _mm256_store_pd(rows[1], _mm256_permute2f128_pd(t1, t3, 0x20));
    _mm256_store_pd(rows[2], _mm256_permute2f128_pd(t0, t2, 0x31));
    _mm256_store_pd(rows[3], _mm256_permute2f128_pd(t1, t3, 0x31));
}

// Four edges at once: the endpoint rows are transposed into x/y/z lanes,
// every lane repeats project_one's operations (no fused multiply-add), and
// the rows are transposed back. The padding double of each row is clobbered.
__attribute__((target("avx"))) inline void project_quad_avx(double* pos, const EdgeSchedule::Quad& q)
{
    double* a[4] = {pos + q.a[0], pos + q.a[1], pos + q.a[2], pos + q.a[3]};
    double* b[4] = {pos + q.b[0], pos + q.b[1], pos + q.b[2], pos + q.b[3]};
    __m256d ax, ay, az, bx, by, bz;
    load_xyz(a, ax, ay, az);
    load_xyz(b, bx, by, bz);
    const __m256d dx = _mm256_sub_pd(ax, bx);
    const __m256d dy = _mm256_sub_pd(ay, by);
    const __m256d dz = _mm256_sub_pd(az, bz);
    const __m256d len2
        = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)), _mm256_mul_pd(dz, dz));
    if (_mm256_movemask_pd(_mm256_cmp_pd(len2, _mm256_set1_pd(1e-24), _CMP_LT_OQ)) != 0) {
        project_group_scalar(pos, q);
        return;
    }
    const __m256d stretch
        = _mm256_sub_pd(_mm256_set1_pd(1.0), _mm256_div_pd(_mm256_load_pd(q.rest), _mm256_sqrt_pd(len2)));
    const __m256d sa = _mm256_mul_pd(_mm256_load_pd(q.wa), stretch);
    const __m256d sb = _mm256_mul_pd(_mm256_load_pd(q.wb), stretch);
    store_xyz(a, _mm256_sub_pd(ax, _mm256_mul_pd(sa, dx)), _mm256_sub_pd(ay, _mm256_mul_pd(sa, dy)),
              _mm256_sub_pd(az, _mm256_mul_pd(sa, dz)));
    store_xyz(b, _mm256_add_pd(bx, _mm256_mul_pd(sb, dx)), _mm256_add_pd(by, _mm256_mul_pd(sb, dy)),
              _mm256_add_pd(bz, _mm256_mul_pd(sb, dz)));
}

__attribute__((target("avx"))) void project_edges_avx(double* pos, const EdgeSchedule& schedule)
{
    for (const auto& item : schedule.items) {
        switch (item.kind) {
        case EdgeSchedule::Kind::Single:
            project_one(pos, schedule.singles[item.index]);
            break;
        case EdgeSchedule::Kind::Pair:
            project_pair(pos, schedule.pairs[item.index]);
            break;
        case EdgeSchedule::Kind::Quad:
            project_quad_avx(pos, schedule.quads[item.index]);
            break;
        }
    }
}
#endif

// One Gauss-Seidel sweep, using 256-bit vectors when the CPU has them. All
// paths give bit-identical results.
void project_edges(double* pos, const EdgeSchedule& schedule)
{
#if defined(FOLDLAB_HAVE_AVX_PATH)
    static const bool avx = __builtin_cpu_supports("avx");
    if (avx) {
        project_edges_avx(pos, schedule);
        return;
    }
#endif
    project_edges_generic(pos, schedule);
}

// The schedule only changes when the set of pinned particles does, which is
// rare compared with the number of substeps, so the last one is kept around.
const EdgeSchedule& cached_schedule(const ClothState& s, const std::array<double, 3>& k,
                                    const std::vector<double>& inv_mass)
{
    struct Cache {
        std::shared_ptr<const ClothTopology> topology;
        std::array<double, 3> k{};
        std::vector<int> pinned;
        std::optional<EdgeSchedule> schedule;
    };
    thread_local Cache cache;

    std::vector<int> pinned;
    pinned.reserve(s.pins.size());
    for (const auto& pin : s.pins)
        pinned.push_back(pin.index);
    std::sort(pinned.begin(), pinned.end());
    pinned.erase(std::unique(pinned.begin(), pinned.end()), pinned.end());

    if (cache.schedule && cache.topology == s.topology && cache.k == k && cache.pinned == pinned)
        return *cache.schedule;

    std::vector<PackedEdge> packed;
    packed.reserve(s.topology->edges.size());
    for (const auto& e : s.topology->edges) {
        const double wa = inv_mass[e.a];
        const double wb = inv_mass[e.b];
        if (wa + wb == 0.0)
            continue;
        const double kk = k[static_cast<int>(e.kind)] / (wa + wb);
        packed.push_back({kStride * static_cast<std::size_t>(e.a), kStride * static_cast<std::size_t>(e.b), e.rest, wa * kk,
                          wb * kk});
    }
    cache.topology = s.topology;
    cache.k = k;
    cache.pinned = std::move(pinned);
    cache.schedule.emplace(packed);
    return *cache.schedule;
}

void single_substep(ClothState& s, const ClothSpec& spec, const std::array<double, 3>& k)
{
    const double dt = spec.timestep;
    const std::size_t count = s.size();
    const Vec3 gravity(0.0, 0.0, -spec.gravity);

    // Inverse mass is uniform, so only "free" (1) versus "pinned" (0) matters.
    thread_local std::vector<double> inv_mass;
    thread_local std::vector<Vec3> predicted;
    inv_mass.assign(count, 1.0);
    predicted.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        s.velocities[i] = (1.0 - spec.velocity_damping) * s.velocities[i] + dt * gravity;
        predicted[i] = s.positions[i] + dt * s.velocities[i];
    }
    for (const auto& pin : s.pins) {
        inv_mass[pin.index] = 0.0;
        predicted[pin.index] = pin.target;
    }

    // Coulomb-style friction on the predicted step of particles pressed into
    // their contact height: the penetration bounds how much tangential motion
    // is cancelled. Applied before the constraint solve so that edge
    // corrections are never undone by friction.
    for (std::size_t i = 0; i < count; ++i) {
        const double depth = s.contact_height[i] - predicted[i].z();
        if (inv_mass[i] == 0.0 || depth <= 0.0)
            continue;
        const double budget = spec.ground_friction * depth;
        const double tx = predicted[i].x() - s.positions[i].x();
        const double ty = predicted[i].y() - s.positions[i].y();
        const double slide = std::hypot(tx, ty);
        const double keep = slide <= budget ? 0.0 : 1.0 - budget / slide;
        predicted[i].x() = s.positions[i].x() + keep * tx;
        predicted[i].y() = s.positions[i].y() + keep * ty;
    }

    const EdgeSchedule& schedule = cached_schedule(s, k, inv_mass);
    thread_local std::vector<double> padded;
    padded.resize(kStride * count + kStride);
    // 32-byte aligned start inside the buffer.
    double* pos = padded.data();
    pos += (kStride - reinterpret_cast<std::uintptr_t>(pos) / sizeof(double) % kStride) % kStride;
    for (std::size_t i = 0; i < count; ++i)
        for (int c = 0; c < 3; ++c)
            pos[kStride * i + c] = predicted[i][c];
    for (int iter = 0; iter < spec.solver_iterations; ++iter) {
        project_edges(pos, schedule);
        for (std::size_t i = 0; i < count; ++i)
            if (inv_mass[i] != 0.0 && pos[kStride * i + 2] < s.contact_height[i])
                pos[kStride * i + 2] = s.contact_height[i];
    }
    for (std::size_t i = 0; i < count; ++i)
        predicted[i] = Vec3(pos[kStride * i], pos[kStride * i + 1], pos[kStride * i + 2]);

    for (std::size_t i = 0; i < count; ++i) {
        s.velocities[i] = (predicted[i] - s.positions[i]) / dt;
        s.positions[i] = predicted[i];
        assert(std::isfinite(s.positions[i].x()) && std::isfinite(s.positions[i].y())
               && std::isfinite(s.positions[i].z()));
    }
    s.sim_time += dt;
}

} // namespace

void ClothSpec::validate() const
{
    const auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };
    if (resolution < 2)
        fail("resolution must be at least 2");
    if (!(side_length > 0.0))
        fail("side_length must be positive");
    if (!(mass_per_particle > 0.0))
        fail("mass_per_particle must be positive");
    if (!(timestep > 0.0))
        fail("timestep must be positive");
    if (solver_iterations < 1)
        fail("solver_iterations must be at least 1");
    if (!in_unit_interval(structural_stiffness) || !in_unit_interval(shear_stiffness)
        || !in_unit_interval(bend_stiffness))
        fail("stiffness values must lie in [0,1]");
    if (!(ground_friction >= 0.0))
        fail("ground_friction must be non-negative");
    if (!(thickness > 0.0))
        fail("thickness must be positive");
    if (!(velocity_damping >= 0.0 && velocity_damping < 1.0))
        fail("velocity_damping must lie in [0,1)");
}

void GridSpec::validate() const
{
    if (pixels_per_side < 8)
        throw Error(ErrorCode::InvalidSpec, "pixels_per_side must be at least 8");
    if (!(workspace_side > 0.0))
        throw Error(ErrorCode::InvalidSpec, "workspace_side must be positive");
}

bool GridSpec::contains(const Vec2& p) const
{
    return p.x() >= origin.x() && p.x() <= origin.x() + workspace_side && p.y() >= origin.y()
           && p.y() <= origin.y() + workspace_side;
}

Vec2 GridSpec::clamp(const Vec2& p) const
{
    return {std::clamp(p.x(), origin.x(), origin.x() + workspace_side),
            std::clamp(p.y(), origin.y(), origin.y() + workspace_side)};
}

std::size_t ClothTopology::count(EdgeKind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(edges.begin(), edges.end(), [kind](const Edge& e) { return e.kind == kind; }));
}

bool ClothState::pinned(int index) const
{
    return std::ranges::binary_search(pins, index, {}, &Pin::index);
}

double ClothState::max_speed() const
{
    double fastest = 0.0;
    for (const auto& v : velocities)
        fastest = std::max(fastest, v.norm());
    return fastest;
}

double ClothState::top_z() const
{
    double top = 0.0;
    for (const auto& p : positions)
        top = std::max(top, p.z());
    return top;
}

bool bit_identical(const ClothState& a, const ClothState& b)
{
    if (!a.topology || !b.topology)
        return a.topology == b.topology;
    if (a.topology->resolution != b.topology->resolution)
        return false;
    if (a.sim_time != b.sim_time || a.fold_count != b.fold_count)
        return false;
    if (a.positions != b.positions || a.velocities != b.velocities || a.contact_height != b.contact_height)
        return false;
    if (a.pins.size() != b.pins.size())
        return false;
    for (std::size_t i = 0; i < a.pins.size(); ++i)
        if (a.pins[i].index != b.pins[i].index || a.pins[i].target != b.pins[i].target)
            return false;
    return true;
}

ClothState create_cloth(const ClothSpec& spec, const Vec2& center)
{
    spec.validate();
    const int n = spec.resolution;
    const double h = spec.spacing();
    const double half = spec.side_length / 2;

    ClothState s;
    s.positions.reserve(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            s.positions.emplace_back(center.x() - half + c * h, center.y() - half + r * h, spec.thickness);
    s.velocities.assign(s.positions.size(), Vec3::Zero());
    s.contact_height.assign(s.positions.size(), spec.thickness);
    s.topology = build_topology(n, s.positions);
    return s;
}

void check_footprint(const ClothSpec& spec, const Vec2& center, const GridSpec& grid)
{
    const Vec2 half = Vec2::Constant(spec.side_length / 2);
    if (!grid.contains(center - half) || !grid.contains(center + half))
        throw Error(ErrorCode::InvalidSpec, "cloth footprint leaves the workspace");
}

ClothState step_sim(ClothState state, const ClothSpec& spec, int substeps)
{
    const std::array<double, 3> k = {
        iteration_stiffness(spec.structural_stiffness, spec.solver_iterations),
        iteration_stiffness(spec.shear_stiffness, spec.solver_iterations),
        iteration_stiffness(spec.bend_stiffness, spec.solver_iterations),
    };
    for (int i = 0; i < substeps; ++i)
        single_substep(state, spec, k);
    return state;
}

SettleResult settle(ClothState state, const ClothSpec& spec, double velocity_tol, int max_steps,
                    const std::function<void(const ClothState&)>& on_step)
{
    constexpr int kQuietSteps = 5;
    SettleResult result{std::move(state), 0, false};
    int quiet = 0;
    while (result.steps_used < max_steps) {
        result.state = step_sim(std::move(result.state), spec, 1);
        ++result.steps_used;
        if (on_step)
            on_step(result.state);
        quiet = result.state.max_speed() < velocity_tol ? quiet + 1 : 0;
        if (quiet >= kQuietSteps) {
            result.converged = true;
            break;
        }
    }
    return result;
}

Mask rasterize_topdown(const ClothState& state, const GridSpec& grid)
{
    grid.validate();
    const int px = grid.pixels_per_side;
    const double ps = grid.pixel_size();
    const double top = grid.origin.y() + grid.workspace_side;
    Mask mask(px, px);

    // Pixel-space coordinates in which pixel (c, r) has its centre at (c, r).
    const auto to_pixel = [&](const Vec3& p) {
        return Vec2((p.x() - grid.origin.x()) / ps - 0.5, (top - p.y()) / ps - 0.5);
    };
    const auto cross = [](const Vec2& a, const Vec2& b, const Vec2& p) {
        return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
    };

    for (const auto& tri : state.topology->triangles) {
        const Vec2 a = to_pixel(state.positions[tri[0]]);
        const Vec2 b = to_pixel(state.positions[tri[1]]);
        const Vec2 c = to_pixel(state.positions[tri[2]]);
        const double area = cross(a, b, c);
        if (area == 0.0)
            continue;
        const int x0 = std::max(0, static_cast<int>(std::ceil(std::min({a.x(), b.x(), c.x()}))));
        const int x1 = std::min(px - 1, static_cast<int>(std::floor(std::max({a.x(), b.x(), c.x()}))));
        const int y0 = std::max(0, static_cast<int>(std::ceil(std::min({a.y(), b.y(), c.y()}))));
        const int y1 = std::min(px - 1, static_cast<int>(std::floor(std::max({a.y(), b.y(), c.y()}))));
        const double sign = area > 0.0 ? 1.0 : -1.0;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const Vec2 p(x, y);
                if (sign * cross(a, b, p) >= 0.0 && sign * cross(b, c, p) >= 0.0 && sign * cross(c, a, p) >= 0.0)
                    mask.set(x, y);
            }
        }
    }
    return mask;
}

} // namespace foldlab

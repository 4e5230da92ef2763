#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace foldlab {

/// Binary occupancy grid, row-major, row 0 at the top (workspace north).
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, bool fill = false);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return bits_.empty(); }

    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool value = true) { bits_[index(x, y)] = value ? 1 : 0; }

    /// Number of set pixels.
    std::size_t area() const noexcept;

    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

    bool operator==(const Mask&) const = default;

private:
    std::size_t index(int x, int y) const
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Shift a mask by (dx columns, dy rows). Pixels moved outside the frame are
/// dropped; vacated pixels are 0.
Mask translate(const Mask& mask, int dx, int dy);

} // namespace foldlab

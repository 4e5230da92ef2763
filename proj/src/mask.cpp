#include "foldlab/mask.hpp"

#include "foldlab/error.hpp"

#include <algorithm>
#include <numeric>

namespace foldlab {

Mask::Mask(int width, int height, bool fill)
    : width_(width), height_(height)
{
    if (width < 1 || height < 1)
        throw Error(ErrorCode::EmptyImage, "mask dimensions must be at least 1x1");
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t Mask::area() const noexcept
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Mask translate(const Mask& mask, int dx, int dy)
{
    Mask out(mask.width(), mask.height());
    const int x0 = std::max(0, -dx);
    const int x1 = std::min(mask.width(), mask.width() - dx);
    const int y0 = std::max(0, -dy);
    const int y1 = std::min(mask.height(), mask.height() - dy);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x)
            if (mask.at(x, y))
                out.set(x + dx, y + dy);
    return out;
}

} // namespace foldlab

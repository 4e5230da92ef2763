#include "foldlab/netpbm.hpp"

#include "foldlab/error.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace foldlab {
namespace {

// Reads one whitespace-separated header token, skipping '#' comments.
std::string header_token(std::istream& in)
{
    std::string token;
    char c = 0;
    while (in.get(c)) {
        if (c == '#') {
            std::string discard;
            std::getline(in, discard);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!token.empty())
                break;
            continue;
        }
        token.push_back(c);
    }
    return token;
}

struct Header {
    std::string magic;
    int width = 0;
    int height = 0;
    int maxval = 0;
};

Header read_header(std::istream& in, const char* expected)
{
    Header h;
    h.magic = header_token(in);
    if (h.magic != expected)
        throw Error(ErrorCode::SchemaError, std::string("expected netpbm magic ") + expected + ", got '" + h.magic + "'");
    try {
        h.width = std::stoi(header_token(in));
        h.height = std::stoi(header_token(in));
        h.maxval = std::stoi(header_token(in));
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::SchemaError, "malformed netpbm header");
    }
    if (h.width < 1 || h.height < 1)
        throw Error(ErrorCode::EmptyImage, "netpbm image has no pixels");
    if (h.maxval < 1 || h.maxval > 255)
        throw Error(ErrorCode::SchemaError, "only 8-bit netpbm images are supported");
    return h;
}

std::ifstream open_binary(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return in;
}

} // namespace

void write_pgm(std::ostream& out, const Mask& mask)
{
    out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
    for (auto bit : mask.bits())
        out.put(bit ? static_cast<char>(255) : static_cast<char>(0));
}

void write_pgm(const std::filesystem::path& path, const Mask& mask)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    write_pgm(out, mask);
}

Mask read_pgm(std::istream& in)
{
    const Header h = read_header(in, "P5");
    Mask mask(h.width, h.height);
    for (int y = 0; y < h.height; ++y) {
        for (int x = 0; x < h.width; ++x) {
            char c = 0;
            if (!in.get(c))
                throw Error(ErrorCode::SchemaError, "truncated P5 pixel data");
            if (c != 0)
                mask.set(x, y);
        }
    }
    return mask;
}

Mask read_pgm(const std::filesystem::path& path)
{
    auto in = open_binary(path);
    return read_pgm(in);
}

void write_ppm(std::ostream& out, const RgbImage& image)
{
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    for (const auto& p : image.pixels) {
        out.put(static_cast<char>(p.r));
        out.put(static_cast<char>(p.g));
        out.put(static_cast<char>(p.b));
    }
}

RgbImage read_ppm(std::istream& in)
{
    const Header h = read_header(in, "P6");
    RgbImage image{h.width, h.height, {}};
    image.pixels.resize(static_cast<std::size_t>(h.width) * h.height);
    for (auto& p : image.pixels) {
        char c[3];
        if (!in.read(c, 3))
            throw Error(ErrorCode::SchemaError, "truncated P6 pixel data");
        p = {static_cast<std::uint8_t>(c[0]), static_cast<std::uint8_t>(c[1]), static_cast<std::uint8_t>(c[2])};
    }
    return image;
}

RgbImage read_ppm(const std::filesystem::path& path)
{
    auto in = open_binary(path);
    return read_ppm(in);
}

std::string netpbm_magic(const std::filesystem::path& path)
{
    auto in = open_binary(path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    return std::string(magic, 2);
}

} // namespace foldlab

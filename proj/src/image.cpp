#include "sigkit/image.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <png.h>

namespace sigkit {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxPixels = std::size_t(1) << 28; // sanity cap for file headers

// --- PGM ---------------------------------------------------------------

// Reads one PNM header integer, skipping whitespace and '#' comments.
int read_pnm_int(std::istream& in)
{
    int ch = in.get();
    for (;;) {
        if (ch == '#') {
            while (ch != '\n' && ch != EOF)
                ch = in.get();
        } else if (std::isspace(ch)) {
            ch = in.get();
        } else {
            break;
        }
    }
    if (ch == EOF || !std::isdigit(ch))
        raise(Errc::MalformedImage, "bad PGM header");
    long value = 0;
    while (std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        if (value > 1 << 24)
            raise(Errc::MalformedImage, "PGM header value out of range");
        ch = in.get();
    }
    if (ch != EOF && !std::isspace(ch))
        raise(Errc::MalformedImage, "bad PGM header");
    in.unget();
    return static_cast<int>(value);
}

GrayImage load_pgm(std::istream& in)
{
    char magic[2] = {};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        raise(Errc::MalformedImage, "not a binary PGM");

    const int w = read_pnm_int(in);
    const int h = read_pnm_int(in);
    const int maxval = read_pnm_int(in);
    if (w < 1 || h < 1 || static_cast<std::size_t>(w) * h > kMaxPixels)
        raise(Errc::MalformedImage, "bad PGM dimensions");
    if (maxval != 255)
        raise(Errc::MalformedImage, "PGM maxval must be 255");

    // Exactly one whitespace byte separates the header from the payload.
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep))
        raise(Errc::MalformedImage, "bad PGM header terminator");

    GrayImage img(w, h);
    in.read(reinterpret_cast<char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        raise(Errc::MalformedImage, "truncated PGM payload");
    return img;
}

// --- PNG ---------------------------------------------------------------

GrayImage load_png_file(const fs::path& path)
{
    std::FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp)
        raise(Errc::FileNotFound, path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png)
            png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        raise(Errc::IoFailure, "png allocation failed");
    }

    std::vector<std::uint8_t> data;
    std::vector<png_bytep> rows;
    int w = 0, h = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        raise(Errc::MalformedImage, "png decode failed: " + path.string());
    }

    png_init_io(png, fp);
    png_read_info(png, info);

    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (color != PNG_COLOR_TYPE_GRAY || depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        raise(Errc::MalformedImage, "PNG must be 8-bit grayscale without alpha");
    }
    if (w < 1 || h < 1 || static_cast<std::size_t>(w) * h > kMaxPixels) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        raise(Errc::MalformedImage, "bad PNG dimensions");
    }

    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    data.resize(static_cast<std::size_t>(w) * h);
    rows.resize(h);
    for (int y = 0; y < h; ++y)
        rows[y] = data.data() + static_cast<std::size_t>(y) * w;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    GrayImage img(w, h);
    img.pixels = std::move(data);
    return img;
}

// --- sampling ----------------------------------------------------------

inline std::uint8_t quantize(double v)
{
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
}

// Bilinear sample; coordinates outside the source read as background (255).
double sample_background(const GrayImage& img, double sx, double sy)
{
    const int x0 = static_cast<int>(std::floor(sx));
    const int y0 = static_cast<int>(std::floor(sy));
    if (x0 < -1 || y0 < -1 || x0 >= img.width || y0 >= img.height)
        return 255.0;
    const double fx = sx - x0;
    const double fy = sy - y0;
    auto px = [&](int x, int y) -> double {
        if (x < 0 || y < 0 || x >= img.width || y >= img.height)
            return 255.0;
        return img.at(x, y);
    };
    const double top = px(x0, y0) + fx * (px(x0 + 1, y0) - px(x0, y0));
    const double bot = px(x0, y0 + 1) + fx * (px(x0 + 1, y0 + 1) - px(x0, y0 + 1));
    return top + fy * (bot - top);
}

// Bilinear sample with edge clamping, for resampling inside the source.
double sample_clamped(const GrayImage& img, double sx, double sy)
{
    sx = std::clamp(sx, 0.0, static_cast<double>(img.width - 1));
    sy = std::clamp(sy, 0.0, static_cast<double>(img.height - 1));
    const int x0 = static_cast<int>(sx);
    const int y0 = static_cast<int>(sy);
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double fx = sx - x0;
    const double fy = sy - y0;
    const double top = img.at(x0, y0) + fx * (img.at(x1, y0) - img.at(x0, y0));
    const double bot = img.at(x0, y1) + fx * (img.at(x1, y1) - img.at(x0, y1));
    return top + fy * (bot - top);
}

} // namespace

GrayImage load_image(const fs::path& path)
{
    if (!fs::exists(path))
        raise(Errc::FileNotFound, path.string());

    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(Errc::IoFailure, "cannot open " + path.string());

    char magic[2] = {};
    in.read(magic, 2);
    if (!in)
        raise(Errc::MalformedImage, "empty or unreadable file: " + path.string());
    in.seekg(0);

    if (magic[0] == 'P' && magic[1] == '5')
        return load_pgm(in);
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') {
        in.close();
        return load_png_file(path);
    }
    raise(Errc::MalformedImage, "unsupported image format: " + path.string());
}

void save_image(const GrayImage& img, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        raise(Errc::IoFailure, "cannot open " + path.string() + " for writing");
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out)
        raise(Errc::IoFailure, "short write to " + path.string());
}

GrayImage rotate(const GrayImage& img, double angle_deg)
{
    if (!std::isfinite(angle_deg))
        raise(Errc::InvalidArgument, "rotation angle must be finite");
    if (angle_deg == 0.0)
        return img;

    const double rad = angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    const int w = img.width;
    const int h = img.height;
    // Bounding canvas of the rotated rectangle; the small epsilon keeps exact
    // multiples of 90 degrees from picking up a spurious extra row/column.
    const int out_w = std::max(1, static_cast<int>(std::ceil(std::abs(c) * w + std::abs(s) * h - 1e-9)));
    const int out_h = std::max(1, static_cast<int>(std::ceil(std::abs(s) * w + std::abs(c) * h - 1e-9)));
    const double cx = 0.5 * (w - 1);
    const double cy = 0.5 * (h - 1);
    const double ocx = 0.5 * (out_w - 1);
    const double ocy = 0.5 * (out_h - 1);

    GrayImage out(out_w, out_h, 255);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const double dx = x - ocx;
            const double dy = y - ocy;
            const double sx = c * dx + s * dy + cx;
            const double sy = -s * dx + c * dy + cy;
            out.at(x, y) = quantize(sample_background(img, sx, sy));
        }
    }
    return out;
}

InkBox ink_bbox(const GrayImage& img, int threshold)
{
    int left = img.width, right = -1, top = img.height, bottom = -1;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (img.at(x, y) < threshold) {
                left = std::min(left, x);
                right = std::max(right, x);
                top = std::min(top, y);
                bottom = std::max(bottom, y);
            }
        }
    }
    if (right < 0)
        raise(Errc::NoInk, "no pixel below intensity threshold");
    return InkBox{left, top, right, bottom};
}

GrayImage crop(const GrayImage& img, const InkBox& box)
{
    if (box.left < 0 || box.top < 0 || box.left > box.right || box.top > box.bottom ||
        box.right >= img.width || box.bottom >= img.height)
        raise(Errc::OutOfBounds, "crop box outside image bounds");

    GrayImage out(box.box_width(), box.box_height());
    for (int y = 0; y < out.height; ++y)
        std::copy_n(&img.pixels[static_cast<std::size_t>(box.top + y) * img.width + box.left],
                    out.width, &out.pixels[static_cast<std::size_t>(y) * out.width]);
    return out;
}

GrayImage resize(const GrayImage& img, int new_width, int new_height)
{
    if (new_width < 1 || new_height < 1)
        raise(Errc::InvalidArgument, "resize dimensions must be >= 1");

    const double x_ratio = static_cast<double>(img.width) / new_width;
    const double y_ratio = static_cast<double>(img.height) / new_height;
    GrayImage out(new_width, new_height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < new_height; ++y) {
        const double sy = (y + 0.5) * y_ratio - 0.5;
        for (int x = 0; x < new_width; ++x) {
            const double sx = (x + 0.5) * x_ratio - 0.5;
            out.at(x, y) = quantize(sample_clamped(img, sx, sy));
        }
    }
    return out;
}

RealImage to_real(const GrayImage& img)
{
    RealImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        out.values[i] = img.pixels[i];
    return out;
}

GrayImage to_gray(const RealImage& img)
{
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.values.size(); ++i)
        out.pixels[i] = quantize(img.values[i]);
    return out;
}

} // namespace sigkit

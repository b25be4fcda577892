#include "taxoprobe/heatmap.hpp"

#include "taxoprobe/tsv.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace taxoprobe {

void Image::set_pixel(std::uint32_t x, std::uint32_t y, std::uint8_t r, std::uint8_t g,
                      std::uint8_t b) {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
}

namespace {

void put_u32_be(std::string *out, std::uint32_t v) {
    out->push_back(static_cast<char>((v >> 24) & 0xff));
    out->push_back(static_cast<char>((v >> 16) & 0xff));
    out->push_back(static_cast<char>((v >> 8) & 0xff));
    out->push_back(static_cast<char>(v & 0xff));
}

void append_chunk(std::string *out, const char type[4], const std::string &payload) {
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    std::string body(type, 4);
    body += payload;
    out->append(body);
    const auto crc =
        crc32(0L, reinterpret_cast<const Bytef *>(body.data()), static_cast<uInt>(body.size()));
    put_u32_be(out, static_cast<std::uint32_t>(crc));
}

} // namespace

void write_png(const Image &image, const std::string &path) {
    if (image.width == 0 || image.height == 0 ||
        image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3)
        throw std::invalid_argument("write_png: malformed image buffer");

    // filter byte 0 in front of every scanline
    std::string raw;
    raw.reserve(static_cast<std::size_t>(image.height) * (1 + image.width * 3));
    for (std::uint32_t y = 0; y < image.height; ++y) {
        raw.push_back('\0');
        const char *row =
            reinterpret_cast<const char *>(image.rgb.data()) +
            static_cast<std::size_t>(y) * image.width * 3;
        raw.append(row, static_cast<std::size_t>(image.width) * 3);
    }

    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(compressed_size, '\0');
    if (compress2(reinterpret_cast<Bytef *>(compressed.data()), &compressed_size,
                  reinterpret_cast<const Bytef *>(raw.data()), static_cast<uLong>(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK)
        throw std::runtime_error("write_png: deflate failed");
    compressed.resize(compressed_size);

    std::string ihdr;
    put_u32_be(&ihdr, image.width);
    put_u32_be(&ihdr, image.height);
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // no interlace

    std::string png("\x89PNG\r\n\x1a\n", 8);
    append_chunk(&png, "IHDR", ihdr);
    append_chunk(&png, "IDAT", compressed);
    append_chunk(&png, "IEND", "");

    write_text_file(path, png);
}

} // namespace taxoprobe

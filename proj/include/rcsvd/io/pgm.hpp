#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <iterator>
#include <string>
#include <vector>

#include "rcsvd/io/atomic_file.hpp"

namespace rcsvd {

/// 8-bit grayscale image, pixels row-major.
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t& at(std::size_t row, std::size_t col) { return pixels[row * width + col]; }
    std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

namespace io {

namespace detail {

// Next header token of a PNM stream, skipping whitespace and '#' comments.
inline std::string pnm_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') in.unget();
    return tok;
}

inline std::size_t pnm_number(std::istream& in, const char* what) {
    const std::string tok = pnm_token(in);
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw FormatError(std::string("PGM: bad ") + what + " '" + tok + "'");
    return std::stoul(tok);
}

} // namespace detail

/**
 * Reads a P2 (ASCII) or P5 (binary) PGM with maxval <= 255. Pixel values
 * are kept as stored; they are not rescaled to 255.
 */
inline GrayImage read_pgm(std::istream& in) {
    const std::string magic = detail::pnm_token(in);
    if (magic != "P2" && magic != "P5") throw FormatError("PGM: bad magic '" + magic + "'");
    GrayImage img;
    img.width = detail::pnm_number(in, "width");
    img.height = detail::pnm_number(in, "height");
    const std::size_t maxval = detail::pnm_number(in, "maxval");
    if (img.width == 0 || img.height == 0) throw FormatError("PGM: zero dimension");
    if (maxval == 0 || maxval > 255)
        throw FormatError("PGM: maxval " + std::to_string(maxval) + " not in [1, 255]");

    const std::size_t count = img.width * img.height;
    img.pixels.resize(count);
    if (magic == "P5") {
        // Exactly one whitespace byte separates maxval from the payload; the
        // token reader already consumed it.
        in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(count));
        const auto got = static_cast<std::size_t>(in.gcount());
        if (got != count) {
            throw FormatError("PGM: truncated payload, expected " + std::to_string(count) +
                              " bytes, found " + std::to_string(got));
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::string tok = detail::pnm_token(in);
            if (tok.empty()) {
                throw FormatError("PGM: truncated payload, expected " + std::to_string(count) +
                                  " values, found " + std::to_string(i));
            }
            if (tok.find_first_not_of("0123456789") != std::string::npos)
                throw FormatError("PGM: bad pixel value '" + tok + "'");
            const unsigned long v = std::stoul(tok);
            if (v > maxval) throw FormatError("PGM: pixel " + tok + " exceeds maxval");
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    for (std::uint8_t p : img.pixels)
        if (p > maxval) throw FormatError("PGM: pixel exceeds maxval " + std::to_string(maxval));
    return img;
}

inline GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in = open_for_reading(path, std::ios::in | std::ios::binary);
    try {
        return read_pgm(in);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

/// Writes binary P5 with maxval 255.
inline void write_pgm(const GrayImage& img, std::ostream& out) {
    if (img.pixels.size() != img.width * img.height)
        throw ShapeError("write_pgm: pixel count does not match dimensions");
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
}

inline void write_pgm(const GrayImage& img, const std::filesystem::path& path) {
    write_atomically(
        path, [&](std::ostream& out) { write_pgm(img, out); }, std::ios::out | std::ios::binary);
}

} // namespace io
} // namespace rcsvd

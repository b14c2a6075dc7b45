#pragma once

#include <gsc/error.hpp>
#include <gsc/image.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace gsc {

namespace detail {

// Reads one whitespace-delimited header token, skipping '#' comments.
inline bool next_pgm_token(const std::vector<unsigned char> &buf, std::size_t &pos,
                           std::string &token) {
    token.clear();
    while (pos < buf.size()) {
        const unsigned char ch = buf[pos];
        if (ch == '#') {
            while (pos < buf.size() && buf[pos] != '\n')
                ++pos;
        } else if (std::isspace(ch)) {
            ++pos;
        } else {
            break;
        }
    }
    while (pos < buf.size() && !std::isspace(buf[pos]) && buf[pos] != '#')
        token.push_back(static_cast<char>(buf[pos++]));
    return !token.empty();
}

inline int parse_pgm_int(const std::string &token, const char *field) {
    require(!token.empty() &&
                std::all_of(token.begin(), token.end(),
                            [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) &&
                token.size() <= 9,
            Errc::MalformedHeader, std::string("bad PGM ") + field + " '" + token + "'");
    return std::stoi(token);
}

} // namespace detail

/// Reads a binary (P5) 8-bit PGM.
inline Image load_pgm(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    detail::require(static_cast<bool>(in), Errc::FileNotFound,
                    "cannot open '" + path.string() + "'");
    const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());

    detail::require(buf.size() >= 2 && buf[0] == 'P', Errc::MalformedHeader,
                    "missing PGM magic in '" + path.string() + "'");
    detail::require(buf[1] == '5', Errc::UnsupportedFormat,
                    "only binary P5 PGM is supported, got P" +
                        std::string(1, static_cast<char>(buf[1])));

    std::size_t pos = 2;
    std::string token;
    detail::require(pos < buf.size() && std::isspace(buf[pos]), Errc::MalformedHeader,
                    "no separator after magic");
    detail::require(detail::next_pgm_token(buf, pos, token), Errc::MalformedHeader,
                    "missing width");
    const int width = detail::parse_pgm_int(token, "width");
    detail::require(detail::next_pgm_token(buf, pos, token), Errc::MalformedHeader,
                    "missing height");
    const int height = detail::parse_pgm_int(token, "height");
    detail::require(detail::next_pgm_token(buf, pos, token), Errc::MalformedHeader,
                    "missing maxval");
    const int maxval = detail::parse_pgm_int(token, "maxval");
    detail::require(width >= 1 && height >= 1, Errc::MalformedHeader,
                    "zero image dimension");
    detail::require(maxval == 255, Errc::UnsupportedMaxval,
                    "maxval " + std::to_string(maxval) + " (only 255 supported)");
    // Exactly one whitespace byte separates maxval from the raster.
    detail::require(pos < buf.size() && std::isspace(buf[pos]), Errc::TruncatedPayload,
                    "header not terminated");
    ++pos;

    const std::size_t n = static_cast<std::size_t>(width) * height;
    detail::require(buf.size() - pos >= n, Errc::TruncatedPayload,
                    "expected " + std::to_string(n) + " pixel bytes, found " +
                        std::to_string(buf.size() - pos));
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i)
        data[i] = buf[pos + i];
    return Image(width, height, std::move(data));
}

/// Clamp to [0, 255] and round half away from zero.
inline std::uint8_t to_byte(double v) noexcept {
    return static_cast<std::uint8_t>(std::round(std::clamp(v, 0.0, 255.0)));
}

inline void save_pgm(const Image &img, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    detail::require(static_cast<bool>(out), Errc::Unwritable,
                    "cannot write '" + path.string() + "'");
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<char> bytes(img.size());
    const auto data = img.data();
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<char>(to_byte(data[i]));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    detail::require(static_cast<bool>(out), Errc::Unwritable,
                    "write failed for '" + path.string() + "'");
}

} // namespace gsc

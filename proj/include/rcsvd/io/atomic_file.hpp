#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "rcsvd/error.hpp"

namespace rcsvd::io {

/// Writes through `fill(std::ostream&)` into `<path>.tmp`, then renames the
/// temporary over `path`, so readers never observe a half-written file.
template <typename Fill>
void write_atomically(const std::filesystem::path& path, Fill&& fill,
                      std::ios::openmode mode = std::ios::out) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, mode | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        fill(out);
        out.flush();
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
    }
}

inline std::ifstream open_for_reading(const std::filesystem::path& path,
                                      std::ios::openmode mode = std::ios::in) {
    std::ifstream in(path, mode);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

} // namespace rcsvd::io

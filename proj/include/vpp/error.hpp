#pragma once

#include <stdexcept>
#include <string>

namespace vpp {

/// Malformed file content (bad magic, wrong bit depth, unparsable fields).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Missing file, short read/write, OS-level failure.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vpp

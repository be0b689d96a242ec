#pragma once

#include <stdexcept>
#include <string>

namespace groupsparse {

enum class errc {
    dimension_mismatch,
    non_finite,
    invalid_argument,
    no_convergence,
    io_failure,
    bad_config,
};

inline const char* to_string(errc c) {
    switch (c) {
        case errc::dimension_mismatch: return "dimension_mismatch";
        case errc::non_finite: return "non_finite";
        case errc::invalid_argument: return "invalid_argument";
        case errc::no_convergence: return "no_convergence";
        case errc::io_failure: return "io_failure";
        case errc::bad_config: return "bad_config";
    }
    return "unknown";
}

/// Library-wide exception carrying a machine-readable error code.
class Error : public std::runtime_error {
  public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

inline void require(bool ok, errc code, const std::string& what) {
    if (!ok) throw Error(code, what);
}

}  // namespace groupsparse

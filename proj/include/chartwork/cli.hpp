#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "chartwork/finite_topology.hpp"

namespace chartwork::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Malformed space file; the message carries the location.
class SpaceFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses `{"points": [labels…], "opens": [[labels…], …]}`. Labels are
/// non-empty strings; repeated opens are merged. `source` names the input
/// in error messages.
[[nodiscard]] topo::FiniteSpace parse_space(const std::string& text, const std::string& source = "<input>");
[[nodiscard]] topo::FiniteSpace load_space(const std::string& path);

/// Runs one command line (without the program name). Returns the exit code:
/// 0 pass, 1 verification failure, 2 usage or input error.
[[nodiscard]] int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chartwork::cli

#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace gridatlas {

// Exit codes: 0 ok, 2 config problem, 3 runtime failure, 4 missing or corrupt
// checkpoint / absent episode.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitMissing = 4;

// Full command-line entry point, factored out of main() so tests can drive it
// in-process. args excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout,
             std::ostream& err = std::cerr);

}  // namespace gridatlas

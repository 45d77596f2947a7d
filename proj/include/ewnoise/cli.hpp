#ifndef EWNOISE_CLI_HPP
#define EWNOISE_CLI_HPP

#include <string>
#include <vector>

namespace ewnoise::cli {

/// Runs the command-line driver. Exit codes: 0 success, 2 usage,
/// 3 parse/input error, 4 numerical error, 5 partial batch failure.
int run(const std::vector<std::string>& args);

} // namespace ewnoise::cli

#endif

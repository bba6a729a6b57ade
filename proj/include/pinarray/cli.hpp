#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pinarray
{

/// Exit statuses of the command-line front end.
namespace exit_code
{
inline constexpr int kOk = 0;
inline constexpr int kConfig = 2;
inline constexpr int kSimulation = 3;
}  // namespace exit_code

/// Entry point behind the `pinarray` executable. Returns the exit status;
/// everything that would go to stdout/stderr goes to `out`/`err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pinarray

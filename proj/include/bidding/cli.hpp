#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bidding {

/// Entry point of the bidgame tool, separated from main() so tests can
/// drive it in-process. Returns 0 on success, 1 on validation/usage errors,
/// 2 on solver non-convergence.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bidding

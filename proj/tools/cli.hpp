#pragma once

namespace modclust::cli {

/// Entry point of the `modclust` tool. Returns 0 on success, 1 on a usage
/// error, 2 on a data error and 3 on numerical degeneracy.
int cli_main(int argc, const char* const* argv);

}  // namespace modclust::cli

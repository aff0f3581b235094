#pragma once

namespace axnn::cli {

/// Parses argv, dispatches the subcommand and maps failures to exit codes:
/// 0 success, 2 usage, 3 numeric, 4 data/schema, 5 I/O.
int run(int argc, char** argv);

}  // namespace axnn::cli

#pragma once

namespace mvtc::cli {

/// Batch front end. Subcommands: simulate, cov, theorem, measure, infer,
/// analyze, mc. Returns 0 on success, 1 on usage error, 2 on
/// numerical/validation error; errors are mirrored as JSON on stderr.
int run(int argc, const char* const* argv);

}  // namespace mvtc::cli

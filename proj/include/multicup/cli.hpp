#pragma once

namespace multicup {

/// CLI entry point, callable in-process by tests. Exit codes: 0 success
/// (including "no grasp found", which the report records), 1 usage error,
/// 2 unreadable/malformed input, 3 validation failure.
int run_cli(int argc, const char* const* argv);

}  // namespace multicup

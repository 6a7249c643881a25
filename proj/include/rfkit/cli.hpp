#pragma once

namespace rfkit {

// Full command-line surface (subcommands: metrics, fit, pattern, geom,
// report). Returns the process exit status; 0 only when every requested
// output file was written. Outputs are staged and renamed into place as a
// set, so a failing run leaves no partial report behind.
int cli_main(int argc, const char* const* argv);

}  // namespace rfkit

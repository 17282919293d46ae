#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace obsolens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

// args excludes the program name. Subcommands: ingest, query, trend, deltas,
// genres, fragment, atrophy, compete, sample, annotate {serve,estimate}, report.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace obsolens::cli

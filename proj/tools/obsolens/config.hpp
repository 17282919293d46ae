#pragma once

// key = value settings file. '#' starts a comment; "pattern" may repeat.
//
//   alpha = 0.05
//   negation_window = 6
//   fragmentation_min_genres = 3
//   coverage_threshold = 0.5
//   punctuation_tags = y, punc, ",", "."
//   seed = 20210419
//   kwic_width = 5
//   sample_size = 100
//   pattern = in order that

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obsolens/diagnostics.hpp"

namespace obsolens::cli {

inline constexpr std::uint64_t kDefaultSeed = 20210419;

struct Settings {
  DiagnosticsConfig diagnostics;
  std::uint64_t seed = kDefaultSeed;
  std::size_t kwic_width = 5;
  std::size_t sample_size = 100;
  std::vector<std::string> patterns;
};

Settings parse_settings(const std::string& text, const std::string& origin = "<config>");

// Explicit path, else $OBSOLENS_CONFIG, else ./obsolens.conf if present,
// else defaults. An explicit or environment path that is missing is an error.
Settings load_settings(const std::optional<std::string>& explicit_path);

}  // namespace obsolens::cli

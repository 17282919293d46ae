#include "config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "obsolens/error.hpp"

namespace obsolens::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

// Comma-separated items; a double-quoted item may contain commas.
std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : value) {
    if (c == '"') {
      quoted = !quoted;
      cur += c;
    } else if (c == ',' && !quoted) {
      out.push_back(unquote(trim(cur)));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(unquote(trim(cur)));
  return out;
}

template <class T>
T number(const std::string& value, const std::string& where) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw Error(ErrorCode::kFormat, where + ": '" + value + "' is not a valid number");
  }
  return out;
}

}  // namespace

Settings parse_settings(const std::string& text, const std::string& origin) {
  Settings s;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool punct_set = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto where = origin + ":" + std::to_string(line_no);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kFormat, where + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "alpha") {
      s.diagnostics.alpha = number<double>(value, where);
    } else if (key == "negation_window") {
      s.diagnostics.negation_window = number<int>(value, where);
    } else if (key == "fragmentation_min_genres") {
      s.diagnostics.fragmentation_min_genres = number<int>(value, where);
    } else if (key == "coverage_threshold") {
      s.diagnostics.coverage_threshold = number<double>(value, where);
    } else if (key == "punctuation_tags") {
      if (!punct_set) s.diagnostics.punctuation_tags.clear();
      punct_set = true;
      for (const auto& tag : split_list(value)) {
        if (!tag.empty()) s.diagnostics.punctuation_tags.insert(normalize_form(tag));
      }
    } else if (key == "seed") {
      s.seed = number<std::uint64_t>(value, where);
    } else if (key == "kwic_width") {
      s.kwic_width = number<std::size_t>(value, where);
    } else if (key == "sample_size") {
      s.sample_size = number<std::size_t>(value, where);
    } else if (key == "pattern") {
      s.patterns.push_back(unquote(value));
    } else {
      throw Error(ErrorCode::kFormat, where + ": unknown key '" + key + "'");
    }
  }
  s.diagnostics.validate();
  return s;
}

Settings load_settings(const std::optional<std::string>& explicit_path) {
  std::optional<std::string> path = explicit_path;
  if (!path) {
    if (const char* env = std::getenv("OBSOLENS_CONFIG"); env && *env) path = env;
  }
  if (!path) {
    if (!std::filesystem::exists("obsolens.conf")) return Settings{};
    path = "obsolens.conf";
  }
  std::ifstream in(*path);
  if (!in) throw Error(ErrorCode::kIo, "config file '" + *path + "' not found");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_settings(buf.str(), *path);
}

}  // namespace obsolens::cli

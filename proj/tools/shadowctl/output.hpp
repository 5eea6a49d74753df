#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <json.hpp>

namespace shadowctl {

using OJson = nlohmann::ordered_json;

/// Writes `text` with a trailing newline, creating parent directories.
inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

inline void write_json(const std::filesystem::path& path, const OJson& j) { write_text(path, j.dump(2)); }

template <class F>
void write_csv(const std::filesystem::path& path, F&& body) {
  std::ostringstream out;
  body(out);
  write_text(path, out.str());
}

}  // namespace shadowctl

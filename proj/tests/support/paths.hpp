#pragma once

#include <filesystem>
#include <string>

namespace testpaths {

inline std::filesystem::path source_dir() { return NETSPEC_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& name) {
  return source_dir() / "fixtures" / name;
}
inline std::filesystem::path preset(const std::string& name) {
  return source_dir() / "presets" / name;
}

}  // namespace testpaths

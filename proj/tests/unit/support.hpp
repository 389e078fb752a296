#pragma once

#include <filesystem>
#include <fstream>
#include <unistd.h>
#include <string>
#include <string_view>

// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(std::string_view name) {
    path = std::filesystem::temp_directory_path() / ("apptopics_" + std::string(name) + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }

  std::filesystem::path write(const std::string& rel, std::string_view content) const {
    auto p = path / rel;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }
};

inline std::string sha_of(char c) { return std::string(64, c); }

inline constexpr std::string_view kPngHeader = "\x89PNG\r\n\x1a\n\0\0\0\rIHDR";

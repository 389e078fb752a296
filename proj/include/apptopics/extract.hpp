#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "apptopics/util.hpp"

namespace apptopics {

// One decompiled app on disk. Directory names follow `<sha256>__<package_id>`.
struct AppDirRef {
  std::filesystem::path root_path;
  std::string sha256;
  std::string package_id;

  // Parses `root` from its directory name and validates the invariants.
  static AppDirRef from_directory(const std::filesystem::path& root);
};

bool is_sha256_hex(std::string_view s);

// Every `<sha256>__<package_id>` directory directly under `input_root`,
// sorted by sha256. Directories with other names are ignored.
std::vector<AppDirRef> discover_apps(const std::filesystem::path& input_root);

struct RawAppFeatures {
  std::string sha256;
  std::string package_id;
  Words method_identifiers;  // raw names, pre-split, in scan order
  Words method_words;        // split, lowercased, stopword-filtered
  Words xml_words;           // lowercased, length >= 2
  Words gui_words;           // lowercased, length >= 2
  Words xml_keys;            // `name` attributes of string resources
  std::size_t smali_file_count = 0;
  std::size_t xml_file_count = 0;
  std::size_t image_file_count = 0;
  std::size_t skipped_file_count = 0;
};

class StopwordTable {
 public:
  // The Android keyword list, lowercased.
  static StopwordTable android_default();

  void add(std::string_view word);
  bool contains(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::set<std::string, std::less<>> entries_;
};

// Text recovered from image files.
class OcrAdapter {
 public:
  virtual ~OcrAdapter() = default;
  // Returns false when the image should be skipped.
  virtual bool extract(const std::filesystem::path& image, std::string& text) const = 0;
};

// Reads `X.txt` next to image `X`; a missing sidecar means no text.
class SidecarOcr final : public OcrAdapter {
 public:
  bool extract(const std::filesystem::path& image, std::string& text) const override;
};

// Runs `command <image>` and reads its standard output. Construction fails
// if the executable cannot be found.
class CommandOcr final : public OcrAdapter {
 public:
  explicit CommandOcr(std::string command);
  bool extract(const std::filesystem::path& image, std::string& text) const override;

 private:
  std::string command_;
};

std::unique_ptr<OcrAdapter> make_ocr_adapter(std::string_view kind, const std::string& command);

// Magic-byte probe: PNG, JPEG, GIF, BMP or WebP.
bool is_image_file(const std::filesystem::path& path);

struct ScanCounts {
  std::size_t files = 0;
  std::size_t skipped = 0;
};

Words scan_smali_methods(const AppDirRef& app, ScanCounts* counts = nullptr);

// Method identifier on one smali line, or empty when the line is not a
// `.method` directive.
std::string method_identifier_from_line(std::string_view line);

Words split_identifier(std::string_view identifier);
Words strip_code_stopwords(const Words& words, const StopwordTable& table);

// Captures of `>([^>]*)</` in one document, in order.
std::vector<std::string> xml_value_captures(std::string_view text);
Words xml_string_keys(std::string_view text);

Words scan_xml_strings(const AppDirRef& app, ScanCounts* counts = nullptr, Words* keys = nullptr);
Words scan_gui_text(const AppDirRef& app, const OcrAdapter& ocr, ScanCounts* counts = nullptr);

RawAppFeatures assemble_record(const AppDirRef& app, const Words& methods, const Words& xml,
                               const Words& gui, const StopwordTable& table);

// Full extraction for one app directory.
RawAppFeatures extract_app(const AppDirRef& app, const OcrAdapter& ocr, const StopwordTable& table);

}  // namespace apptopics

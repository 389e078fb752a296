#include "apptopics/extract.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>

#include <sys/wait.h>
#include <unistd.h>

namespace apptopics {

namespace fs = std::filesystem;

bool is_sha256_hex(std::string_view s) {
  if (s.size() != 64) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

AppDirRef AppDirRef::from_directory(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error("app directory does not exist: " + root.string());
  std::string name = root.filename().string();
  if (name.empty()) name = root.parent_path().filename().string();
  auto sep = name.find("__");
  if (sep == std::string::npos) {
    throw Error("app directory name is not <sha256>__<package_id>: " + name);
  }
  AppDirRef ref{root, name.substr(0, sep), name.substr(sep + 2)};
  if (!is_sha256_hex(ref.sha256)) throw Error("invalid sha256 in directory name: " + name);
  if (ref.package_id.empty()) throw Error("empty package id in directory name: " + name);
  return ref;
}

std::vector<AppDirRef> discover_apps(const fs::path& input_root) {
  if (!fs::is_directory(input_root)) throw Error("input root does not exist: " + input_root.string());
  std::vector<AppDirRef> apps;
  for (const auto& entry : fs::directory_iterator(input_root)) {
    if (!entry.is_directory()) continue;
    std::string name = entry.path().filename().string();
    auto sep = name.find("__");
    if (sep == std::string::npos || !is_sha256_hex(name.substr(0, sep)) || sep + 2 >= name.size()) {
      continue;
    }
    apps.push_back(AppDirRef::from_directory(entry.path()));
  }
  std::sort(apps.begin(), apps.end(), [](const AppDirRef& a, const AppDirRef& b) {
    return a.sha256 != b.sha256 ? a.sha256 < b.sha256 : a.package_id < b.package_id;
  });
  return apps;
}

// ---------------------------------------------------------------------------
// Stopwords

StopwordTable StopwordTable::android_default() {
  static constexpr std::string_view kWords[] = {
      "$",        "_",          "-",         "<clinit>",   "<init>",     "abstract",   "assert",
      "boolean",  "break",      "bridge",    "byte",       "case",       "catch",      "char",
      "class",    "const",      "constructor", "continue", "create",     "declared",   "default",
      "do",       "double",     "else",      "enum",       "execute",    "extends",    "false",
      "final",    "finally",    "float",     "for",        "get",        "goto",       "has",
      "if",       "implements", "import",    "instanceof", "int",        "interface",  "iterator",
      "long",     "native",     "new",       "next",       "null",       "on",         "package",
      "private",  "protected",  "public",    "return",     "run",        "set",        "short",
      "static",   "super",      "switch",    "synchronized", "synthetic", "this",      "throw",
      "throws",   "to",         "transient", "true",       "try",        "value",      "void",
      "volatile", "while",      "All",       "Button",     "Click",      "Down",       "Drawable",
      "Drop",     "From",       "Icon",      "Item",       "Layout",     "Menu",       "Next",
      "String",   "Title",      "To",        "Value",      "View"};
  StopwordTable table;
  for (auto w : kWords) {
    table.add(w);
  }
  return table;
}

void StopwordTable::add(std::string_view word) { entries_.insert(to_lower_ascii(word)); }

bool StopwordTable::contains(std::string_view word) const {
  return entries_.find(to_lower_ascii(word)) != entries_.end();
}

// ---------------------------------------------------------------------------
// File traversal

namespace {

template <typename Pred>
std::vector<fs::path> sorted_files(const fs::path& root, Pred accept) {
  if (!fs::is_directory(root)) throw Error("app directory does not exist: " + root.string());
  std::vector<std::pair<std::string, fs::path>> files;
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied);
       it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file()) continue;
    if (!accept(it->path())) continue;
    files.emplace_back(fs::relative(it->path(), root).generic_string(), it->path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<fs::path> out;
  out.reserve(files.size());
  for (auto& f : files) out.push_back(std::move(f.second));
  return out;
}

bool read_text_file(const fs::path& path, std::string& text) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const Error&) {
    return false;
  }
  return decode_text(bytes, text);
}

void warn_skip(const fs::path& path, std::string_view why) {
  std::cerr << "warning: skipping " << path.string() << ": " << why << '\n';
}

Words drop_single_chars(Words words) {
  std::erase_if(words, [](const std::string& w) { return w.size() <= 1; });
  return words;
}

std::string shell_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += '\'';
  return out;
}

bool is_executable(const fs::path& p) {
  std::error_code ec;
  return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Method names

std::string method_identifier_from_line(std::string_view line) {
  auto dir = line.find(".method");
  if (dir == std::string_view::npos) return {};
  auto paren = line.find('(', dir);
  if (paren == std::string_view::npos) return {};
  std::size_t end = paren;
  std::size_t begin = end;
  while (begin > dir + 7 && line[begin - 1] != ' ' && line[begin - 1] != '\t') --begin;
  return std::string(line.substr(begin, end - begin));
}

Words scan_smali_methods(const AppDirRef& app, ScanCounts* counts) {
  Words out;
  auto files = sorted_files(app.root_path, [](const fs::path& p) { return p.extension() == ".smali"; });
  for (const auto& path : files) {
    if (counts) ++counts->files;
    std::string text;
    if (!read_text_file(path, text)) {
      warn_skip(path, "cannot decode");
      if (counts) ++counts->skipped;
      continue;
    }
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      std::string_view line(text.data() + pos, (nl == std::string::npos ? text.size() : nl) - pos);
      std::string id = method_identifier_from_line(line);
      if (!id.empty()) out.push_back(std::move(id));
      if (nl == std::string::npos) break;
      pos = nl + 1;
    }
  }
  return out;
}

Words split_identifier(std::string_view identifier) {
  std::string cleaned;
  cleaned.reserve(identifier.size());
  for (char c : identifier) {
    if (c != '_') cleaned.push_back(c);
  }
  // Digits continue the current segment, so "utf8Decoder" splits after "utf8".
  Words out;
  std::string current;
  bool last_letter_lower = false;
  for (char c : cleaned) {
    bool upper = c >= 'A' && c <= 'Z';
    if (upper && last_letter_lower && !current.empty()) {
      out.push_back(to_lower_ascii(current));
      current.clear();
    }
    current.push_back(c);
    if (is_ascii_alpha(c)) {
      last_letter_lower = !upper;
    } else if (c < '0' || c > '9') {
      last_letter_lower = false;
    }
  }
  if (!current.empty()) out.push_back(to_lower_ascii(current));
  return out;
}

Words strip_code_stopwords(const Words& words, const StopwordTable& table) {
  Words out;
  out.reserve(words.size());
  for (const auto& w : words) {
    if (w.size() <= 1 || table.contains(w)) continue;
    out.push_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// XML string values

std::vector<std::string> xml_value_captures(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = text.find('>');
  while (pos != std::string_view::npos) {
    std::size_t next = text.find('>', pos + 1);
    std::size_t limit = next == std::string_view::npos ? text.size() : next;
    std::string_view span = text.substr(pos + 1, limit - pos - 1);
    auto close = span.rfind("</");
    if (close != std::string_view::npos) out.emplace_back(span.substr(0, close));
    pos = next;
  }
  return out;
}

Words xml_string_keys(std::string_view text) {
  static const std::regex kName(R"re(<string\b[^>]*?\bname\s*=\s*"([^"]*)")re");
  Words out;
  std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kName); it != std::sregex_iterator(); ++it) {
    out.push_back((*it)[1].str());
  }
  return out;
}

Words scan_xml_strings(const AppDirRef& app, ScanCounts* counts, Words* keys) {
  Words out;
  auto files =
      sorted_files(app.root_path, [](const fs::path& p) { return p.filename() == "strings.xml"; });
  for (const auto& path : files) {
    if (counts) ++counts->files;
    std::string text;
    if (!read_text_file(path, text)) {
      warn_skip(path, "cannot decode");
      if (counts) ++counts->skipped;
      continue;
    }
    for (const auto& capture : xml_value_captures(text)) {
      for (auto& w : split_whitespace(capture)) {
        if (w.size() > 1) out.push_back(std::move(w));
      }
    }
    if (keys) {
      auto k = xml_string_keys(text);
      keys->insert(keys->end(), k.begin(), k.end());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Image text

bool is_image_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  unsigned char h[12] = {};
  in.read(reinterpret_cast<char*>(h), sizeof(h));
  auto n = in.gcount();
  if (n >= 8 && h[0] == 0x89 && h[1] == 'P' && h[2] == 'N' && h[3] == 'G' && h[4] == 0x0D &&
      h[5] == 0x0A && h[6] == 0x1A && h[7] == 0x0A) {
    return true;
  }
  if (n >= 3 && h[0] == 0xFF && h[1] == 0xD8 && h[2] == 0xFF) return true;
  if (n >= 6 && h[0] == 'G' && h[1] == 'I' && h[2] == 'F' && h[3] == '8' && (h[4] == '7' || h[4] == '9') &&
      h[5] == 'a') {
    return true;
  }
  if (n >= 2 && h[0] == 'B' && h[1] == 'M') return true;
  if (n >= 12 && h[0] == 'R' && h[1] == 'I' && h[2] == 'F' && h[3] == 'F' && h[8] == 'W' && h[9] == 'E' &&
      h[10] == 'B' && h[11] == 'P') {
    return true;
  }
  return false;
}

bool SidecarOcr::extract(const fs::path& image, std::string& text) const {
  fs::path sidecar = image;
  sidecar += ".txt";
  text.clear();
  if (!fs::is_regular_file(sidecar)) return true;
  return read_text_file(sidecar, text);
}

CommandOcr::CommandOcr(std::string command) : command_(std::move(command)) {
  if (command_.empty()) throw Error("OCR command adapter selected but no command configured");
  bool found = false;
  if (command_.find('/') != std::string::npos) {
    found = is_executable(command_);
  } else if (const char* path = std::getenv("PATH")) {
    for (const auto& dir : split_char(path, ':')) {
      if (!dir.empty() && is_executable(fs::path(dir) / command_)) {
        found = true;
        break;
      }
    }
  }
  if (!found) throw Error("OCR command not found or not executable: " + command_);
}

bool CommandOcr::extract(const fs::path& image, std::string& text) const {
  std::string cmd = shell_quote(command_) + " " + shell_quote(image.string()) + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return false;
  std::string bytes;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) bytes.append(buf, n);
  int status = ::pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) return false;
  return decode_text(bytes, text);
}

std::unique_ptr<OcrAdapter> make_ocr_adapter(std::string_view kind, const std::string& command) {
  if (kind == "sidecar") return std::make_unique<SidecarOcr>();
  if (kind == "command") return std::make_unique<CommandOcr>(command);
  throw Error("unknown OCR adapter '" + std::string(kind) + "' (expected sidecar or command)");
}

Words scan_gui_text(const AppDirRef& app, const OcrAdapter& ocr, ScanCounts* counts) {
  Words out;
  auto files = sorted_files(app.root_path, [](const fs::path& p) { return is_image_file(p); });
  for (const auto& path : files) {
    if (counts) ++counts->files;
    std::string text;
    if (!ocr.extract(path, text)) {
      warn_skip(path, "OCR adapter failed");
      if (counts) ++counts->skipped;
      continue;
    }
    for (auto& w : split_whitespace(text)) {
      if (w.size() > 1) out.push_back(std::move(w));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

RawAppFeatures assemble_record(const AppDirRef& app, const Words& methods, const Words& xml,
                               const Words& gui, const StopwordTable& table) {
  RawAppFeatures rec;
  rec.sha256 = app.sha256;
  rec.package_id = app.package_id;
  rec.method_identifiers = methods;
  Words split;
  for (const auto& m : methods) {
    auto parts = split_identifier(m);
    split.insert(split.end(), std::make_move_iterator(parts.begin()), std::make_move_iterator(parts.end()));
  }
  rec.method_words = strip_code_stopwords(split, table);
  for (const auto& w : xml) rec.xml_words.push_back(to_lower_ascii(w));
  for (const auto& w : gui) rec.gui_words.push_back(to_lower_ascii(w));
  rec.xml_words = drop_single_chars(std::move(rec.xml_words));
  rec.gui_words = drop_single_chars(std::move(rec.gui_words));
  return rec;
}

RawAppFeatures extract_app(const AppDirRef& app, const OcrAdapter& ocr, const StopwordTable& table) {
  ScanCounts smali, xml, images;
  Words keys;
  auto methods = scan_smali_methods(app, &smali);
  auto xml_words = scan_xml_strings(app, &xml, &keys);
  auto gui_words = scan_gui_text(app, ocr, &images);
  RawAppFeatures rec = assemble_record(app, methods, xml_words, gui_words, table);
  rec.xml_keys = std::move(keys);
  rec.smali_file_count = smali.files;
  rec.xml_file_count = xml.files;
  rec.image_file_count = images.files;
  rec.skipped_file_count = smali.skipped + xml.skipped + images.skipped;
  return rec;
}

}  // namespace apptopics

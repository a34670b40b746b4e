#include "corpus_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace fs = std::filesystem;

namespace traitlab {

namespace {

bool has_ext(const fs::path& p, const char* ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

std::string file_name_of(const std::string& path) {
  return fs::path(path).filename().string();
}

void load_txt(const std::string& path, std::vector<CorpusDoc>& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  out.push_back({file_name_of(path), buf.str()});
}

void load_jsonl(const std::string& path, std::vector<CorpusDoc>& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text") ||
        !j["text"].is_string()) {
      fail(errc::bad_data,
           path + ":" + std::to_string(lineno) + ": expected {\"text\": ...}");
    }
    out.push_back({file_name_of(path) + ":" + std::to_string(lineno),
                   j["text"].get<std::string>()});
  }
}

}  // namespace

std::vector<CorpusDoc> load_corpus_file(const std::string& path) {
  std::vector<CorpusDoc> out;
  fs::path p(path);
  if (has_ext(p, ".jsonl")) {
    load_jsonl(path, out);
  } else {
    load_txt(path, out);
  }
  return out;
}

std::vector<CorpusDoc> load_corpus_dir(const std::string& dir) {
  std::error_code ec;
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    if (has_ext(entry.path(), ".txt") || has_ext(entry.path(), ".jsonl")) {
      files.push_back(entry.path().string());
    }
  }
  if (ec) fail(errc::io, "cannot read directory " + dir);
  std::sort(files.begin(), files.end());
  std::vector<CorpusDoc> out;
  for (const auto& f : files) {
    auto docs = load_corpus_file(f);
    out.insert(out.end(), std::make_move_iterator(docs.begin()),
               std::make_move_iterator(docs.end()));
  }
  return out;
}

std::vector<CorpusDoc> load_corpus_path(const std::string& path) {
  std::error_code ec;
  if (fs::is_directory(path, ec)) return load_corpus_dir(path);
  if (!fs::exists(path, ec)) fail(errc::io, "no such path: " + path);
  return load_corpus_file(path);
}

}  // namespace traitlab

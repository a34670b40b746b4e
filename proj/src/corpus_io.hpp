#pragma once

#include <string>
#include <vector>

namespace traitlab {

struct CorpusDoc {
  std::string source;  // file name, or file:line for json-lines
  std::string text;
};

// One document per .txt file; one per line for .jsonl files, where each
// line is an object with a "text" field. Other extensions are ignored.
// Files are visited in sorted name order so corpus ids are stable.
std::vector<CorpusDoc> load_corpus_file(const std::string& path);
std::vector<CorpusDoc> load_corpus_dir(const std::string& dir);

// Either of the above depending on whether path is a directory.
std::vector<CorpusDoc> load_corpus_path(const std::string& path);

}  // namespace traitlab

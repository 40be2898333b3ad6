#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace guardkit {

/// Counts sentences: a whitespace-delimited word ending in '.', '!' or '?'
/// (optionally followed by closing quotes/brackets) ends a sentence unless it
/// is a listed abbreviation. A trailing unterminated fragment counts as one
/// sentence when it has at least three words.
class SentenceCounter {
 public:
  SentenceCounter();
  explicit SentenceCounter(std::vector<std::string> abbreviations);

  int count(std::string_view text) const;

  const std::vector<std::string>& abbreviations() const noexcept { return abbreviations_; }

 private:
  bool is_abbreviation(std::string_view word) const;

  std::vector<std::string> abbreviations_;  // lowercase, with trailing dot
};

const std::vector<std::string>& default_abbreviations();

int count_sentences(std::string_view text);

}  // namespace guardkit

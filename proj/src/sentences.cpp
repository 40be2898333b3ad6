#include "guardkit/sentences.hpp"

#include <algorithm>

#include "guardkit/text.hpp"

namespace guardkit {

namespace {

constexpr std::string_view kClosers = "\"')]}*";
constexpr std::string_view kOpeners = "\"'([{*";
constexpr int kMinFragmentWords = 3;

bool ends_sentence(std::string_view word) {
  while (!word.empty() && kClosers.find(word.back()) != std::string_view::npos) word.remove_suffix(1);
  if (word.empty()) return false;
  const char c = word.back();
  return c == '.' || c == '!' || c == '?';
}

}  // namespace

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> kDefault{"e.g.", "i.e.", "etc.", "mr.", "mrs.", "ms.",
                                                 "dr.",  "vs.",  "prof.", "st.", "cf."};
  return kDefault;
}

SentenceCounter::SentenceCounter() : SentenceCounter(default_abbreviations()) {}

SentenceCounter::SentenceCounter(std::vector<std::string> abbreviations) {
  for (auto& a : abbreviations) abbreviations_.push_back(text::to_lower(a));
}

bool SentenceCounter::is_abbreviation(std::string_view word) const {
  while (!word.empty() && kOpeners.find(word.front()) != std::string_view::npos) word.remove_prefix(1);
  while (!word.empty() && kClosers.find(word.back()) != std::string_view::npos) word.remove_suffix(1);
  const std::string lowered = text::to_lower(word);
  return std::find(abbreviations_.begin(), abbreviations_.end(), lowered) != abbreviations_.end();
}

int SentenceCounter::count(std::string_view text) const {
  int sentences = 0;
  int open_words = 0;
  for (auto word : text::split_whitespace(text)) {
    ++open_words;
    if (ends_sentence(word) && !is_abbreviation(word)) {
      ++sentences;
      open_words = 0;
    }
  }
  if (open_words >= kMinFragmentWords) ++sentences;
  return sentences;
}

int count_sentences(std::string_view text) {
  static const SentenceCounter counter;
  return counter.count(text);
}

}  // namespace guardkit

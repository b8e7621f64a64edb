// Copyright 2026 The LAQG Bench Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "laqg/metrics/porter.hpp"

#include <array>
#include <utility>

namespace laqg::metrics {

namespace {

class Stemmer {
 public:
  explicit Stemmer(std::string_view w) : b_(w) {}

  std::string run() {
    if (b_.size() <= 2) return b_;
    for (char c : b_)
      if (c < 'a' || c > 'z') return b_;
    step1ab();
    step1c();
    step2();
    step3();
    step4();
    step5();
    return b_;
  }

 private:
  // b_[0..k_] is the current word; j_ marks the stem end during tests.
  bool cons(std::size_t i) const {
    switch (b_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  /// Number of VC sequences in b_[0..j_).
  int measure() const {
    int n = 0;
    std::size_t i = 0;
    while (true) {
      if (i >= j_) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i >= j_) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i >= j_) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (std::size_t i = 0; i < j_; ++i)
      if (!cons(i)) return true;
    return false;
  }

  bool double_cons(std::size_t end) const {
    if (end < 1) return false;
    return b_[end] == b_[end - 1] && cons(end);
  }

  /// cvc at i-2, i-1, i where the final c is not w, x or y.
  bool cvc(std::size_t i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    const char ch = b_[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(std::string_view s) {
    if (s.size() > b_.size()) return false;
    if (b_.compare(b_.size() - s.size(), s.size(), s) != 0) return false;
    j_ = b_.size() - s.size();
    return true;
  }

  void set_to(std::string_view s) {
    b_.resize(j_);
    b_ += s;
  }

  void replace_if_m(std::string_view s) {
    if (measure() > 0) set_to(s);
  }

  void step1ab() {
    if (b_.back() == 's') {
      if (ends("sses")) {
        b_.resize(b_.size() - 2);
      } else if (ends("ies")) {
        set_to("i");
      } else if (b_.size() >= 2 && b_[b_.size() - 2] != 's') {
        b_.pop_back();
      }
    }
    if (ends("eed")) {
      if (measure() > 0) b_.pop_back();
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      b_.resize(j_);
      j_ = b_.size();
      if (ends("at")) {
        set_to("ate");
      } else if (ends("bl")) {
        set_to("ble");
      } else if (ends("iz")) {
        set_to("ize");
      } else if (double_cons(b_.size() - 1)) {
        const char ch = b_.back();
        if (ch != 'l' && ch != 's' && ch != 'z') b_.pop_back();
      } else {
        j_ = b_.size();
        if (measure() == 1 && cvc(b_.size() - 1)) b_ += 'e';
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) b_.back() = 'i';
  }

  void step2() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 20> rules{{
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},
        {"izer", "ize"},    {"bli", "ble"},     {"alli", "al"},    {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},  {"biliti", "ble"},
    }};
    for (const auto& [suffix, repl] : rules) {
      if (ends(suffix)) {
        replace_if_m(repl);
        return;
      }
    }
    if (ends("logi")) replace_if_m("log");
  }

  void step3() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> rules{{
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    }};
    for (const auto& [suffix, repl] : rules) {
      if (ends(suffix)) {
        replace_if_m(repl);
        return;
      }
    }
  }

  void step4() {
    static constexpr std::array<std::string_view, 19> suffixes{
        "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
        "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
    // Longest match first within shared endings (ement before ment before ent).
    for (std::string_view s : suffixes) {
      if (!ends(s)) continue;
      if (s == "ion" && !(j_ > 0 && (b_[j_ - 1] == 's' || b_[j_ - 1] == 't'))) return;
      if (measure() > 1) b_.resize(j_);
      return;
    }
  }

  void step5() {
    j_ = b_.size() - 1;
    if (b_.back() == 'e') {
      const int m = measure();
      if (m > 1 || (m == 1 && !cvc(b_.size() - 2))) b_.pop_back();
    }
    j_ = b_.size();
    if (b_.size() >= 2 && b_.back() == 'l' && double_cons(b_.size() - 1) && measure() > 1) b_.pop_back();
  }

  std::string b_;
  std::size_t j_ = 0;
};

}  // namespace

std::string porter_stem(std::string_view word) { return Stemmer(word).run(); }

}  // namespace laqg::metrics

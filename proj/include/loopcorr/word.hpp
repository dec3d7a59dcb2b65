#pragma once

#include <string>
#include <vector>

#include "loopcorr/algebra.hpp"

namespace loopcorr {

struct WordItem {
  Current current = Current::J3;
  int label = 1;
  double radius = 1.0;  // 1 puts the insertion on the circle
  bool operator==(const WordItem&) const = default;
};

struct CurrentWord {
  std::vector<WordItem> items;

  bool empty() const { return items.empty(); }
  size_t size() const { return items.size(); }
  // realization shared by every current; throws RealizationMismatch on mixed words
  Realization realization(Realization fallback = Realization::K) const;
  void validate() const;
  bool operator==(const CurrentWord&) const = default;
};

// Grammar: SYM '(' INDEX ')' separated by blanks, SYM in J3 Jp Jm E F H.
// ParseError offsets are 1-based byte columns.
CurrentWord parse_word(const std::string& text);
std::string render_word(const CurrentWord& w);

CurrentWord concat(const CurrentWord& a, const CurrentWord& b);
// Reverses the order and replaces each current by its star partner (J+ <-> J-).
// The sign of the star is returned through `sign` as (-1)^length.
CurrentWord star_word(const CurrentWord& w, int* sign = nullptr);

}  // namespace loopcorr

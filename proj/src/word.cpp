#include "loopcorr/word.hpp"

#include <cctype>
#include <set>

#include "loopcorr/error.hpp"

namespace loopcorr {

Realization CurrentWord::realization(Realization fallback) const {
  if (items.empty()) return fallback;
  Realization r = current_realization(items.front().current);
  for (auto& it : items)
    if (current_realization(it.current) != r)
      throw Error(ErrorCode::RealizationMismatch, "word mixes J-currents with E/F/H currents");
  return r;
}

void CurrentWord::validate() const {
  realization();
  std::set<int> seen;
  for (auto& it : items) {
    if (!seen.insert(it.label).second)
      throw Error(ErrorCode::InvalidArgument, "insertion index " + std::to_string(it.label) + " used twice");
    if (!(it.radius > 0 && it.radius <= 1)) throw Error(ErrorCode::InvalidArgument, "radius must lie in (0,1]");
  }
}

CurrentWord parse_word(const std::string& text) {
  CurrentWord w;
  size_t i = 0;
  const size_t n = text.size();
  auto fail = [&](size_t at, const std::string& what) -> Error {
    return Error(ErrorCode::ParseError, "expected " + what + " at column " + std::to_string(at + 1),
                 static_cast<long>(at + 1));
  };
  auto skip = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  std::set<int> seen;
  skip();
  while (i < n) {
    Current c;
    if (text.compare(i, 2, "J3") == 0) {
      c = Current::J3, i += 2;
    } else if (text.compare(i, 2, "Jp") == 0) {
      c = Current::Jp, i += 2;
    } else if (text.compare(i, 2, "Jm") == 0) {
      c = Current::Jm, i += 2;
    } else if (text[i] == 'E') {
      c = Current::E, ++i;
    } else if (text[i] == 'F') {
      c = Current::F, ++i;
    } else if (text[i] == 'H') {
      c = Current::H, ++i;
    } else {
      throw fail(i, "one of J3 Jp Jm E F H");
    }
    if (i >= n || text[i] != '(') throw fail(i, "'('");
    ++i;
    size_t start = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) throw fail(i, "insertion index");
    if (i - start > 6) throw fail(start, "insertion index below 10^6");
    int label = std::stoi(text.substr(start, i - start));
    if (i >= n || text[i] != ')') throw fail(i, "')'");
    ++i;
    if (!seen.insert(label).second) throw fail(start, "an index not used before");
    w.items.push_back({c, label, 1.0});
    if (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) throw fail(i, "blank between currents");
    skip();
  }
  w.realization();
  return w;
}

std::string render_word(const CurrentWord& w) {
  std::string s;
  for (auto& it : w.items) {
    if (!s.empty()) s += ' ';
    s += current_token(it.current);
    s += '(' + std::to_string(it.label) + ')';
  }
  return s;
}

CurrentWord concat(const CurrentWord& a, const CurrentWord& b) {
  CurrentWord w = a;
  w.items.insert(w.items.end(), b.items.begin(), b.items.end());
  return w;
}

CurrentWord star_word(const CurrentWord& w, int* sign) {
  CurrentWord s;
  for (auto it = w.items.rbegin(); it != w.items.rend(); ++it) {
    WordItem x = *it;
    if (x.current == Current::Jp)
      x.current = Current::Jm;
    else if (x.current == Current::Jm)
      x.current = Current::Jp;
    s.items.push_back(x);
  }
  if (sign) *sign = (w.items.size() % 2) ? -1 : 1;
  return s;
}

}  // namespace loopcorr

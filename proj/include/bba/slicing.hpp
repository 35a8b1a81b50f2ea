/*
 * Copyright 2026 The bbastar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <regex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bba/errors.hpp"
#include "bba/lts.hpp"

namespace bba {

/// A compiled set of full-match ECMAScript regexes over canonical label
/// text. Match results are memoized per distinct text, so matching whole
/// transition relations costs one regex run per distinct label.
class LabelPatternSet {
 public:
  explicit LabelPatternSet(const std::vector<std::string>& patterns) {
    for (const std::string& p : patterns) {
      try {
        regexes_.emplace_back(p, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw ConfigError("bad label pattern '" + p + "': " + e.what());
      }
      sources_.push_back(p);
    }
  }

  bool empty() const { return regexes_.empty(); }
  const std::vector<std::string>& sources() const { return sources_; }

  bool matches(const std::string& text) const {
    auto it = memo_.find(text);
    if (it != memo_.end()) return it->second;
    bool hit = false;
    for (const std::regex& re : regexes_) {
      if (std::regex_match(text, re)) {
        hit = true;
        break;
      }
    }
    memo_.emplace(text, hit);
    return hit;
  }

 private:
  std::vector<std::regex> regexes_;
  std::vector<std::string> sources_;
  mutable std::unordered_map<std::string, bool> memo_;
};

/// Replaces every transition whose canonical label text fully matches one of
/// the patterns with a tau transition. State and transition counts are
/// preserved; an empty pattern list is the identity.
inline Lts hide(const Lts& l, const std::vector<std::string>& patterns) {
  LabelPatternSet set(patterns);
  std::vector<Transition> out;
  out.reserve(l.transitions().size());
  for (const Transition& t : l.transitions()) {
    if (!t.label.is_tau() && set.matches(format_label(t.label)))
      out.push_back(Transition{t.src, Label::tau(), t.dst});
    else
      out.push_back(t);
  }
  return Lts(l.state_count(), l.initial(), std::move(out));
}

/// Dual of hide: labels matching one of the patterns stay visible, all other
/// visible labels become tau.
inline Lts keep(const Lts& l, const std::vector<std::string>& patterns) {
  LabelPatternSet set(patterns);
  std::vector<Transition> out;
  out.reserve(l.transitions().size());
  for (const Transition& t : l.transitions()) {
    if (!t.label.is_tau() && !set.matches(format_label(t.label)))
      out.push_back(Transition{t.src, Label::tau(), t.dst});
    else
      out.push_back(t);
  }
  return Lts(l.state_count(), l.initial(), std::move(out));
}

struct RenameRule {
  std::string pattern;   // full-match ECMAScript regex
  std::string replacement;  // may reference captures as $1, $2, ...
};

/// Rewrites labels through the first rule whose pattern fully matches the
/// canonical text; the replacement (with $N capture references) is re-parsed
/// as a label. Unmatched labels pass through. Throws RenameError, naming the
/// transition, when a rewrite does not parse.
inline Lts rename(const Lts& l, const std::vector<RenameRule>& rules) {
  std::vector<std::regex> regexes;
  regexes.reserve(rules.size());
  for (const RenameRule& r : rules) {
    try {
      regexes.emplace_back(r.pattern, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw ConfigError("bad rename pattern '" + r.pattern + "': " + e.what());
    }
  }
  // Rewrites depend only on label text; memoize per distinct text.
  std::unordered_map<std::string, Label> memo;
  std::vector<Transition> out;
  out.reserve(l.transitions().size());
  for (std::size_t i = 0; i < l.transitions().size(); ++i) {
    const Transition& t = l.transitions()[i];
    std::string text = format_label(t.label);
    auto it = memo.find(text);
    if (it == memo.end()) {
      Label renamed = t.label;
      for (std::size_t r = 0; r < rules.size(); ++r) {
        std::smatch m;
        if (std::regex_match(text, m, regexes[r])) {
          std::string rewritten = m.format(rules[r].replacement);
          try {
            renamed = rewritten == "i" ? Label::tau() : parse_label(rewritten);
          } catch (const ParseError& e) {
            throw RenameError(
                "transition #" + std::to_string(i) + " (" +
                std::to_string(t.src) + ", \"" + text + "\", " +
                std::to_string(t.dst) + "): rule '" + rules[r].pattern +
                "' produced unparsable label '" + rewritten + "': " + e.what());
          }
          break;
        }
      }
      it = memo.emplace(text, std::move(renamed)).first;
    }
    out.push_back(Transition{t.src, it->second, t.dst});
  }
  return Lts(l.state_count(), l.initial(), std::move(out));
}

}  // namespace bba

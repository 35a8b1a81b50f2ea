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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bba {

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed textual input (label or .aut). Carries the byte offset of the
/// first offending character when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  explicit ParseError(const std::string& what)
      : Error(what), offset_(0) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Filesystem-level failure (missing file, short write, ...).
class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or malformed config document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Statically detectable defect in a process network (unknown gate, call not
/// in tail position, read of a possibly-unassigned variable, ...).
class NetworkError : public Error {
 public:
  using Error::Error;
};

/// A rename rule produced text that does not parse back into a label.
class RenameError : public Error {
 public:
  using Error::Error;
};

/// State-space exploration hit a resource limit. Partial progress numbers are
/// attached so callers can report how far the run got.
class LimitError : public Error {
 public:
  LimitError(const std::string& what, std::uint64_t states_seen,
             std::uint64_t frontier_size, double seconds)
      : Error(what + " (" + std::to_string(states_seen) + " states, frontier " +
              std::to_string(frontier_size) + ", " + std::to_string(seconds) +
              "s)"),
        states_seen_(states_seen),
        frontier_size_(frontier_size),
        seconds_(seconds) {}

  std::uint64_t states_seen() const { return states_seen_; }
  std::uint64_t frontier_size() const { return frontier_size_; }
  double seconds() const { return seconds_; }

 private:
  std::uint64_t states_seen_;
  std::uint64_t frontier_size_;
  double seconds_;
};

/// Broken internal invariant; indicates a bug, not bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace bba

// Copyright 2026 The nfst Authors.
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

#ifndef NFST_COMMON_H_
#define NFST_COMMON_H_

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nfst {

using Label = int;
using StateId = int;
using LabelString = std::vector<Label>;

inline constexpr StateId kNoState = -1;

enum class ErrorKind {
  kCyclicMachine,
  kLimitExceeded,
  kAmbiguousMarks,
  kEmptyLanguage,
  kUnsupported,
  kAlphabetMismatch,
  kShapeMismatch,
  kInvalidPath,
  kUnknownSymbol,
  kParse,
  kDigestMismatch,
  kIo,
  kDegenerate,
};

const char* error_kind_name(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what),
        kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Dense id <-> name map. Ids are assigned in insertion order.
class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(std::vector<std::string> names);

  Label add(std::string_view name);
  // Returns kNoState-like -1 when absent.
  Label find(std::string_view name) const;
  Label at(std::string_view name) const;  // throws kUnknownSymbol
  const std::string& name(Label id) const { return names_.at(id); }
  int size() const { return static_cast<int>(names_.size()); }
  bool contains(Label id) const { return id >= 0 && id < size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const SymbolTable& other) const {
    return names_ == other.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Label> index_;
};

// Space-separated rendering of a label string; "" for empty.
std::string join_labels(const SymbolTable& table, std::span<const Label> s,
                        std::string_view sep = " ");
// Inverse of join_labels on whitespace-separated tokens.
LabelString parse_labels(const SymbolTable& table, std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);
std::vector<std::string> split_ws(std::string_view text);

// mt19937_64 has a fixed output sequence across standard libraries; the
// distributions below are hand-rolled so draws are reproducible too.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);
  int uniform_int(int lo, int hi);  // inclusive
  bool bernoulli(double p) { return uniform() < p; }
  // Independent stream derived from (seed, index).
  Rng split(std::uint64_t index) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a, used for content digests and cache keys.
class Fnv1a {
 public:
  void update(std::string_view bytes);
  void update(const void* data, std::size_t n);
  std::uint64_t value() const { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string hex_digest(std::string_view bytes);

// Numerically stable log(sum(exp(v))). Returns -inf for empty input.
double log_sum_exp(std::span<const double> v);

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace nfst

#endif  // NFST_COMMON_H_

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

#include "nfst/common.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace nfst {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kCyclicMachine: return "CyclicMachine";
    case ErrorKind::kLimitExceeded: return "LimitExceeded";
    case ErrorKind::kAmbiguousMarks: return "AmbiguousMarks";
    case ErrorKind::kEmptyLanguage: return "EmptyLanguage";
    case ErrorKind::kUnsupported: return "Unsupported";
    case ErrorKind::kAlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kInvalidPath: return "InvalidPath";
    case ErrorKind::kUnknownSymbol: return "UnknownSymbol";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kDigestMismatch: return "DigestMismatch";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kDegenerate: return "Degenerate";
  }
  return "Error";
}

SymbolTable::SymbolTable(std::vector<std::string> names) {
  for (auto& n : names) add(n);
}

Label SymbolTable::add(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  const Label id = size();
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

Label SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

Label SymbolTable::at(std::string_view name) const {
  const Label id = find(name);
  if (id < 0) {
    throw Error(ErrorKind::kUnknownSymbol, "'" + std::string(name) + "'");
  }
  return id;
}

std::string join_labels(const SymbolTable& table, std::span<const Label> s,
                        std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += sep;
    out += table.name(s[i]);
  }
  return out;
}

LabelString parse_labels(const SymbolTable& table, std::string_view text) {
  LabelString out;
  for (const auto& tok : split_ws(text)) out.push_back(table.at(tok));
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      return out;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' ||
                               text[i] == '\r' || text[i] == '\n')) {
      ++i;
    }
    std::size_t j = i;
    while (j < text.size() && !(text[j] == ' ' || text[j] == '\t' ||
                                text[j] == '\r' || text[j] == '\n')) {
      ++j;
    }
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  while (true) {
    const std::uint64_t r = engine_();
    if (r < limit) return r % n;
  }
}

int Rng::uniform_int(int lo, int hi) {
  return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

Rng Rng::split(std::uint64_t index) const {
  return Rng(splitmix64(seed_ ^ splitmix64(index + 0x9e3779b97f4a7c15ULL)));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void Fnv1a::update(std::string_view bytes) { update(bytes.data(), bytes.size()); }

void Fnv1a::update(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= p[i];
    h_ *= 0x100000001b3ULL;
  }
}

std::string Fnv1a::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h_));
  return buf;
}

std::string hex_digest(std::string_view bytes) {
  Fnv1a h;
  h.update(bytes);
  return h.hex();
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return kNegInf;
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace nfst

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

#ifndef NFST_CONFIG_H_
#define NFST_CONFIG_H_

#include <iosfwd>
#include <map>
#include <string>

namespace nfst {

using KeyValues = std::map<std::string, std::string>;

// key=value lines; blank lines and '#' comments are skipped. Throws kParse
// with the line number on malformed input.
KeyValues read_key_values(std::istream& is);
KeyValues load_key_values(const std::string& path);
void write_key_values(std::ostream& os, const KeyValues& kv);

// Entries whose key starts with `prefix`, with the prefix removed.
KeyValues with_prefix(const KeyValues& kv, const std::string& prefix);
// Entries whose key has no '.'.
KeyValues top_level(const KeyValues& kv);

}  // namespace nfst

#endif  // NFST_CONFIG_H_

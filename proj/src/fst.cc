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

#include "nfst/fst.h"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <sstream>
#include <tuple>

namespace nfst {
namespace {

void check_string(const SymbolTable& table, const LabelString& s,
                  const char* tape) {
  for (Label l : s) {
    if (!table.contains(l)) {
      throw Error(ErrorKind::kUnknownSymbol,
                  std::string("label ") + std::to_string(l) + " on " + tape +
                      " tape");
    }
  }
}

bool matches_at(std::span<const Label> s, std::size_t pos,
                const LabelString& sub) {
  if (pos + sub.size() > s.size()) return false;
  return std::equal(sub.begin(), sub.end(), s.begin() + pos);
}

}  // namespace

Mfst::Mfst(SymbolTable input, SymbolTable output, SymbolTable marks)
    : input_(std::move(input)),
      output_(std::move(output)),
      marks_(std::move(marks)) {}

StateId Mfst::add_state() {
  out_.emplace_back();
  final_.push_back(false);
  return num_states() - 1;
}

void Mfst::add_states(int n) {
  for (int i = 0; i < n; ++i) add_state();
}

int Mfst::add_arc(MfstArc arc) {
  if (arc.src < 0 || arc.src >= num_states() || arc.dst < 0 ||
      arc.dst >= num_states()) {
    throw Error(ErrorKind::kShapeMismatch, "arc endpoint out of range");
  }
  check_string(input_, arc.input, "input");
  check_string(output_, arc.output, "output");
  check_string(marks_, arc.marks, "mark");
  out_[arc.src].push_back(num_arcs());
  arcs_.push_back(std::move(arc));
  return num_arcs() - 1;
}

int Mfst::add_arc(StateId src, LabelString in, LabelString out,
                  LabelString marks, StateId dst) {
  return add_arc(MfstArc{src, std::move(in), std::move(out), std::move(marks),
                         dst});
}

void Mfst::set_initial(StateId s) {
  if (s < 0 || s >= num_states()) {
    throw Error(ErrorKind::kShapeMismatch, "initial state out of range");
  }
  initial_ = s;
}

void Mfst::set_final(StateId s, bool final) { final_.at(s) = final; }

std::vector<StateId> Mfst::finals() const {
  std::vector<StateId> f;
  for (StateId s = 0; s < num_states(); ++s) {
    if (final_[s]) f.push_back(s);
  }
  return f;
}

bool Mfst::operator==(const Mfst& other) const {
  return input_ == other.input_ && output_ == other.output_ &&
         marks_ == other.marks_ && arcs_ == other.arcs_ &&
         final_ == other.final_ && initial_ == other.initial_ &&
         num_states() == other.num_states();
}

ComposedPair compose_with_pair(const Mfst& t, std::span<const Label> x,
                               std::span<const Label> y) {
  ComposedPair raw;
  raw.fst = Mfst(t.input_symbols(), t.output_symbols(), t.mark_symbols());
  if (t.empty()) return raw;

  const int nx = static_cast<int>(x.size());
  const int ny = static_cast<int>(y.size());
  auto key = [&](const GridState& g) {
    return (static_cast<std::int64_t>(g.q) * (nx + 1) + g.i) * (ny + 1) + g.j;
  };
  std::unordered_map<std::int64_t, StateId> ids;
  std::deque<StateId> queue;
  auto intern = [&](const GridState& g) {
    auto [it, inserted] = ids.emplace(key(g), raw.fst.num_states());
    if (inserted) {
      raw.fst.add_state();
      raw.coords.push_back(g);
      queue.push_back(it->second);
    }
    return it->second;
  };
  raw.fst.set_initial(intern({0, t.initial(), 0}));
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    const GridState g = raw.coords[s];
    if (g.i == nx && g.j == ny && t.is_final(g.q)) raw.fst.set_final(s);
    for (int a : t.out_arcs(g.q)) {
      const MfstArc& arc = t.arc(a);
      if (!matches_at(x, g.i, arc.input) || !matches_at(y, g.j, arc.output)) {
        continue;
      }
      const StateId d =
          intern({g.i + static_cast<int>(arc.input.size()), arc.dst,
                  g.j + static_cast<int>(arc.output.size())});
      raw.fst.add_arc(s, arc.input, arc.output, arc.marks, d);
    }
  }

  std::vector<StateId> kept;
  ComposedPair out;
  out.fst = trim(raw.fst, &kept);
  out.coords.reserve(kept.size());
  for (StateId old : kept) out.coords.push_back(raw.coords[old]);
  return out;
}

Mfst normalize_arcs(const Mfst& m) {
  Mfst out(m.input_symbols(), m.output_symbols(), m.mark_symbols());
  out.add_states(m.num_states());
  if (m.initial() != kNoState) out.set_initial(m.initial());
  for (StateId s = 0; s < m.num_states(); ++s) out.set_final(s, m.is_final(s));
  for (const MfstArc& arc : m.arcs()) {
    const std::size_t len = std::max(arc.input.size(), arc.output.size());
    if (len <= 1) {
      out.add_arc(arc);
      continue;
    }
    StateId prev = arc.src;
    for (std::size_t k = 0; k < len; ++k) {
      const StateId next = (k + 1 == len) ? arc.dst : out.add_state();
      LabelString in, o, marks;
      if (k < arc.input.size()) in.push_back(arc.input[k]);
      if (k < arc.output.size()) o.push_back(arc.output[k]);
      if (k == 0) marks = arc.marks;
      out.add_arc(prev, std::move(in), std::move(o), std::move(marks), next);
      prev = next;
    }
  }
  return out;
}

Mfst compose_mfst(const Mfst& a_in, const Mfst& b_in) {
  if (!(a_in.output_symbols() == b_in.input_symbols())) {
    throw Error(ErrorKind::kAlphabetMismatch,
                "output alphabet of A differs from input alphabet of B");
  }
  // Marks of the result: A's marks then B's marks not already present.
  SymbolTable marks = a_in.mark_symbols();
  std::vector<Label> b_mark_map;
  for (const auto& name : b_in.mark_symbols().names()) {
    b_mark_map.push_back(marks.add(name));
  }
  Mfst raw(a_in.input_symbols(), b_in.output_symbols(), marks);
  if (a_in.empty() || b_in.empty()) return raw;

  const Mfst a = normalize_arcs(a_in);
  const Mfst b = normalize_arcs(b_in);
  auto remap_b = [&](const LabelString& ms) {
    LabelString out;
    for (Label l : ms) out.push_back(b_mark_map[l]);
    return out;
  };
  auto concat = [](LabelString lhs, const LabelString& rhs) {
    lhs.insert(lhs.end(), rhs.begin(), rhs.end());
    return lhs;
  };

  using Key = std::tuple<StateId, StateId, int>;
  std::map<Key, StateId> ids;
  std::vector<Key> keys;
  std::deque<StateId> queue;
  auto intern = [&](StateId qa, StateId qb, int filter) {
    const Key k{qa, qb, filter};
    auto [it, inserted] = ids.emplace(k, raw.num_states());
    if (inserted) {
      raw.add_state();
      keys.push_back(k);
      queue.push_back(it->second);
    }
    return it->second;
  };
  raw.set_initial(intern(a.initial(), b.initial(), 0));

  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    const auto [qa, qb, filter] = keys[s];
    if (a.is_final(qa) && b.is_final(qb)) raw.set_final(s);
    for (int ai : a.out_arcs(qa)) {
      const MfstArc& ea = a.arc(ai);
      for (int bi : b.out_arcs(qb)) {
        const MfstArc& eb = b.arc(bi);
        const bool real = !ea.output.empty() && ea.output == eb.input;
        const bool joint = ea.output.empty() && eb.input.empty() && filter == 0;
        if (!real && !joint) continue;
        raw.add_arc(s, ea.input, eb.output, concat(ea.marks, remap_b(eb.marks)),
                    intern(ea.dst, eb.dst, 0));
      }
      // A moves alone on an output epsilon while B stays.
      if (ea.output.empty() && filter != 2) {
        raw.add_arc(s, ea.input, {}, ea.marks, intern(ea.dst, qb, 1));
      }
    }
    // B moves alone on an input epsilon while A stays.
    if (filter != 1) {
      for (int bi : b.out_arcs(qb)) {
        const MfstArc& eb = b.arc(bi);
        if (!eb.input.empty()) continue;
        raw.add_arc(s, {}, eb.output, remap_b(eb.marks), intern(qa, eb.dst, 2));
      }
    }
  }
  return trim(raw);
}

Mfst trim(const Mfst& m, std::vector<StateId>* kept) {
  const int n = m.num_states();
  std::vector<char> fwd(n, 0), bwd(n, 0);
  if (m.initial() != kNoState) {
    std::vector<StateId> stack{m.initial()};
    fwd[m.initial()] = 1;
    while (!stack.empty()) {
      const StateId s = stack.back();
      stack.pop_back();
      for (int a : m.out_arcs(s)) {
        const StateId d = m.arc(a).dst;
        if (!fwd[d]) {
          fwd[d] = 1;
          stack.push_back(d);
        }
      }
    }
  }
  std::vector<std::vector<StateId>> preds(n);
  for (const MfstArc& arc : m.arcs()) preds[arc.dst].push_back(arc.src);
  std::vector<StateId> stack;
  for (StateId s = 0; s < n; ++s) {
    if (m.is_final(s)) {
      bwd[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const StateId s = stack.back();
    stack.pop_back();
    for (StateId p : preds[s]) {
      if (!bwd[p]) {
        bwd[p] = 1;
        stack.push_back(p);
      }
    }
  }

  std::vector<StateId> remap(n, kNoState);
  std::vector<StateId> old_ids;
  for (StateId s = 0; s < n; ++s) {
    if (fwd[s] && bwd[s]) {
      remap[s] = static_cast<StateId>(old_ids.size());
      old_ids.push_back(s);
    }
  }
  Mfst out(m.input_symbols(), m.output_symbols(), m.mark_symbols());
  out.add_states(static_cast<int>(old_ids.size()));
  if (m.initial() != kNoState && remap[m.initial()] != kNoState) {
    out.set_initial(remap[m.initial()]);
  }
  for (StateId s : old_ids) out.set_final(remap[s], m.is_final(s));
  for (const MfstArc& arc : m.arcs()) {
    if (remap[arc.src] == kNoState || remap[arc.dst] == kNoState) continue;
    MfstArc copy = arc;
    copy.src = remap[arc.src];
    copy.dst = remap[arc.dst];
    out.add_arc(std::move(copy));
  }
  if (kept) *kept = std::move(old_ids);
  return out;
}

std::vector<StateId> topo_order(const Mfst& m) {
  const int n = m.num_states();
  std::vector<int> indegree(n, 0);
  for (const MfstArc& arc : m.arcs()) ++indegree[arc.dst];
  // Min-heap on id so the order is unique.
  std::priority_queue<StateId, std::vector<StateId>, std::greater<>> ready;
  for (StateId s = 0; s < n; ++s) {
    if (indegree[s] == 0) ready.push(s);
  }
  std::vector<StateId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const StateId s = ready.top();
    ready.pop();
    order.push_back(s);
    for (int a : m.out_arcs(s)) {
      if (--indegree[m.arc(a).dst] == 0) ready.push(m.arc(a).dst);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    throw Error(ErrorKind::kCyclicMachine, "machine has a cycle");
  }
  return order;
}

bool is_acyclic(const Mfst& m) {
  try {
    topo_order(m);
    return true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kCyclicMachine) return false;
    throw;
  }
}

Mfst merge_equivalent_states(const Mfst& m) {
  const int n = m.num_states();
  std::vector<int> cls(n);
  for (StateId s = 0; s < n; ++s) cls[s] = m.is_final(s) ? 1 : 0;
  int num_classes = -1;
  using ArcSig = std::tuple<LabelString, LabelString, LabelString, int>;
  while (true) {
    std::map<std::pair<int, std::vector<ArcSig>>, int> sig_ids;
    std::vector<int> next(n);
    for (StateId s = 0; s < n; ++s) {
      std::vector<ArcSig> sig;
      for (int a : m.out_arcs(s)) {
        const MfstArc& arc = m.arc(a);
        sig.emplace_back(arc.input, arc.output, arc.marks, cls[arc.dst]);
      }
      std::sort(sig.begin(), sig.end());
      auto [it, inserted] = sig_ids.emplace(
          std::make_pair(cls[s], std::move(sig)),
          static_cast<int>(sig_ids.size()));
      next[s] = it->second;
    }
    const int count = static_cast<int>(sig_ids.size());
    cls = std::move(next);
    if (count == num_classes) break;
    num_classes = count;
  }

  // Renumber classes by first occurrence in state order.
  std::vector<int> rank(num_classes, -1);
  std::vector<StateId> rep;
  int next_rank = 0;
  for (StateId s = 0; s < n; ++s) {
    if (rank[cls[s]] < 0) {
      rank[cls[s]] = next_rank++;
      rep.push_back(s);
    }
  }
  Mfst out(m.input_symbols(), m.output_symbols(), m.mark_symbols());
  out.add_states(next_rank);
  if (m.initial() != kNoState) out.set_initial(rank[cls[m.initial()]]);
  for (int c = 0; c < next_rank; ++c) {
    const StateId s = rep[c];
    out.set_final(c, m.is_final(s));
    for (int a : m.out_arcs(s)) {
      MfstArc arc = m.arc(a);
      arc.src = c;
      arc.dst = rank[cls[arc.dst]];
      out.add_arc(std::move(arc));
    }
  }
  return out;
}

std::vector<GenPath> enumerate_paths(const Mfst& m, std::size_t max_paths) {
  std::vector<GenPath> paths;
  if (m.empty()) return paths;
  std::vector<StateId> kept;
  const Mfst trimmed = trim(m, &kept);
  if (trimmed.empty()) return paths;
  if (!is_acyclic(trimmed)) {
    throw Error(ErrorKind::kLimitExceeded,
                "infinitely many generating paths (useful cycle)");
  }
  std::vector<char> useful(m.num_states(), 0);
  for (StateId s : kept) useful[s] = 1;

  GenPath current;
  // Explicit stack of (state, next out-arc position).
  std::vector<std::pair<StateId, std::size_t>> stack{{m.initial(), 0}};
  auto emit = [&]() {
    if (paths.size() >= max_paths) {
      throw Error(ErrorKind::kLimitExceeded,
                  "more than " + std::to_string(max_paths) + " paths");
    }
    GenPath p;
    p.arcs = current.arcs;
    for (int a : p.arcs) {
      const MfstArc& arc = m.arc(a);
      p.x_emitted.insert(p.x_emitted.end(), arc.input.begin(), arc.input.end());
      p.y_emitted.insert(p.y_emitted.end(), arc.output.begin(),
                         arc.output.end());
      p.marks.insert(p.marks.end(), arc.marks.begin(), arc.marks.end());
    }
    paths.push_back(std::move(p));
  };
  if (m.is_final(m.initial())) emit();
  while (!stack.empty()) {
    auto& [s, pos] = stack.back();
    const auto& outs = m.out_arcs(s);
    if (pos == outs.size()) {
      stack.pop_back();
      if (!current.arcs.empty()) current.arcs.pop_back();
      continue;
    }
    const int a = outs[pos++];
    const StateId d = m.arc(a).dst;
    if (!useful[d]) continue;
    current.arcs.push_back(a);
    if (m.is_final(d)) emit();
    stack.emplace_back(d, 0);
  }
  return paths;
}

namespace {

std::string substring_text(const SymbolTable& t, const LabelString& s) {
  return s.empty() ? std::string(kEpsilonText) : join_labels(t, s);
}

LabelString parse_substring(const SymbolTable& t, const std::string& text,
                            int line_no) {
  if (text == kEpsilonText) return {};
  try {
    return parse_labels(t, text);
  } catch (const Error& e) {
    throw Error(ErrorKind::kParse,
                "line " + std::to_string(line_no) + ": " + e.what());
  }
}

void write_table(std::ostream& os, const char* tag, const SymbolTable& t) {
  os << tag;
  for (const auto& n : t.names()) os << '\t' << n;
  os << '\n';
}

SymbolTable read_table(const std::vector<std::string>& fields) {
  SymbolTable t;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    if (fields[i] == kEpsilonText) {
      throw Error(ErrorKind::kParse, "<eps> is reserved");
    }
    t.add(fields[i]);
  }
  return t;
}

}  // namespace

void write_mfst(std::ostream& os, const Mfst& m) {
  os << "#mfst\n";
  write_table(os, "#input", m.input_symbols());
  write_table(os, "#output", m.output_symbols());
  write_table(os, "#marks", m.mark_symbols());
  os << "#states\t" << m.num_states() << '\n';
  os << "#initial\t" << m.initial() << '\n';
  os << "#finals";
  for (StateId f : m.finals()) os << '\t' << f;
  os << '\n';
  for (const MfstArc& arc : m.arcs()) {
    os << arc.src << '\t' << arc.dst << '\t'
       << substring_text(m.input_symbols(), arc.input) << '\t'
       << substring_text(m.output_symbols(), arc.output) << '\t'
       << substring_text(m.mark_symbols(), arc.marks) << '\n';
  }
}

Mfst read_mfst(std::istream& is) {
  std::string line;
  int line_no = 0;
  auto next_header = [&](const char* tag) {
    if (!std::getline(is, line)) {
      throw Error(ErrorKind::kParse, std::string("missing ") + tag);
    }
    ++line_no;
    auto fields = split(line, '\t');
    if (fields.empty() || fields[0] != tag) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) +
                                         ": expected " + tag);
    }
    return fields;
  };
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) +
                                         ": bad integer '" + s + "'");
    }
  };
  next_header("#mfst");
  SymbolTable in = read_table(next_header("#input"));
  SymbolTable out = read_table(next_header("#output"));
  SymbolTable marks = read_table(next_header("#marks"));
  Mfst m(std::move(in), std::move(out), std::move(marks));
  auto states = next_header("#states");
  if (states.size() != 2) throw Error(ErrorKind::kParse, "bad #states");
  m.add_states(to_int(states[1]));
  auto init = next_header("#initial");
  if (init.size() != 2) throw Error(ErrorKind::kParse, "bad #initial");
  if (const int q = to_int(init[1]); q != kNoState) m.set_initial(q);
  auto finals = next_header("#finals");
  for (std::size_t i = 1; i < finals.size(); ++i) {
    const int f = to_int(finals[i]);
    if (f < 0 || f >= m.num_states()) {
      throw Error(ErrorKind::kParse, "final state out of range");
    }
    m.set_final(f);
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (f.size() != 5) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) +
                                         ": expected 5 fields");
    }
    const int src = to_int(f[0]);
    const int dst = to_int(f[1]);
    try {
      m.add_arc(src, parse_substring(m.input_symbols(), f[2], line_no),
                parse_substring(m.output_symbols(), f[3], line_no),
                parse_substring(m.mark_symbols(), f[4], line_no), dst);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kParse) throw;
      throw Error(ErrorKind::kParse,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return m;
}

std::string mfst_to_string(const Mfst& m) {
  std::ostringstream os;
  write_mfst(os, m);
  return os.str();
}

Mfst mfst_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_mfst(is);
}

}  // namespace nfst

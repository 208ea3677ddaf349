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

#include "nfst/lattice.h"

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace nfst {

Lattice::Lattice(SymbolTable input, SymbolTable output, SymbolTable marks,
                 LabelString x, LabelString y, int num_states,
                 StateId initial, std::vector<bool> finals,
                 std::vector<LatticeArc> arcs)
    : input_(std::move(input)),
      output_(std::move(output)),
      marks_(std::move(marks)),
      x_(std::move(x)),
      y_(std::move(y)),
      initial_(initial),
      finals_(std::move(finals)),
      arcs_(std::move(arcs)),
      out_(num_states) {
  if (num_states <= 0 || initial_ < 0 || initial_ >= num_states) {
    throw Error(ErrorKind::kShapeMismatch, "lattice needs a valid initial");
  }
  if (static_cast<int>(finals_.size()) != num_states) {
    throw Error(ErrorKind::kShapeMismatch, "finals size mismatch");
  }
  std::vector<int> indegree(num_states, 0);
  for (int i = 0; i < num_arcs(); ++i) {
    const LatticeArc& a = arcs_[i];
    if (a.src < 0 || a.src >= num_states || a.dst < 0 || a.dst >= num_states) {
      throw Error(ErrorKind::kShapeMismatch, "lattice arc out of range");
    }
    if (!marks_.contains(a.mark)) {
      throw Error(ErrorKind::kUnknownSymbol, "lattice arc mark");
    }
    if (a.nx < 0 || a.ny < 0) {
      throw Error(ErrorKind::kShapeMismatch, "negative progress");
    }
    out_[a.src].push_back(i);
    ++indegree[a.dst];
  }
  std::priority_queue<StateId, std::vector<StateId>, std::greater<>> ready;
  for (StateId s = 0; s < num_states; ++s) {
    if (indegree[s] == 0) ready.push(s);
  }
  std::vector<StateId> order;
  while (!ready.empty()) {
    const StateId s = ready.top();
    ready.pop();
    order.push_back(s);
    for (int a : out_[s]) {
      if (--indegree[arcs_[a].dst] == 0) ready.push(arcs_[a].dst);
    }
  }
  if (static_cast<int>(order.size()) != num_states) {
    throw Error(ErrorKind::kCyclicMachine, "lattice has a cycle");
  }
  reverse_topo_.assign(order.rbegin(), order.rend());

  progress_.assign(num_states, Progress{-1, -1});
  progress_[initial_] = {0, 0};
  const int lx = static_cast<int>(x_.size());
  const int ly = static_cast<int>(y_.size());
  for (StateId s : order) {
    if (progress_[s].nx < 0) continue;
    for (int ai : out_[s]) {
      const LatticeArc& a = arcs_[ai];
      const Progress p{progress_[s].nx + a.nx, progress_[s].ny + a.ny};
      if (p.nx > lx || p.ny > ly) {
        throw Error(ErrorKind::kShapeMismatch, "progress overruns x or y");
      }
      if (progress_[a.dst].nx < 0) {
        progress_[a.dst] = p;
      } else if (!(progress_[a.dst] == p)) {
        throw Error(ErrorKind::kShapeMismatch,
                    "state progress depends on the path");
      }
    }
  }
  for (StateId s = 0; s < num_states; ++s) {
    if (finals_[s] && progress_[s].nx >= 0 &&
        !(progress_[s] == Progress{lx, ly})) {
      throw Error(ErrorKind::kShapeMismatch,
                  "final state does not consume all of x and y");
    }
  }
}

int Lattice::find_arc(StateId s, Label mark) const {
  for (int a : out_.at(s)) {
    if (arcs_[a].mark == mark) return a;
  }
  return -1;
}

bool Lattice::operator==(const Lattice& other) const {
  return input_ == other.input_ && output_ == other.output_ &&
         marks_ == other.marks_ && x_ == other.x_ && y_ == other.y_ &&
         initial_ == other.initial_ && finals_ == other.finals_ &&
         arcs_ == other.arcs_;
}

namespace {

struct SplitArc {
  StateId src;
  Label mark;  // -1: no mark
  int nx;
  int ny;
  StateId dst;
};

struct SplitMachine {
  int num_states = 0;
  std::vector<Progress> progress;
  std::vector<bool> final;
  std::vector<SplitArc> arcs;
  std::vector<std::vector<int>> out;
  std::vector<int> topo_index;
  StateId initial = kNoState;

  StateId add_state(Progress p) {
    progress.push_back(p);
    final.push_back(false);
    out.emplace_back();
    return num_states++;
  }
  void add_arc(SplitArc a) {
    out[a.src].push_back(static_cast<int>(arcs.size()));
    arcs.push_back(a);
  }
};

SplitMachine split_marks(const ComposedPair& cp) {
  SplitMachine m;
  const Mfst& f = cp.fst;
  for (StateId s = 0; s < f.num_states(); ++s) {
    m.add_state({cp.coords[s].i, cp.coords[s].j});
    m.final[s] = f.is_final(s);
  }
  m.initial = f.initial();
  for (const MfstArc& arc : f.arcs()) {
    const int nx = static_cast<int>(arc.input.size());
    const int ny = static_cast<int>(arc.output.size());
    if (arc.marks.empty()) {
      m.add_arc({arc.src, -1, nx, ny, arc.dst});
      continue;
    }
    // Progress rides on the first mark so it is emitted as early as possible.
    StateId prev = arc.src;
    const Progress base = m.progress[arc.src];
    for (std::size_t k = 0; k < arc.marks.size(); ++k) {
      const bool last = k + 1 == arc.marks.size();
      const StateId next =
          last ? arc.dst : m.add_state({base.nx + nx, base.ny + ny});
      m.add_arc({prev, arc.marks[k], k == 0 ? nx : 0, k == 0 ? ny : 0, next});
      prev = next;
    }
  }
  // Topological index; x o T o y was already checked to be acyclic.
  std::vector<int> indegree(m.num_states, 0);
  for (const SplitArc& a : m.arcs) ++indegree[a.dst];
  std::deque<StateId> ready;
  for (StateId s = 0; s < m.num_states; ++s) {
    if (indegree[s] == 0) ready.push_back(s);
  }
  m.topo_index.assign(m.num_states, -1);
  int next = 0;
  while (!ready.empty()) {
    const StateId s = ready.front();
    ready.pop_front();
    m.topo_index[s] = next++;
    for (int a : m.out[s]) {
      if (--indegree[m.arcs[a].dst] == 0) ready.push_back(m.arcs[a].dst);
    }
  }
  return m;
}

// Closes a seed (state -> number of derivations) over unmarked arcs. Any
// state derived more than once means two paths share a mark prefix and meet
// again, which (everything being co-accessible) makes two generating paths
// with one mark string.
std::vector<StateId> mark_closure(const SplitMachine& m,
                                  std::map<StateId, long>& counts) {
  auto cmp = [&](StateId a, StateId b) {
    return m.topo_index[a] > m.topo_index[b];
  };
  std::priority_queue<StateId, std::vector<StateId>, decltype(cmp)> heap(cmp);
  for (const auto& [s, c] : counts) heap.push(s);
  std::set<StateId> popped;
  while (!heap.empty()) {
    const StateId u = heap.top();
    heap.pop();
    if (!popped.insert(u).second) continue;
    for (int ai : m.out[u]) {
      const SplitArc& a = m.arcs[ai];
      if (a.mark >= 0) continue;
      auto [it, inserted] = counts.emplace(a.dst, 0);
      it->second += counts[u];
      heap.push(a.dst);
    }
  }
  std::vector<StateId> members;
  for (const auto& [s, c] : counts) {
    if (c > 1) {
      throw Error(ErrorKind::kAmbiguousMarks,
                  "two generating paths share a mark string");
    }
    // Pass-through states have nothing left to contribute to the subset.
    bool live = m.final[s];
    for (int ai : m.out[s]) live |= m.arcs[ai].mark >= 0;
    if (live) members.push_back(s);
  }
  return members;
}

struct Dfa {
  int num_states = 0;
  StateId initial = 0;
  std::vector<bool> finals;
  std::vector<LatticeArc> arcs;
};

Dfa determinize(const SplitMachine& m, std::size_t cap) {
  Dfa dfa;
  std::map<std::vector<StateId>, StateId> ids;
  std::vector<std::vector<StateId>> subsets;
  std::vector<Progress> bases;
  std::deque<StateId> queue;

  auto base_of = [&](const std::vector<StateId>& members) {
    Progress b{1 << 30, 1 << 30};
    for (StateId s : members) {
      b.nx = std::min(b.nx, m.progress[s].nx);
      b.ny = std::min(b.ny, m.progress[s].ny);
    }
    return b;
  };
  auto intern = [&](std::vector<StateId> members) {
    auto [it, inserted] = ids.emplace(members, dfa.num_states);
    if (inserted) {
      if (static_cast<std::size_t>(dfa.num_states) >= cap) {
        throw Error(ErrorKind::kLimitExceeded,
                    "subset construction exceeded " + std::to_string(cap) +
                        " states");
      }
      bases.push_back(base_of(members));
      subsets.push_back(std::move(members));
      ++dfa.num_states;
      queue.push_back(it->second);
    }
    return it->second;
  };

  std::map<StateId, long> seed{{m.initial, 1}};
  dfa.initial = intern(mark_closure(m, seed));
  while (!queue.empty()) {
    const StateId d = queue.front();
    queue.pop_front();
    const std::vector<StateId> members = subsets[d];
    const Progress base = bases[d];
    int final_members = 0;
    for (StateId s : members) {
      if (!m.final[s]) continue;
      ++final_members;
      if (!(m.progress[s] == base)) {
        throw Error(ErrorKind::kUnsupported,
                    "final state with pending progress (needs a final "
                    "residual)");
      }
    }
    if (final_members > 1) {
      throw Error(ErrorKind::kAmbiguousMarks,
                  "two generating paths share a mark string");
    }
    std::map<Label, std::map<StateId, long>> by_mark;
    for (StateId s : members) {
      for (int ai : m.out[s]) {
        const SplitArc& a = m.arcs[ai];
        if (a.mark < 0) continue;
        ++by_mark[a.mark][a.dst];
      }
    }
    for (auto& [mark, seeds] : by_mark) {
      const StateId target = intern(mark_closure(m, seeds));
      const Progress tb = bases[target];
      dfa.arcs.push_back(
          {d, mark, tb.nx - base.nx, tb.ny - base.ny, target});
    }
    if (static_cast<int>(dfa.finals.size()) <= d) dfa.finals.resize(d + 1);
    dfa.finals[d] = final_members == 1;
  }
  dfa.finals.resize(dfa.num_states, false);
  return dfa;
}

}  // namespace

Lattice minimize(const Lattice& lattice) {
  const int n = lattice.num_states();
  std::vector<int> cls(n, -1);
  using Sig = std::pair<bool, std::vector<std::tuple<Label, int, int, int>>>;
  std::map<Sig, int> classes;
  for (StateId s : lattice.reverse_topo()) {
    Sig sig;
    sig.first = lattice.is_final(s);
    for (int ai : lattice.out_arcs(s)) {
      const LatticeArc& a = lattice.arc(ai);
      sig.second.emplace_back(a.mark, a.nx, a.ny, cls[a.dst]);
    }
    std::sort(sig.second.begin(), sig.second.end());
    auto [it, inserted] =
        classes.emplace(std::move(sig), static_cast<int>(classes.size()));
    cls[s] = it->second;
  }

  // Number classes in BFS order from the initial state.
  const int num_classes = static_cast<int>(classes.size());
  std::vector<int> rank(num_classes, -1);
  std::vector<StateId> rep;
  std::deque<StateId> queue{lattice.initial()};
  rank[cls[lattice.initial()]] = 0;
  rep.push_back(lattice.initial());
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (int ai : lattice.out_arcs(s)) {
      const StateId d = lattice.arc(ai).dst;
      if (rank[cls[d]] < 0) {
        rank[cls[d]] = static_cast<int>(rep.size());
        rep.push_back(d);
        queue.push_back(d);
      }
    }
  }
  const int m = static_cast<int>(rep.size());
  std::vector<bool> finals(m);
  std::vector<LatticeArc> arcs;
  for (int c = 0; c < m; ++c) {
    finals[c] = lattice.is_final(rep[c]);
    for (int ai : lattice.out_arcs(rep[c])) {
      LatticeArc a = lattice.arc(ai);
      a.src = c;
      a.dst = rank[cls[a.dst]];
      arcs.push_back(a);
    }
  }
  return Lattice(lattice.input_symbols(), lattice.output_symbols(),
                 lattice.mark_symbols(), lattice.x(), lattice.y(), m, 0,
                 std::move(finals), std::move(arcs));
}

Lattice canonicalize(const Mfst& t, std::span<const Label> x,
                     std::span<const Label> y,
                     const CanonicalizeOptions& options,
                     LatticeBuildStats* stats) {
  const ComposedPair cp = compose_with_pair(t, x, y);
  if (cp.fst.empty()) {
    throw Error(ErrorKind::kEmptyLanguage, "T generates no path for (x, y)");
  }
  if (!is_acyclic(cp.fst)) {
    throw Error(ErrorKind::kCyclicMachine,
                "x o T o y is cyclic; its mark language is infinite");
  }
  const SplitMachine split = split_marks(cp);
  const Dfa dfa = determinize(split, options.max_subset_states);
  Lattice det(t.input_symbols(), t.output_symbols(), t.mark_symbols(),
              LabelString(x.begin(), x.end()), LabelString(y.begin(), y.end()),
              dfa.num_states, dfa.initial, dfa.finals, dfa.arcs);
  if (stats) {
    stats->composed_states = cp.fst.num_states();
    stats->composed_arcs = cp.fst.num_arcs();
    stats->split_states = split.num_states;
    stats->split_arcs = static_cast<int>(split.arcs.size());
    stats->determinized_states = det.num_states();
    stats->determinized_arcs = det.num_arcs();
  }
  if (!options.minimize) {
    if (stats) {
      stats->minimized_states = det.num_states();
      stats->minimized_arcs = det.num_arcs();
    }
    return det;
  }
  Lattice min = minimize(det);
  if (stats) {
    stats->minimized_states = min.num_states();
    stats->minimized_arcs = min.num_arcs();
  }
  return min;
}

StateId path_end(const Lattice& lattice, const LatticePath& path) {
  StateId s = lattice.initial();
  for (int a : path) {
    if (a < 0 || a >= lattice.num_arcs() || lattice.arc(a).src != s) {
      throw Error(ErrorKind::kInvalidPath, "path is not connected");
    }
    s = lattice.arc(a).dst;
  }
  return s;
}

LatticePath path_from_marks(const Lattice& lattice,
                            std::span<const Label> marks) {
  LatticePath path;
  StateId s = lattice.initial();
  for (Label m : marks) {
    const int a = lattice.find_arc(s, m);
    if (a < 0) throw Error(ErrorKind::kInvalidPath, "mark not allowed");
    path.push_back(a);
    s = lattice.arc(a).dst;
  }
  return path;
}

LabelString path_marks(const Lattice& lattice, const LatticePath& path) {
  LabelString out;
  for (int a : path) out.push_back(lattice.arc(a).mark);
  return out;
}

bool is_complete(const Lattice& lattice, const LatticePath& path) {
  return lattice.is_final(path_end(lattice, path));
}

std::pair<LabelString, LabelString> suffixes_at(const Lattice& lattice,
                                                const LatticePath& prefix) {
  path_end(lattice, prefix);
  int nx = 0, ny = 0;
  for (int a : prefix) {
    nx += lattice.arc(a).nx;
    ny += lattice.arc(a).ny;
  }
  const auto& x = lattice.x();
  const auto& y = lattice.y();
  return {LabelString(x.begin() + nx, x.end()),
          LabelString(y.begin() + ny, y.end())};
}

std::vector<LatticePath> enumerate_lattice_paths(const Lattice& lattice,
                                                 std::size_t max_paths) {
  std::vector<LatticePath> paths;
  LatticePath current;
  auto emit = [&]() {
    if (paths.size() >= max_paths) {
      throw Error(ErrorKind::kLimitExceeded,
                  "more than " + std::to_string(max_paths) + " lattice paths");
    }
    paths.push_back(current);
  };
  std::vector<std::pair<StateId, std::size_t>> stack{{lattice.initial(), 0}};
  if (lattice.is_final(lattice.initial())) emit();
  while (!stack.empty()) {
    auto& [s, pos] = stack.back();
    const auto& outs = lattice.out_arcs(s);
    if (pos == outs.size()) {
      stack.pop_back();
      if (!current.empty()) current.pop_back();
      continue;
    }
    const int a = outs[pos++];
    const StateId d = lattice.arc(a).dst;
    current.push_back(a);
    if (lattice.is_final(d)) emit();
    stack.emplace_back(d, 0);
  }
  return paths;
}

CanonicalReport check_canonical(const Lattice& lattice, const Mfst& t,
                                std::span<const Label> x,
                                std::span<const Label> y,
                                std::size_t max_paths) {
  CanonicalReport r;
  const int n = lattice.num_states();

  for (StateId s = 0; s < n; ++s) {
    std::set<Label> seen;
    for (int a : lattice.out_arcs(s)) {
      if (!seen.insert(lattice.arc(a).mark).second) {
        r.deterministic = false;
      }
    }
  }
  if (!r.deterministic) r.failures.push_back("out-arcs share a mark");

  std::vector<char> co(n, 0);
  for (StateId s : lattice.reverse_topo()) {
    co[s] = lattice.is_final(s);
    for (int a : lattice.out_arcs(s)) co[s] |= co[lattice.arc(a).dst];
  }
  for (StateId s = 0; s < n; ++s) {
    if (!co[s]) r.coaccessible = false;
  }
  if (!r.coaccessible) r.failures.push_back("state cannot reach a final");

  const Progress end{static_cast<int>(x.size()), static_cast<int>(y.size())};
  for (StateId s = 0; s < n; ++s) {
    if (lattice.progress(s).nx < 0) r.progress_consistent = false;
    if (lattice.is_final(s) && !(lattice.progress(s) == end)) {
      r.progress_consistent = false;
    }
  }
  if (lattice.x() != LabelString(x.begin(), x.end()) ||
      lattice.y() != LabelString(y.begin(), y.end())) {
    r.progress_consistent = false;
  }
  if (!r.progress_consistent) r.failures.push_back("progress inconsistent");

  // Suffix languages with progress, bottom-up.
  using Step = std::tuple<Label, int, int>;
  using Language = std::set<std::vector<Step>>;
  std::vector<Language> lang(n);
  bool too_big = false;
  for (StateId s : lattice.reverse_topo()) {
    Language& l = lang[s];
    if (lattice.is_final(s)) l.insert(std::vector<Step>{});
    for (int ai : lattice.out_arcs(s)) {
      const LatticeArc& a = lattice.arc(ai);
      for (const auto& w : lang[a.dst]) {
        std::vector<Step> v;
        v.reserve(w.size() + 1);
        v.emplace_back(a.mark, a.nx, a.ny);
        v.insert(v.end(), w.begin(), w.end());
        l.insert(std::move(v));
        if (l.size() > max_paths) too_big = true;
      }
      if (too_big) break;
    }
    if (too_big) break;
  }
  if (too_big) {
    r.minimal = false;
    r.failures.push_back("suffix languages too large to compare");
  } else {
    std::map<Language, StateId> seen;
    for (StateId s = 0; s < n; ++s) {
      if (!seen.emplace(lang[s], s).second) r.minimal = false;
    }
    if (!r.minimal) r.failures.push_back("two states share a suffix language");
  }

  std::multiset<LabelString> oracle;
  try {
    const ComposedPair cp = compose_with_pair(t, x, y);
    for (const GenPath& p : enumerate_paths(cp.fst, max_paths)) {
      oracle.insert(p.marks);
    }
    std::multiset<LabelString> mine;
    for (const LatticePath& p : enumerate_lattice_paths(lattice, max_paths)) {
      mine.insert(path_marks(lattice, p));
    }
    r.language_equal = oracle == mine;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kLimitExceeded) throw;
    r.language_equal = false;
  }
  if (!r.language_equal) r.failures.push_back("mark language differs");
  return r;
}

void write_lattice(std::ostream& os, const Lattice& lattice) {
  auto table = [&](const char* tag, const SymbolTable& t) {
    os << tag;
    for (const auto& name : t.names()) os << '\t' << name;
    os << '\n';
  };
  os << "#lattice\n";
  table("#input", lattice.input_symbols());
  table("#output", lattice.output_symbols());
  table("#marks", lattice.mark_symbols());
  os << "#x\t" << join_labels(lattice.input_symbols(), lattice.x()) << '\n';
  os << "#y\t" << join_labels(lattice.output_symbols(), lattice.y()) << '\n';
  os << "#states\t" << lattice.num_states() << '\n';
  os << "#initial\t" << lattice.initial() << '\n';
  os << "#finals";
  for (StateId s = 0; s < lattice.num_states(); ++s) {
    if (lattice.is_final(s)) os << '\t' << s;
  }
  os << '\n';
  for (const LatticeArc& a : lattice.arcs()) {
    os << a.src << '\t' << a.dst << '\t'
       << lattice.mark_symbols().name(a.mark) << '\t' << a.nx << '\t' << a.ny
       << '\n';
  }
}

Lattice read_lattice(std::istream& is) {
  std::string line;
  int line_no = 0;
  auto header = [&](const char* tag) {
    if (!std::getline(is, line)) {
      throw Error(ErrorKind::kParse, std::string("missing ") + tag);
    }
    ++line_no;
    auto f = split(line, '\t');
    if (f.empty() || f[0] != tag) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) +
                                         ": expected " + tag);
    }
    return f;
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
  auto table = [](const std::vector<std::string>& f) {
    SymbolTable t;
    for (std::size_t i = 1; i < f.size(); ++i) t.add(f[i]);
    return t;
  };
  header("#lattice");
  SymbolTable in = table(header("#input"));
  SymbolTable out = table(header("#output"));
  SymbolTable marks = table(header("#marks"));
  auto xf = header("#x");
  auto yf = header("#y");
  LabelString x = parse_labels(in, xf.size() > 1 ? xf[1] : "");
  LabelString y = parse_labels(out, yf.size() > 1 ? yf[1] : "");
  const int n = to_int(header("#states").at(1));
  const int init = to_int(header("#initial").at(1));
  auto ff = header("#finals");
  std::vector<bool> finals(std::max(n, 0), false);
  for (std::size_t i = 1; i < ff.size(); ++i) finals.at(to_int(ff[i])) = true;
  std::vector<LatticeArc> arcs;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (f.size() != 5) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) +
                                         ": expected 5 fields");
    }
    arcs.push_back({to_int(f[0]), marks.at(f[2]), to_int(f[3]), to_int(f[4]),
                    to_int(f[1])});
  }
  return Lattice(std::move(in), std::move(out), std::move(marks), std::move(x),
                 std::move(y), n, init, std::move(finals), std::move(arcs));
}

std::string lattice_to_string(const Lattice& lattice) {
  std::ostringstream os;
  write_lattice(os, lattice);
  return os.str();
}

Lattice lattice_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_lattice(is);
}

std::string lattice_cache_key(const Mfst& t, std::span<const Label> x,
                              std::span<const Label> y) {
  Fnv1a h;
  h.update(mfst_to_string(t));
  h.update("\x1f");
  h.update(join_labels(t.input_symbols(), x));
  h.update("\x1f");
  h.update(join_labels(t.output_symbols(), y));
  return h.hex();
}

}  // namespace nfst

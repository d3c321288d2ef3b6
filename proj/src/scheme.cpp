#include "ict/scheme.hpp"

#include <stdexcept>

namespace ict {

namespace {

void extend(const Term& term, std::size_t next_factor, Path& walk, std::vector<Path>& out) {
  if (next_factor == term.factors.size()) {
    out.push_back(walk);
    return;
  }
  const Weight prev = walk.terminal();
  const Weight bridge = term.factors[next_factor].l;
  const int lo = std::abs(prev.doubled() - bridge.doubled());
  const int hi = prev.doubled() + bridge.doubled();
  for (int d = lo; d <= hi; d += 2) {  // ascending results give lexicographic order
    walk.steps.push_back({bridge, Weight::from_doubled(d)});
    extend(term, next_factor + 1, walk, out);
    walk.steps.pop_back();
  }
}

}  // namespace

std::vector<Path> enumerate_paths(const Term& term, int term_index) {
  if (term.factors.empty()) throw std::invalid_argument("enumerate_paths: empty term");
  std::vector<Path> out;
  Path walk;
  walk.term_index = term_index;
  walk.start = term.factors[0].l;
  walk.terminal_parity = term.parity;
  extend(term, 1, walk, out);
  return out;
}

std::vector<Path> enumerate_paths(const SpaceSpec& spec) {
  spec.validate();
  std::vector<Path> out;
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    Term term = spec.terms[t];
    if (spec.group != Group::O3) term.parity = 1;  // parity only matters under O3
    auto paths = enumerate_paths(term, static_cast<int>(t));
    out.insert(out.end(), paths.begin(), paths.end());
  }
  return out;
}

std::map<TerminalKey, std::vector<Path>> group_paths_by_terminal(const std::vector<Path>& paths) {
  std::map<TerminalKey, std::vector<Path>> groups;
  for (const auto& p : paths) groups[{p.terminal(), p.terminal_parity}].push_back(p);
  return groups;
}

std::uint64_t hom_dimension(const SpaceSpec& vin, const SpaceSpec& vout) {
  if (vin.group != vout.group) throw std::invalid_argument("hom_dimension: group mismatch");
  const auto gin = group_paths_by_terminal(enumerate_paths(vin));
  const auto gout = group_paths_by_terminal(enumerate_paths(vout));
  std::uint64_t dim = 0;
  for (const auto& [key, in_paths] : gin) {
    auto it = gout.find(key);
    if (it != gout.end()) dim += static_cast<std::uint64_t>(in_paths.size()) * it->second.size();
  }
  return dim;
}

std::vector<int> path_q_indices(const std::vector<Path>& paths) {
  std::map<std::pair<int, TerminalKey>, int> counters;
  std::vector<int> q;
  q.reserve(paths.size());
  for (const auto& p : paths)
    q.push_back(++counters[{p.term_index, {p.terminal(), p.terminal_parity}}]);
  return q;
}

}  // namespace ict

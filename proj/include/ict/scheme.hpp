#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "ict/exact.hpp"
#include "ict/types.hpp"

namespace ict {

/// All decomposition paths of one term, in lexicographic order of the
/// result-weight sequence: start at the first factor's weight, then one step
/// per remaining factor with that factor's weight as the bridge.
std::vector<Path> enumerate_paths(const Term& term, int term_index = 0);

/// All paths of every term of the spec, term by term.
std::vector<Path> enumerate_paths(const SpaceSpec& spec);

/// Key for grouping paths: (terminal weight, terminal parity).
using TerminalKey = std::pair<Weight, int>;

/// Partition preserving enumeration order inside each group. Under SO3/SU2
/// the parity component is normalized to +1 by the caller's spec.
std::map<TerminalKey, std::vector<Path>> group_paths_by_terminal(const std::vector<Path>& paths);

/// dim Hom_G(vin, vout) = sum over matched (terminal weight, parity) of
/// (#input paths) * (#output paths). Throws on group mismatch.
std::uint64_t hom_dimension(const SpaceSpec& vin, const SpaceSpec& vout);

/// 1-based index q of each path within its terminal (l,p) group, in the same
/// order as `paths`.
std::vector<int> path_q_indices(const std::vector<Path>& paths);

}  // namespace ict

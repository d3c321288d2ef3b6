#pragma once

#include <string>
#include <vector>

#include "ict/types.hpp"

namespace ict {

/// Parse the textual space-spec grammar:
///
///   spec    := term ('+' term)*
///   term    := '(' weight ('x' weight)* ')' parity?  |  'R3^' integer
///   weight  := integer | integer '/2'
///   parity  := '+' | '-'
///
/// Whitespace is insignificant. 'R3^n' expands to n weight-1 factors with
/// parity (-1)^n. Terms without a parity mark default to '-' under O3; under
/// SO3/SU2 parity marks are accepted with a warning and normalized to +1.
/// A '+' right after a term is read as a separator when a new term follows,
/// as a parity mark otherwise. Errors carry the byte offset.
SpaceSpec parse_space_spec(const std::string& text, Group group,
                           std::vector<std::string>* warnings = nullptr);

/// Canonical text: no shorthand, explicit parities under O3, none otherwise.
/// parse(render(s)) is structurally equal to s.
std::string render_space_spec(const SpaceSpec& spec);

}  // namespace ict

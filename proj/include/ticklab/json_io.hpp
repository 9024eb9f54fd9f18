#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "ticklab/models.hpp"

namespace ticklab {

using Json = nlohmann::json;

// Deterministic rendering: object keys sorted (nlohmann's default map),
// floating-point numbers printed with 17 significant digits.
std::string dump_json(const Json& value, int indent = 2);

namespace models {

// {"kind": "classical", "d", "T0", "pi0"} or
// {"kind": "quantum", "d", "K0_re", "K0_im", "psi0_re", "psi0_im"},
// matrices flattened row-major.
Json to_json(const ClassicalClock& clock);
Json to_json(const QuantumClock& clock);
Json to_json(const ClockModel& model);

// Accepts the explicit forms above plus zoo shorthands:
// {"kind": "multicyclic", "d", "k", "q", ["L"]}, {"kind": "oneway"|"cyclic", "d", "q", ["L"]},
// {"kind": "qubit", "q", "u"}, {"kind": "qutrit", "q", "u"}.
// When "L" is present the multicyclic start state is shifted for that length.
ClockModel model_from_json(const Json& j);

}  // namespace models
}  // namespace ticklab

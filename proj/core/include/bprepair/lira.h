#pragma once

#include <map>
#include <string>

#include "bprepair/concrete.h"

namespace bp {

enum class Tri { Yes, No, Unknown };

// Decision procedures for linear arithmetic over the declared sorts
// (variables not listed default to Real). Negation-normal form, disjunctive
// expansion, Gaussian elimination of equalities, then Fourier-Motzkin over
// the rationals with integer strengthening (t < 0 becomes t <= -1 when the
// atom is integer-valued, and an equality whose coefficient gcd does not
// divide its constant is refuted outright).
//
// Guarantees: answers are exact when every variable is Real. With Int
// variables every "No" from lira_sat and every "Yes" from lira_valid is
// sound; the opposite answers can over-claim when the only rational
// witnesses of a coupled integer system are fractional. Unknown is returned
// when the disjunctive expansion or the derived-constraint count exceeds a
// fixed cap.
Tri lira_sat(const CFormulaPtr& f, const std::map<std::string, Sort>& sorts);
Tri lira_valid(const CFormulaPtr& f, const std::map<std::string, Sort>& sorts);

}  // namespace bp

// Brute-force ATL evaluation by exhaustive enumeration of uniform strategy
// profiles. Independent of the fixpoint checker; used as the test oracle.

#pragma once

#include "stratmon/formula.hpp"
#include "stratmon/icgs.hpp"

namespace stratmon {

struct OracleRecall {
    // Window length of the strategy domain: 1 = memoryless, k>1 = strategies
    // over the last k observed states (uniform across pointwise
    // indistinguishable windows).
    int window = 1;

    static OracleRecall memoryless() { return {1}; }
    static OracleRecall bounded(int k) { return {k}; }
};

// Truth of an ATL-fragment formula at a state, by enumerating all uniform
// strategy profiles of the quantified coalition at the given recall and
// evaluating path formulas over every lasso-shaped outcome path. General
// negation is handled semantically. Desk scale only: at most 8 states,
// 2 agents and 3 actions per protocol entry (OracleScaleError otherwise).
bool oracle_evaluate(const Icgs& m, const FormulaPtr& f, int state,
                     OracleRecall recall = OracleRecall::memoryless());

} // namespace stratmon

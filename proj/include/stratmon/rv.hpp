// The runtime-verification step and the overall verification procedure:
// model/atom updating, the negative/positive formula variants, monitor
// dispatch, verdict combination and sub-formula bookkeeping.

#pragma once

#include <optional>
#include <vector>

#include "stratmon/b3.hpp"
#include "stratmon/formula.hpp"
#include "stratmon/icgs.hpp"
#include "stratmon/mc_atl.hpp"

namespace stratmon {

// Extends AP and the labelling with the checked-subformula atoms. Collisions
// with existing atoms are renamed deterministically (numeric suffix) and
// reported through `renames`.
Icgs update_model(const Icgs& m, const CheckResult& results,
                  std::vector<std::pair<std::string, std::string>>* renames = nullptr);

// psi_n = f with every n-checked subformula replaced by its natom, psi_p the
// p-side analogue. Substitution is innermost-first.
std::pair<FormulaPtr, FormulaPtr> build_variants(const FormulaPtr& f, const CheckResult& results);

struct RvInput {
    Trace trace;
    // When the visited state sequence is known (simulation), events are
    // enriched exactly from the updated labelling; otherwise states are
    // matched by labelling.
    std::optional<History> history;
    // Model-generated traces turn a simultaneous top/bot conclusion into an
    // internal soundness error instead of a warning.
    bool from_model = false;
};

struct Outcome {
    B3 k = B3::Unknown;
    std::vector<FormulaPtr> phi_mc;     // statically verified subformulas
    std::vector<FormulaPtr> phi_rv;     // conclusively monitored subformulas
    std::vector<FormulaPtr> phi_unchk;  // monitors stayed inconclusive
    B3 n_verdict = B3::Unknown;         // Mon_{phi_n}(h)
    B3 p_verdict = B3::Unknown;         // Mon_{phi_p}(h)
    bool conflict = false;
    std::string warning;
    FormulaPtr psi_n, psi_p;      // ATL variants after substitution
    FormulaPtr phi_n, phi_p;      // their LTL projections
};

// Algorithm 2. f must be preprocessed (NNF, negation-free); trace events must
// stay within the updated model's atoms.
Outcome runtime_verification(const Icgs& m, const FormulaPtr& f, const RvInput& input,
                             const CheckResult& results);

struct PipelineOptions {
    size_t max_candidates = 256;
};

struct CandidateOutcome {
    size_t index = 0;
    std::vector<std::string> core; // state names
    Outcome outcome;
    double static_ms = 0.0;
    double rv_ms = 0.0;
};

struct MergedOutcome {
    B3 k = B3::Unknown;
    bool conflict = false;
    std::string warning;
    std::vector<CandidateOutcome> candidates;
    double static_ms = 0.0; // sub-model extraction + static checking
    double rv_ms = 0.0;     // runtime verification
    FormulaPtr preprocessed;
};

// Algorithm 1: preprocessing, sub-model extraction, then the static check and
// the runtime verification per candidate. Merged verdict is top if any
// candidate concludes top, else bot if any concludes bot, else unknown.
MergedOutcome model_checking_procedure(const Icgs& m, const FormulaPtr& f, const RvInput& input,
                                       const PipelineOptions& opts = {});

struct SimulationResult {
    History history;
    Trace trace; // V(s) per visited state
};

// Uniform-random walk over enabled joint actions; `steps` visited states
// starting from the initial state. Deterministic for a fixed seed.
SimulationResult simulate(const Icgs& m, size_t steps, uint64_t seed);

} // namespace stratmon

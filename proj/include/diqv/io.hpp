#pragma once

// JSON and CSV encodings for the CLI and for saved results.

#include "diqv/bounds.hpp"
#include "diqv/experiments.hpp"
#include "diqv/games.hpp"
#include "diqv/protocols.hpp"
#include "diqv/quantum.hpp"
#include "diqv/sources.hpp"

#include <json.hpp>

#include <string>

namespace diqv {

using Json = nlohmann::ordered_json;

/// {dims, re[], im[]} with row-major entries.
Json to_json(const DensityOperator& rho);
Json to_json(const StateVector& psi);
DensityOperator density_from_json(const Json& j);
StateVector state_vector_from_json(const Json& j);

Json to_json(const RobustnessModel& model);
/// {name, parties, inputs, distribution, predicate, robustness}
Json to_json(const GameDefinition& game);

Json to_json(const BoundReport& report);
Json to_json(const VerificationPlan& plan);
Json to_json(const CertificationPlan& plan);
Json to_json(const Transcript& transcript);
Json to_json(const Verdict& verdict);
Json to_json(const OracleResult& result);
Json to_json(const PassEstimate& estimate);
Json to_json(const FigureSpec& spec);

/// round,measured,i1..in,o1..on,win
std::string transcript_csv(const Transcript& transcript, std::size_t parties);

/// {kind, N, state | states | probs | p | weights + branches}. States are
/// {name, n | dim, depolarize}.
SourceSpec source_spec_from_json(const Json& j);

/// Shorthand used on the command line:
///   iid-ghz-depolarized:<lambda>    GHZ_3 with depolarizing noise
///   iid-bell-depolarized:<lambda>   Bell pair with depolarizing noise
///   iid-bernoulli:<p>               abstract source
///   coin-flip[:<weight>]            GHZ_3^N vs (I/8)^N mixture
/// N is filled in from `copies`.
SourceSpec source_spec_from_shorthand(const std::string& text, std::size_t copies);

}  // namespace diqv

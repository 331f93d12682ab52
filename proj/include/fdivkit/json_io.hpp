#pragma once

#include <json.hpp>

#include <string>

#include "fdivkit/experiment.hpp"
#include "fdivkit/generator.hpp"
#include "fdivkit/loss.hpp"
#include "fdivkit/quantizer.hpp"
#include "fdivkit/uncertainty.hpp"

namespace fdivkit {

using Json = nlohmann::ordered_json;

/// Deterministic serialization: insertion-ordered objects, doubles printed
/// with 17 significant digits (lossless round-trip), non-finite values as
/// strings. Identical trees produce identical bytes.
std::string emit_json(const Json& j, int indent = 2);

/// Spec arguments accept inline JSON, a path to a JSON file, or (where a
/// plain name makes sense) a bare builtin name.
Json load_spec(const std::string& arg);

/// {"k": int, "m": int, "prior": [...], "conditionals": [[...], ...]}
DiscreteExperiment parse_experiment(const Json& j);
Json experiment_to_json(const DiscreteExperiment& exp);

/// {"name": "kl"|"tv"|"hellinger-sq"|"pearson", "k": int}
Generator parse_generator(const Json& j, int default_k);

/// {"kind": "zero-one"|"weighted-zero-one"|"hinge"|"logistic"|"family-wise",
///  "k": int, "C": [[...], ...]} or a bare kind name.
LossFamily parse_loss(const Json& j, int default_k);

/// {"kind": "zero-one"|"cost-weighted"|"entropy"|"hinge-induced", ...}
UncertaintyFn parse_uncertainty(const Json& j, int default_k);

/// Bare array of cell codes, or {"assignment": [...], "num_codes": int}.
Quantizer parse_quantizer(const Json& j);

Json vector_to_json(const Vector& v);
Json matrix_to_json(const Matrix& m);
Vector parse_vector(const Json& j);
Matrix parse_matrix(const Json& j);

}  // namespace fdivkit

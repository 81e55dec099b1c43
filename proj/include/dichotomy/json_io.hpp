#pragma once

#include <json.hpp>

#include "dichotomy/certificate.hpp"
#include "dichotomy/verify.hpp"

namespace dichotomy {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& what);
Json vector_to_json(const Vector& v);

/// A subspace given as a list of basis columns, e.g. [[1,1]] for span{(1,1)}.
Subspace subspace_from_columns(const Json& j, int ambient_dim, const ToleranceConfig& tol = {});

Json interval_to_json(const Interval& itv);
Interval interval_from_json(const Json& j);

Json form_to_json(const Form& f);

/// {"value": v, "tolerance": t} so every judged numeric names its yardstick.
Json judged(double value, double tolerance);

Json tolerances_to_json(const ToleranceConfig& tol);

Json verify_report_to_json(const VerifyReport& rep);

/// The JSON problem format: dimension, interval, coefficient matrices
/// (explicit window plus tail generators), optional projection family,
/// optional constants, optional tolerance overrides.
struct ProblemFile {
    SequencePtr seq;
    std::optional<ProjectionFamily> family;
    std::optional<Form> constants;
    ToleranceConfig tol;
};

ProblemFile parse_problem(const Json& j);

}  // namespace dichotomy

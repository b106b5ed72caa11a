#pragma once

// State-specification documents: a JSON schema for joint states (fixed
// particle number or truncated Fock vectors) plus named individuation
// criteria, with serialization helpers shared by the command line tool and
// the bindings. Complex entries are [re, im] pairs; matrices are row-major.

#include <map>
#include <string>

#include <json.hpp>

#include "piqm/fock.hpp"
#include "piqm/individuation.hpp"
#include "piqm/types.hpp"

namespace piqm::statespec {

enum class DocumentKind { fixed_n, fock };

struct StateSpecDocument {
  DocumentKind kind = DocumentKind::fixed_n;
  JointKet state;           // valid when kind == fixed_n
  fock::FockVector fockstate; // valid when kind == fock
  std::vector<std::string> criterion_order;
  std::map<std::string, individuation::Criterion> criteria;
  nlohmann::json raw; // provenance echo

  int d() const;
  Statistics statistics() const;
};

// Parse and validate; all defects raise errc::parse with distinct tags
// (schema, zero_state, unnormalized, non_orthonormal_criteria, ...).
StateSpecDocument parse_state_spec(const std::string& path,
                                   double tol_proj = 1e-8);
StateSpecDocument parse_state_spec_text(const std::string& text,
                                        double tol_proj = 1e-8);

// Serialization helpers: complex scalars as [re, im], matrices row-major.
nlohmann::json to_json(const cplx& z);
nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const Mat& m);
cplx complex_from_json(const nlohmann::json& j);
Vec vector_from_json(const nlohmann::json& j);
Mat matrix_from_json(const nlohmann::json& j);

} // namespace piqm::statespec

#include "piqm/statespec.hpp"

#include <fstream>

#include "piqm/hilbert.hpp"

namespace piqm::statespec {

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw error(errc::parse, "schema", what);
}

const nlohmann::json& require_field(const nlohmann::json& j,
                                    const std::string& key) {
  if (!j.contains(key)) schema_error("missing field: " + key);
  return j.at(key);
}

int require_int(const nlohmann::json& j, const std::string& key) {
  const auto& v = require_field(j, key);
  if (!v.is_number_integer()) schema_error(key + " must be an integer");
  return v.get<int>();
}

Statistics parse_statistics(const nlohmann::json& j) {
  const auto& v = require_field(j, "statistics");
  if (v == "boson") return Statistics::boson;
  if (v == "fermion") return Statistics::fermion;
  schema_error("statistics must be \"boson\" or \"fermion\"");
}

} // namespace

nlohmann::json to_json(const cplx& z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

nlohmann::json to_json(const Vec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

nlohmann::json to_json(const Mat& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

cplx complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    schema_error("complex entries must be [re, im] number pairs");
  return cplx(j[0].get<double>(), j[1].get<double>());
}

Vec vector_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) schema_error("expected a non-empty array");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from_json(j[i]);
  return v;
}

Mat matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) schema_error("expected a non-empty matrix");
  const std::size_t cols = j[0].size();
  Mat m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      schema_error("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

int StateSpecDocument::d() const {
  return kind == DocumentKind::fixed_n ? state.d : fockstate.d;
}

Statistics StateSpecDocument::statistics() const {
  if (kind == DocumentKind::fock) return fockstate.statistics;
  return state.sector == Sector::boson ? Statistics::boson
                                       : Statistics::fermion;
}

StateSpecDocument parse_state_spec_text(const std::string& text,
                                        double tol_proj) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse, "schema", std::string("invalid JSON: ") +
                                           e.what());
  }
  if (!j.is_object()) schema_error("top level must be an object");

  StateSpecDocument doc;
  doc.raw = j;
  const int d = require_int(j, "d");
  if (d < 1) schema_error("d must be positive");
  const Statistics stat = parse_statistics(j);

  const bool has_n = j.contains("n");
  const bool has_nmax = j.contains("n_max");
  if (has_n == has_nmax)
    schema_error("exactly one of n (fixed count) or n_max (Fock) is required");

  if (has_n) {
    const int n = require_int(j, "n");
    if (n < 1) schema_error("n must be positive");
    const std::int64_t dim = checked_pow(d, n, defaults::dim_cap);
    Vec amp = Vec::Zero(dim);

    const bool dense = j.contains("amplitudes");
    const bool terms = j.contains("terms");
    if (dense == terms)
      schema_error("exactly one of amplitudes or terms is required");
    if (dense) {
      amp = vector_from_json(j.at("amplitudes"));
      if (amp.size() != dim)
        schema_error("amplitudes must have length d^n");
    } else {
      const auto& list = j.at("terms");
      if (!list.is_array() || list.empty())
        schema_error("terms must be a non-empty array");
      for (const auto& term : list) {
        const cplx weight = complex_from_json(require_field(term, "amplitude"));
        const auto& factors = require_field(term, "factors");
        if (!factors.is_array() ||
            factors.size() != static_cast<std::size_t>(n))
          schema_error("each term needs exactly n factor vectors");
        std::vector<SingleKet> kets;
        for (const auto& f : factors) {
          Vec v = vector_from_json(f);
          if (v.size() != d) schema_error("factor vectors must have length d");
          kets.push_back(std::move(v));
        }
        try {
          amp += weight *
                 hilbert::symmetrize_product(kets, stat).amplitudes;
        } catch (const error&) {
          throw error(errc::parse, "zero_state",
                      "term annihilates under antisymmetrization "
                      "(linearly dependent fermion factors)");
        }
      }
    }

    const double norm = amp.norm();
    if (norm < 1e-12)
      throw error(errc::parse, "zero_state",
                  "state vanishes after (anti)symmetrization");
    if (std::abs(norm - 1.0) > 1e-6)
      throw error(errc::parse, "unnormalized",
                  "state norm differs from 1 beyond tolerance");
    amp /= norm;

    doc.kind = DocumentKind::fixed_n;
    doc.state = JointKet{amp, d, n, to_sector(stat)};
    // Dense input must already lie in the declared sector.
    const Mat s = hilbert::symmetrizer(d, n, stat).matrix;
    if ((s * amp - amp).norm() > 1e-6)
      throw error(errc::parse, "sector_violation",
                  "amplitudes leave the declared exchange sector");
  } else {
    const int n_max = require_int(j, "n_max");
    if (n_max < 0) schema_error("n_max must be non-negative");
    const auto& sectors = require_field(j, "sectors");
    if (!sectors.is_array() ||
        sectors.size() != static_cast<std::size_t>(n_max) + 1)
      schema_error("sectors must list n_max + 1 amplitude arrays");
    fock::FockVector psi = fock::vacuum(d, n_max, stat);
    psi.sectors[0](0) = 0.0;
    for (int nn = 0; nn <= n_max; ++nn) {
      const Vec v = vector_from_json(sectors[nn]);
      if (v.size() != psi.sectors[nn].size())
        schema_error("sector " + std::to_string(nn) +
                     " must have length d^N");
      psi.sectors[nn] = v;
    }
    if (j.value("truncated", false)) psi.truncated = true;
    try {
      fock::validate_fock(psi, 1e-6);
    } catch (const error& e) {
      throw error(errc::parse, e.tag(), e.what());
    }
    doc.kind = DocumentKind::fock;
    doc.fockstate = std::move(psi);
  }

  if (j.contains("criteria")) {
    const auto& crits = j.at("criteria");
    if (!crits.is_object()) schema_error("criteria must map names to spans");
    for (const auto& [name, span_json] : crits.items()) {
      if (!span_json.is_array() || span_json.empty())
        schema_error("criterion " + name + " must list span vectors");
      std::vector<SingleKet> span;
      for (const auto& v : span_json) {
        Vec ket = vector_from_json(v);
        if (ket.size() != d)
          schema_error("criterion " + name + " vectors must have length d");
        span.push_back(std::move(ket));
      }
      try {
        doc.criteria.emplace(name,
                             individuation::make_criterion(span, name,
                                                           tol_proj));
      } catch (const error& e) {
        throw error(errc::parse, "non_orthonormal_criteria",
                    "criterion " + name + ": " + e.what());
      }
      doc.criterion_order.push_back(name);
    }
  }
  return doc;
}

StateSpecDocument parse_state_spec(const std::string& path, double tol_proj) {
  std::ifstream in(path);
  if (!in)
    throw error(errc::parse, "missing_file",
                "cannot open state spec: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_state_spec_text(text, tol_proj);
}

} // namespace piqm::statespec

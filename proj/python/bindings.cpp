// Python bindings: thin wrappers over the joint-state machinery. States are
// passed as flat complex amplitude arrays in the lexicographic tensor basis;
// criteria as lists of orthonormal single-system vectors.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "piqm/entanglement.hpp"
#include "piqm/fock.hpp"
#include "piqm/hilbert.hpp"
#include "piqm/individuation.hpp"
#include "piqm/reduction.hpp"
#include "piqm/statespec.hpp"
#include "piqm/types.hpp"

namespace py = pybind11;
using namespace piqm;
namespace H = piqm::hilbert;
namespace I = piqm::individuation;
namespace R = piqm::reduction;
namespace E = piqm::entanglement;
namespace F = piqm::fock;
namespace S = piqm::statespec;

namespace {

Statistics stat_from_string(const std::string& s) {
  if (s == "boson") return Statistics::boson;
  if (s == "fermion") return Statistics::fermion;
  throw error(errc::parse, "schema", "statistics must be boson or fermion");
}

JointKet make_state(const Vec& amplitudes, int d, int n,
                    const std::string& statistics) {
  return JointKet{amplitudes, d, n, to_sector(stat_from_string(statistics))};
}

I::Criterion criterion_from(const std::vector<Vec>& span) {
  return I::make_criterion(span);
}

I::BlockSpec block_from(const std::vector<std::vector<Vec>>& spans,
                        const std::string& statistics) {
  std::vector<I::Criterion> crits;
  for (const auto& span : spans) crits.push_back(criterion_from(span));
  return I::make_block(crits, stat_from_string(statistics));
}

E::ChshSettings settings_from(const Eigen::Matrix<double, 4, 3>& rows) {
  E::ChshSettings s;
  s.u1 = rows.row(0);
  s.u2 = rows.row(1);
  s.v1 = rows.row(2);
  s.v2 = rows.row(3);
  return s;
}

Eigen::Matrix<double, 4, 3> settings_rows(const E::ChshSettings& s) {
  Eigen::Matrix<double, 4, 3> rows;
  rows.row(0) = s.u1;
  rows.row(1) = s.u2;
  rows.row(2) = s.v1;
  rows.row(3) = s.v2;
  return rows;
}

std::vector<Vec> fock_sectors(const F::FockVector& psi) {
  return psi.sectors;
}

F::FockVector fock_from(const std::vector<Vec>& sectors, int d,
                        const std::string& statistics) {
  const int n_max = static_cast<int>(sectors.size()) - 1;
  F::FockVector psi = F::vacuum(d, n_max, stat_from_string(statistics));
  psi.sectors = sectors;
  F::validate_fock(psi, 1e60); // shape check only; weights are caller's
  return psi;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = "1.0.0";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const error& e) {
      const std::string msg = std::string(e.tag()) + ": " + e.what();
      if (e.code() == errc::unsupported)
        PyErr_SetString(PyExc_NotImplementedError, msg.c_str());
      else if (e.code() == errc::resource)
        PyErr_SetString(PyExc_MemoryError, msg.c_str());
      else
        PyErr_SetString(PyExc_ValueError, msg.c_str());
    }
  });

  m.def(
      "symmetrize_product",
      [](const std::vector<Vec>& factors, const std::string& statistics) {
        return H::symmetrize_product(factors, stat_from_string(statistics))
            .amplitudes;
      },
      py::arg("factors"), py::arg("statistics"),
      "Normalized (anti)symmetrized product of single-system vectors.");

  m.def(
      "wedge",
      [](const Vec& phi, const Vec& chi) {
        return H::wedge(phi, chi).amplitudes;
      },
      py::arg("phi"), py::arg("chi"));

  m.def(
      "random_state",
      [](int d, int n, const std::string& statistics, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        return H::random_sector_state(d, n, stat_from_string(statistics), rng)
            .amplitudes;
      },
      py::arg("d"), py::arg("n"), py::arg("statistics"), py::arg("seed") = 0,
      "Haar-uniform pure state on the requested exchange sector.");

  m.def(
      "average_state",
      [](const Vec& amplitudes, int d, int n, const std::string& statistics) {
        return H::average_state(make_state(amplitudes, d, n, statistics))
            .matrix;
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("n"),
      py::arg("statistics"));

  m.def(
      "von_neumann_entropy",
      [](const Mat& rho) { return H::von_neumann_entropy(DensityOp{rho}); },
      py::arg("rho"), "Entropy in bits.");

  m.def(
      "block_support",
      [](const Vec& amplitudes, int d, int n, const std::string& statistics,
         const std::vector<std::vector<Vec>>& criteria) {
        return I::block_support(make_state(amplitudes, d, n, statistics),
                                block_from(criteria, statistics));
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("n"), py::arg("statistics"),
      py::arg("criteria"),
      "Weight carried by the individuation block of the given criteria.");

  m.def(
      "number_operator",
      [](const std::vector<Vec>& span, int n) {
        return R::number_operator(criterion_from(span), n).matrix;
      },
      py::arg("span"), py::arg("n"));

  m.def(
      "lift_single",
      [](const Mat& q, const std::vector<Vec>& span, int n) {
        return R::lift_single(q, criterion_from(span), n).matrix;
      },
      py::arg("q"), py::arg("span"), py::arg("n"),
      "Slot-symmetric lift of a compressed single-system operator.");

  m.def(
      "expectation_alpha",
      [](const Vec& amplitudes, int d, int n, const std::string& statistics,
         const Mat& q, const std::vector<Vec>& span) {
        return R::expectation_alpha(make_state(amplitudes, d, n, statistics),
                                    q, criterion_from(span));
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("n"), py::arg("statistics"),
      py::arg("q"), py::arg("span"));

  m.def(
      "reduced_state_alpha",
      [](const Vec& amplitudes, int d, int n, const std::string& statistics,
         const std::vector<Vec>& span) {
        const auto report = R::reduced_state_alpha(
            make_state(amplitudes, d, n, statistics), criterion_from(span));
        py::dict out;
        out["rho_alpha"] = report.rho_alpha.matrix;
        out["number_expectation"] = report.n_alpha_expectation;
        out["ubiquitous_unique"] = report.ubiquitous_unique;
        out["multi_system_average"] = report.multi_system_average;
        out["criterion_dim"] = report.criterion_dim;
        return out;
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("n"), py::arg("statistics"),
      py::arg("span"));

  m.def(
      "is_ubiquitous_unique",
      [](const Vec& amplitudes, int d, int n, const std::string& statistics,
         const std::vector<Vec>& span) {
        return R::is_ubiquitous_unique(make_state(amplitudes, d, n,
                                                  statistics),
                                       criterion_from(span));
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("n"), py::arg("statistics"),
      py::arg("span"));

  m.def(
      "anticorrelation_witness",
      [](const Vec& amplitudes, int d, const std::string& statistics,
         const Mat& a) {
        return R::anticorrelation_witness(make_state(amplitudes, d, 2,
                                                     statistics),
                                          a);
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("statistics"), py::arg("a"));

  m.def(
      "decompose",
      [](const Vec& amplitudes, int d, const std::string& statistics,
         double tol_rank) {
        const auto stat = stat_from_string(statistics);
        const JointKet psi = make_state(amplitudes, d, 2, statistics);
        const auto dec = (stat == Statistics::fermion)
                             ? E::slater_decompose_fermion(psi, tol_rank)
                             : E::takagi_decompose_boson(psi, tol_rank);
        py::dict out;
        out["rank"] = dec.rank;
        out["coefficients"] = dec.coefficients;
        out["modes"] = dec.modes;
        return out;
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("statistics"),
      py::arg("tol_rank") = defaults::tol_rank,
      "Canonical two-particle decomposition (paired modes for fermions).");

  m.def(
      "gmw_entangled",
      [](const Vec& amplitudes, int d, const std::string& statistics,
         double tol) {
        return E::gmw_entangled(make_state(amplitudes, d, 2, statistics), tol);
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("statistics"),
      py::arg("tol") = defaults::tol_rank);

  m.def(
      "gmw_measure",
      [](const Vec& amplitudes, int d, const std::string& statistics,
         double tol) {
        return E::gmw_measure(make_state(amplitudes, d, 2, statistics), tol);
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("statistics"),
      py::arg("tol") = 1e-8);

  m.def(
      "canonical_block",
      [](const Vec& amplitudes, int d, double tol_rank) {
        const auto block = E::canonical_block(
            JointKet{amplitudes, d, 2, Sector::fermion}, tol_rank);
        std::vector<std::vector<Vec>> spans;
        for (const auto& c : block.criteria) spans.push_back(c.span);
        return spans;
      },
      py::arg("amplitudes"), py::arg("d"),
      py::arg("tol_rank") = defaults::tol_rank,
      "Two-criterion block capturing a fermion pair state (mode pairing).");

  m.def(
      "chsh_value",
      [](const Vec& amplitudes, int d, const std::string& statistics,
         const std::vector<std::vector<Vec>>& spans,
         const Eigen::Matrix<double, 4, 3>& settings) {
        const auto report = E::chsh_value(
            make_state(amplitudes, d, 2, statistics), settings_from(settings),
            block_from(spans, statistics));
        py::dict out;
        out["value"] = report.value;
        out["violated"] = report.violated;
        return out;
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("statistics"),
      py::arg("criteria"), py::arg("settings"),
      "CHSH combination at the given settings (rows u1, u2, v1, v2).");

  m.def(
      "chsh_optimize",
      [](const Vec& amplitudes, int d, const std::string& statistics,
         const std::vector<std::vector<Vec>>& spans, int restarts,
         std::uint64_t seed) {
        const JointKet psi = make_state(amplitudes, d, 2, statistics);
        const auto block = spans.empty() ? E::canonical_block(psi)
                                         : block_from(spans, statistics);
        const auto report = E::chsh_optimize(psi, block, restarts, seed);
        py::dict out;
        out["value"] = report.value;
        out["violated"] = report.violated;
        out["settings"] = settings_rows(report.settings);
        return out;
      },
      py::arg("amplitudes"), py::arg("d"), py::arg("statistics"),
      py::arg("criteria") = std::vector<std::vector<Vec>>{},
      py::arg("restarts") = 16, py::arg("seed") = 0);

  m.def(
      "check_ccr",
      [](const Vec& phi, const Vec& chi, const std::string& statistics,
         int n_max) {
        return F::check_ccr(phi, chi, stat_from_string(statistics), n_max);
      },
      py::arg("phi"), py::arg("chi"), py::arg("statistics"),
      py::arg("n_max") = 2,
      "Max ladder-algebra deviation below the truncation boundary.");

  m.def(
      "create_mode",
      [](const Vec& phi, const std::vector<Vec>& sectors,
         const std::string& statistics, bool strict) {
        return fock_sectors(F::create(
            phi, fock_from(sectors, static_cast<int>(phi.size()), statistics),
            strict));
      },
      py::arg("phi"), py::arg("sectors"), py::arg("statistics"),
      py::arg("strict") = true,
      "Apply the creation operator; sectors is the list of N = 0.. arrays.");

  m.def(
      "annihilate_mode",
      [](const Vec& phi, const std::vector<Vec>& sectors,
         const std::string& statistics) {
        return fock_sectors(F::annihilate(
            phi,
            fock_from(sectors, static_cast<int>(phi.size()), statistics)));
      },
      py::arg("phi"), py::arg("sectors"), py::arg("statistics"));

  m.def(
      "parse_state_spec",
      [](const std::string& path) {
        const auto doc = S::parse_state_spec(path);
        py::dict out;
        out["d"] = doc.d();
        out["statistics"] = to_string(doc.statistics());
        if (doc.kind == S::DocumentKind::fixed_n) {
          out["kind"] = "fixed_n";
          out["n"] = doc.state.n;
          out["amplitudes"] = doc.state.amplitudes;
        } else {
          out["kind"] = "fock";
          out["n_max"] = doc.fockstate.n_max;
          out["sectors"] = doc.fockstate.sectors;
        }
        py::dict crits;
        for (const auto& name : doc.criterion_order)
          crits[py::str(name)] = doc.criteria.at(name).span;
        out["criteria"] = crits;
        return out;
      },
      py::arg("path"), "Parse a state-specification document.");
}

// Command line front end: parses state-specification documents, runs the
// analysis commands, and emits human, structured (JSON), or CSV reports.
// Exit codes: 0 success, 2 parse/schema, 3 precondition, 4 unsupported
// state, 5 resource cap.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "piqm/entanglement.hpp"
#include "piqm/fock.hpp"
#include "piqm/hilbert.hpp"
#include "piqm/individuation.hpp"
#include "piqm/reduction.hpp"
#include "piqm/statespec.hpp"
#include "piqm/types.hpp"

namespace {

using json = nlohmann::json;
using namespace piqm;
namespace H = piqm::hilbert;
namespace I = piqm::individuation;
namespace R = piqm::reduction;
namespace E = piqm::entanglement;
namespace F = piqm::fock;
namespace S = piqm::statespec;

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string spec_path;
  std::vector<std::string> criteria;
  std::string settings_path;
  std::string format = "human";
  std::uint64_t seed = 0;
  int count = 100;
  int nmax = 0; // 0: derive from the document
  int sample_d = 4;
  int sample_n = 2;
  std::string sample_stat = "fermion";
  bool strict_truncation = false;
  bool optimize = false;
  double tol_rank = defaults::tol_rank;
  double tol_proj = 1e-8;
};

// Criteria chosen via --criterion flags, else all document criteria in
// name-sorted order.
std::vector<I::Criterion> select_criteria(const S::StateSpecDocument& doc,
                                          const Options& opt) {
  std::vector<I::Criterion> out;
  if (opt.criteria.empty()) {
    for (const auto& name : doc.criterion_order)
      out.push_back(doc.criteria.at(name));
    return out;
  }
  for (const auto& name : opt.criteria) {
    const auto it = doc.criteria.find(name);
    if (it == doc.criteria.end())
      throw error(errc::parse, "unknown_criterion",
                  "document defines no criterion named " + name);
    out.push_back(it->second);
  }
  return out;
}

Statistics parse_stat_flag(const std::string& s) {
  if (s == "boson") return Statistics::boson;
  if (s == "fermion") return Statistics::fermion;
  throw error(errc::parse, "schema", "--stat must be boson or fermion");
}

E::ChshSettings load_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw error(errc::parse, "missing_file",
                "cannot open settings file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw error(errc::parse, "schema",
                std::string("invalid settings JSON: ") + e.what());
  }
  const auto axis = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 3)
      throw error(errc::parse, "schema",
                  std::string("settings need a 3-vector ") + key);
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) v(i) = j.at(key)[i].get<double>();
    return v;
  };
  E::ChshSettings s;
  s.u1 = axis("u1");
  s.u2 = axis("u2");
  s.v1 = axis("v1");
  s.v2 = axis("v2");
  return s;
}

json settings_to_json(const E::ChshSettings& s) {
  const auto vec = [](const Eigen::Vector3d& v) {
    return json::array({v(0), v(1), v(2)});
  };
  return json{{"u1", vec(s.u1)}, {"u2", vec(s.u2)}, {"v1", vec(s.v1)},
              {"v2", vec(s.v2)}};
}

// ---------------------------------------------------------------------------
// Command handlers: each returns the results object; a handler may also
// override the exit code to surface a module-level condition after the
// report is assembled (partial reports, exit 4).

struct CommandOutput {
  json results;
  int exit_code = 0;
};

CommandOutput run_analyze(const S::StateSpecDocument& doc,
                          const Options& opt) {
  json res;
  const auto crits = select_criteria(doc, opt);
  if (doc.kind == S::DocumentKind::fixed_n) {
    const JointKet& psi = doc.state;
    res["d"] = psi.d;
    res["n"] = psi.n;
    res["statistics"] = to_string(doc.statistics());
    res["norm"] = psi.amplitudes.norm();
    const Mat s = H::symmetrizer(psi.d, psi.n, doc.statistics()).matrix;
    res["sector_ok"] = (s * psi.amplitudes - psi.amplitudes).norm() < 1e-8;
    const DensityOp rho_bar = H::average_state(psi);
    res["rho_bar"] = S::to_json(rho_bar.matrix);
    res["entropy_rho_bar"] = H::von_neumann_entropy(rho_bar);
    json per;
    for (const auto& c : crits) {
      json entry;
      entry["dim"] = c.dim();
      const Mat nop = R::number_operator(c, psi.n).matrix;
      entry["number_expectation"] =
          psi.amplitudes.dot(nop * psi.amplitudes).real();
      entry["ubiquitous_unique"] = R::is_ubiquitous_unique(psi, c);
      per[c.label.empty() ? "criterion" : c.label] = entry;
    }
    res["criteria"] = per;
    if (crits.size() >= 2) {
      const auto block = I::make_block(crits, doc.statistics(), opt.tol_proj);
      res["block_support"] = I::block_support(psi, block);
    }
  } else {
    const F::FockVector& psi = doc.fockstate;
    res["d"] = psi.d;
    res["n_max"] = psi.n_max;
    res["statistics"] = to_string(psi.statistics);
    res["norm"] = psi.norm();
    res["truncated"] = psi.truncated;
    json weights = json::array();
    for (const Vec& sec : psi.sectors) weights.push_back(sec.squaredNorm());
    res["sector_weights"] = weights;
    json per;
    for (const auto& c : crits) {
      json entry;
      entry["dim"] = c.dim();
      const auto nop = F::number_alpha_fock(c, psi.n_max);
      entry["number_expectation"] = F::inner(psi, nop.apply(psi)).real();
      per[c.label.empty() ? "criterion" : c.label] = entry;
    }
    res["criteria"] = per;
  }
  return {res, 0};
}

CommandOutput run_reduce(const S::StateSpecDocument& doc, const Options& opt) {
  const auto crits = select_criteria(doc, opt);
  if (crits.empty())
    throw error(errc::parse, "no_criteria",
                "reduce needs at least one criterion (document or flag)");
  json res;
  json per;
  for (const auto& c : crits) {
    json entry;
    entry["dim"] = c.dim();
    if (doc.kind == S::DocumentKind::fixed_n) {
      const auto report = R::reduced_state_alpha(doc.state, c);
      entry["rho_alpha"] = S::to_json(report.rho_alpha.matrix);
      entry["number_expectation"] = report.n_alpha_expectation;
      entry["ubiquitous_unique"] = report.ubiquitous_unique;
      entry["multi_system_average"] = report.multi_system_average;
      entry["entropy"] = H::von_neumann_entropy(report.rho_alpha);
    } else {
      const DensityOp rho = F::fock_reduced_state_alpha(doc.fockstate, c);
      entry["rho_alpha"] = S::to_json(rho.matrix);
      const auto nop = F::number_alpha_fock(c, doc.fockstate.n_max);
      entry["number_expectation"] =
          F::inner(doc.fockstate, nop.apply(doc.fockstate)).real();
      entry["entropy"] = H::von_neumann_entropy(rho);
    }
    per[c.label.empty() ? "criterion" : c.label] = entry;
  }
  res["criteria"] = per;
  return {res, 0};
}

CommandOutput run_entangle(const S::StateSpecDocument& doc,
                           const Options& opt) {
  if (doc.kind != S::DocumentKind::fixed_n)
    throw error(errc::precondition, "bad_particle_count",
                "entanglement analysis needs a fixed two-particle state");
  const JointKet& psi = doc.state;
  json res;
  const auto dec = (doc.statistics() == Statistics::fermion)
                       ? E::slater_decompose_fermion(psi, opt.tol_rank)
                       : E::takagi_decompose_boson(psi, opt.tol_rank);
  res["statistics"] = to_string(doc.statistics());
  res["rank"] = dec.rank;
  json coeffs = json::array();
  for (const auto& z : dec.coefficients) coeffs.push_back(std::abs(z));
  res["coefficients"] = coeffs;
  res["gmw_entangled"] = E::gmw_entangled(psi, opt.tol_rank);

  json projectors = json::array();
  for (const auto& c : E::complete_property_projectors(psi))
    projectors.push_back(S::to_json(c.projector));
  res["complete_property_projectors"] = projectors;

  int exit_code = 0;
  try {
    res["measure"] = E::gmw_measure(psi);
  } catch (const error& e) {
    // Boson state outside every individuation block: partial report.
    res["measure"] = nullptr;
    res["measure_unavailable_reason"] = e.what();
    exit_code = static_cast<int>(e.code());
  }
  if (doc.statistics() == Statistics::fermion) {
    const auto block = E::canonical_block(psi, opt.tol_rank);
    json dims = json::array();
    for (const auto& c : block.criteria) dims.push_back(c.dim());
    res["canonical_block_dims"] = dims;
    res["block_choice_count"] =
        E::enumerate_block_choices(psi, opt.tol_rank).size();
  }
  return {res, exit_code};
}

CommandOutput run_chsh(const S::StateSpecDocument& doc, const Options& opt) {
  if (doc.kind != S::DocumentKind::fixed_n)
    throw error(errc::precondition, "bad_particle_count",
                "CHSH analysis needs a fixed two-particle state");
  const JointKet& psi = doc.state;
  const auto named = select_criteria(doc, opt);
  I::BlockSpec block =
      (named.size() >= 2)
          ? I::make_block({named[0], named[1]}, doc.statistics(), opt.tol_proj)
          : E::canonical_block(psi, opt.tol_rank);
  json res;
  res["block_dims"] =
      json::array({block.criteria[0].dim(), block.criteria[1].dim()});
  res["correlation_matrix"] = [&] {
    const Eigen::Matrix3d t = E::correlation_matrix(psi, block);
    json rows = json::array();
    for (int r = 0; r < 3; ++r)
      rows.push_back(json::array({t(r, 0), t(r, 1), t(r, 2)}));
    return rows;
  }();

  if (!opt.settings_path.empty()) {
    const auto settings = load_settings(opt.settings_path);
    const auto report = E::chsh_value(psi, settings, block);
    res["value"] = report.value;
    res["violated"] = report.violated;
    res["settings"] = settings_to_json(report.settings);
  }
  if (opt.optimize || opt.settings_path.empty()) {
    const auto best = E::chsh_optimize(psi, block, 16, opt.seed);
    res["optimized_value"] = best.value;
    res["optimized_violated"] = best.violated;
    res["optimized_settings"] = settings_to_json(best.settings);
  }
  return {res, 0};
}

CommandOutput run_fock(const S::StateSpecDocument& doc, const Options& opt) {
  const int d = doc.d();
  const Statistics stat = doc.statistics();
  json res;

  std::mt19937_64 rng(opt.seed);
  double worst_ccr = 0.0;
  const int ccr_nmax = 2;
  {
    Vec e0 = Vec::Zero(d);
    e0(0) = 1.0;
    worst_ccr = std::max(worst_ccr, F::check_ccr(e0, e0, stat, ccr_nmax));
    if (d > 1) {
      Vec e1 = Vec::Zero(d);
      e1(1) = 1.0;
      worst_ccr = std::max(worst_ccr, F::check_ccr(e0, e1, stat, ccr_nmax));
    }
    for (int t = 0; t < 2; ++t) {
      const SingleKet phi = H::random_single_ket(d, rng);
      const SingleKet chi = H::random_single_ket(d, rng);
      worst_ccr = std::max(worst_ccr, F::check_ccr(phi, chi, stat, ccr_nmax));
    }
  }
  res["ccr_max_deviation"] = worst_ccr;

  const auto crits = select_criteria(doc, opt);
  if (doc.kind == S::DocumentKind::fixed_n) {
    const int n_max = std::max({doc.state.n, opt.nmax, 2});
    const auto psi = F::embed_sector(doc.state, n_max);
    json cross;
    double worst_exp = 0.0, worst_rho = 0.0;
    for (const auto& c : crits) {
      json entry;
      try {
        const DensityOp fixed_rho = R::reduced_state_alpha(doc.state, c)
                                        .rho_alpha;
        const DensityOp fock_rho = F::fock_reduced_state_alpha(psi, c);
        const double drho =
            (fixed_rho.matrix - fock_rho.matrix).cwiseAbs().maxCoeff();
        worst_rho = std::max(worst_rho, drho);
        double dexp = 0.0;
        for (int t = 0; t < 3; ++t) {
          const Mat q = H::random_hermitian(d, rng);
          dexp = std::max(dexp,
                          std::abs(F::fock_expectation_alpha(psi, q, c) -
                                   R::expectation_alpha(doc.state, q, c)));
        }
        worst_exp = std::max(worst_exp, dexp);
        entry["reduced_state_deviation"] = drho;
        entry["expectation_deviation"] = dexp;
      } catch (const error& e) {
        entry["skipped"] = e.tag(); // e.g. unoccupied criterion
      }
      cross[c.label.empty() ? "criterion" : c.label] = entry;
    }
    res["cross_checks"] = cross;
    res["cross_check_max_deviation"] = std::max(worst_exp, worst_rho);
    res["n_max"] = n_max;

    // Truncation probe: raise a mode out of the state. When the document
    // occupies the top sector this overflows: strict mode propagates the
    // error, lenient mode drops the amplitude and flags it.
    Vec e0 = Vec::Zero(d);
    e0(0) = 1.0;
    const auto raised = F::create(e0, psi, opt.strict_truncation);
    res["truncation_probe_dropped"] = raised.truncated;
  } else {
    const F::FockVector& psi = doc.fockstate;
    json per;
    for (const auto& c : crits) {
      json entry;
      const auto nop = F::number_alpha_fock(c, psi.n_max);
      entry["number_expectation"] = F::inner(psi, nop.apply(psi)).real();
      try {
        entry["rho_alpha"] =
            S::to_json(F::fock_reduced_state_alpha(psi, c).matrix);
      } catch (const error& e) {
        entry["skipped"] = e.tag();
      }
      per[c.label.empty() ? "criterion" : c.label] = entry;
    }
    res["criteria"] = per;
    res["n_max"] = psi.n_max;
  }
  return {res, 0};
}

CommandOutput run_sample(const Options& opt) {
  const Statistics stat = parse_stat_flag(opt.sample_stat);
  const int d = opt.sample_d;
  const int n = opt.sample_n;
  if (n != 2)
    throw error(errc::precondition, "bad_particle_count",
                "the sampling suite covers two-particle states");
  std::mt19937_64 rng(opt.seed);
  const double tsirelson = 2.0 * std::sqrt(2.0);
  json trials = json::array();
  int failures = 0;
  for (int t = 0; t < opt.count; ++t) {
    const JointKet psi = H::random_sector_state(d, n, stat, rng);
    json row;
    row["trial"] = t;
    bool ok = true;
    try {
      const auto dec = (stat == Statistics::fermion)
                           ? E::slater_decompose_fermion(psi, opt.tol_rank)
                           : E::takagi_decompose_boson(psi, opt.tol_rank);
      const double residual =
          (E::reconstruct_state(dec, d).amplitudes - psi.amplitudes).norm();
      row["rank"] = dec.rank;
      row["residual"] = residual;
      ok = ok && residual < 1e-8;
      row["gmw_entangled"] = E::gmw_entangled(psi, opt.tol_rank);

      const double entropy = H::von_neumann_entropy(H::average_state(psi));
      row["entropy_rho_bar"] = entropy;

      if (stat == Statistics::fermion) {
        const auto block = E::canonical_block(psi, opt.tol_rank);
        const double support = I::block_support(psi, block);
        row["block_support"] = support;
        ok = ok && std::abs(support - 1.0) < 1e-8;

        const double measure = E::gmw_measure(psi);
        row["measure"] = measure;
        ok = ok && measure > -1e-10 && entropy >= 1.0 - 1e-9 &&
             std::abs(entropy - 1.0 - measure) < 1e-9;

        if (block.criteria[0].dim() == 2 && block.criteria[1].dim() == 2) {
          const double chsh = E::chsh_optimize(psi, block, 16, opt.seed).value;
          row["chsh"] = chsh;
          ok = ok && chsh <= tsirelson + 1e-6;
          ok = ok && (measure <= 0.01 || chsh > 2.0);
        } else {
          row["chsh"] = nullptr;
        }
      } else {
        try {
          row["measure"] = E::gmw_measure(psi);
        } catch (const error&) {
          row["measure"] = nullptr; // outside every individuation block
        }
        row["chsh"] = nullptr;
      }
    } catch (const error& e) {
      row["error"] = e.tag();
      ok = false;
    }
    row["ok"] = ok;
    if (!ok) ++failures;
    trials.push_back(row);
  }
  json res;
  res["trials"] = trials;
  res["count"] = opt.count;
  res["failures"] = failures;
  res["d"] = d;
  res["statistics"] = to_string(stat);
  return {res, 0};
}

// ---------------------------------------------------------------------------
// Emission.

void human_value(std::ostream& os, const std::string& key, const json& v,
                 int indent) {
  const std::string pad(indent, ' ');
  if (v.is_object()) {
    os << pad << key << ":\n";
    for (const auto& [k, sub] : v.items()) human_value(os, k, sub, indent + 2);
  } else if (v.is_array() && !v.empty() && v[0].is_array()) {
    os << pad << key << ":\n";
    for (const auto& row : v) os << pad << "  " << row.dump() << "\n";
  } else {
    os << pad << key << ": " << v.dump() << "\n";
  }
}

void flatten_scalars(const json& j, const std::string& prefix,
                     std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items())
      flatten_scalars(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (!j.is_array()) {
    out.emplace_back(prefix, j.dump());
  }
}

void emit(const json& report, const Options& opt) {
  if (opt.format == "structured") {
    std::cout << report.dump(2) << "\n";
    return;
  }
  const json& res = report.at("results");
  if (opt.format == "csv") {
    if (res.contains("trials")) {
      const char* cols[] = {"trial",   "rank",    "residual",
                            "measure", "chsh",    "entropy_rho_bar",
                            "block_support", "gmw_entangled", "ok"};
      for (std::size_t i = 0; i < std::size(cols); ++i)
        std::cout << cols[i] << (i + 1 < std::size(cols) ? "," : "\n");
      for (const auto& row : res.at("trials")) {
        for (std::size_t i = 0; i < std::size(cols); ++i) {
          const auto it = row.find(cols[i]);
          std::cout << (it != row.end() ? it->dump() : "")
                    << (i + 1 < std::size(cols) ? "," : "\n");
        }
      }
    } else {
      std::vector<std::pair<std::string, std::string>> rows;
      flatten_scalars(res, "", rows);
      std::cout << "key,value\n";
      for (const auto& [k, v] : rows) std::cout << k << "," << v << "\n";
    }
    return;
  }
  std::cout << report.at("tool").get<std::string>() << " "
            << report.at("version").get<std::string>() << " | "
            << report.at("command").get<std::string>() << "\n";
  for (const auto& [k, v] : res.items()) {
    if (k == "trials") {
      std::cout << "trials: " << v.size() << " (see csv/structured)\n";
      continue;
    }
    human_value(std::cout, k, v, 0);
  }
}

} // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Permutation-invariant joint-state analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("piqm ") + kVersion);

  const auto add_common = [&](CLI::App* sub, bool needs_spec) {
    if (needs_spec)
      sub->add_option("spec", opt.spec_path, "state specification file")
          ->required();
    sub->add_option("--criterion", opt.criteria,
                    "named criterion from the document (repeatable)");
    sub->add_option("--format", opt.format, "human | structured | csv")
        ->check(CLI::IsMember({"human", "structured", "csv"}));
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--tol-rank", opt.tol_rank, "rank cutoff tolerance");
    sub->add_option("--tol-proj", opt.tol_proj, "projector tolerance");
    return sub;
  };

  auto* analyze = add_common(app.add_subcommand("analyze",
                                                "sector check, average state, "
                                                "entropy, block support"),
                             true);
  auto* reduce = add_common(app.add_subcommand("reduce",
                                               "reduced state per criterion"),
                            true);
  auto* entangle =
      add_common(app.add_subcommand("entangle",
                                    "canonical decomposition, entanglement "
                                    "flag and measure"),
                 true);
  auto* chsh = add_common(app.add_subcommand("chsh",
                                             "Bell correlation analysis"),
                          true);
  chsh->add_option("--settings", opt.settings_path,
                   "measurement settings file");
  chsh->add_flag("--optimize", opt.optimize,
                 "run the ascent even when settings are given");
  auto* fockcmd = add_common(app.add_subcommand("fock",
                                                "ladder-operator checks and "
                                                "cross-module comparisons"),
                             true);
  fockcmd->add_option("--nmax", opt.nmax, "truncation boundary");
  fockcmd->add_flag("--strict-truncation", opt.strict_truncation,
                    "error instead of dropping amplitude at N_max");
  auto* sample = add_common(app.add_subcommand("sample",
                                               "Monte-Carlo property suite"),
                            false);
  sample->add_option("--count", opt.count, "number of sampled states");
  sample->add_option("--d", opt.sample_d, "single-system dimension");
  sample->add_option("--n", opt.sample_n, "particle number");
  sample->add_option("--stat", opt.sample_stat, "boson | fermion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2; // usage/parse problems share the schema bucket
  }

  try {
    json report;
    report["tool"] = "piqm";
    report["version"] = kVersion;
    report["seed"] = opt.seed;
    CommandOutput out;
    if (app.got_subcommand(sample)) {
      report["command"] = "sample";
      report["input"] = {{"d", opt.sample_d},
                         {"n", opt.sample_n},
                         {"statistics", opt.sample_stat},
                         {"count", opt.count}};
      out = run_sample(opt);
    } else {
      const auto doc = S::parse_state_spec(opt.spec_path, opt.tol_proj);
      report["input"] = {{"path", opt.spec_path}, {"document", doc.raw}};
      if (app.got_subcommand(analyze)) {
        report["command"] = "analyze";
        out = run_analyze(doc, opt);
      } else if (app.got_subcommand(reduce)) {
        report["command"] = "reduce";
        out = run_reduce(doc, opt);
      } else if (app.got_subcommand(entangle)) {
        report["command"] = "entangle";
        out = run_entangle(doc, opt);
      } else if (app.got_subcommand(chsh)) {
        report["command"] = "chsh";
        out = run_chsh(doc, opt);
      } else {
        report["command"] = "fock";
        out = run_fock(doc, opt);
      }
    }
    report["results"] = out.results;
    emit(report, opt);
    return out.exit_code;
  } catch (const error& e) {
    std::cerr << "error [" << e.tag() << "]: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#include "sid/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sid/acceptance.hpp"
#include "sid/commutant.hpp"
#include "sid/error.hpp"
#include "sid/generator.hpp"
#include "sid/jordan_si.hpp"
#include "sid/sid_engine.hpp"

namespace sid {

namespace {

struct CommandName {
  Command command;
  const char* name;
  const char* help;
};

constexpr CommandName kCommands[] = {
    {Command::CheckSI, "check-si", "test every fiber of T for strong irreducibility"},
    {Command::Commutant, "commutant", "basis and dimension of the commutant {T}'"},
    {Command::Canonicalize, "canonicalize", "conjugate an idempotent of M_m({T}') to a diagonal projection"},
    {Command::AlignFamily, "align-family", "align a commuting family of idempotents to the standard one"},
    {Command::K0, "k0", "K0 descriptor of {T}', or the class of one idempotent"},
    {Command::Uniqueness, "uniqueness", "decide whether the SI decomposition is unique up to similarity"},
    {Command::Generate, "generate", "write a seeded random instance with ground truth"},
    {Command::Selftest, "selftest", "run the acceptance criteria"},
};

Json tolerances_json(const Tolerances& t) {
  return {{"diag", t.diag},       {"sing", t.sing},       {"zero", t.zero},
          {"eig", t.eig},         {"spec", t.spec},       {"null", t.null},
          {"rank", t.rank},       {"idem", t.idem},       {"commute", t.commute},
          {"kappa_max", t.kappa_max}, {"integer_gate", t.integer_gate}, {"max_dim", t.max_dim}};
}

Json config_json(const RunConfig& c) {
  Json j = {{"input", c.input_path}, {"output", c.output_path}, {"tolerances", tolerances_json(c.tol)}};
  if (c.seed) j["seed"] = *c.seed;
  switch (c.command) {
    case Command::Canonicalize:
      j["operator"] = c.operator_name;
      j["idempotent"] = c.idempotent;
      if (c.m) j["m"] = *c.m;
      break;
    case Command::AlignFamily:
      j["operator"] = c.operator_name;
      j["family"] = c.family;
      if (!c.onto.empty()) j["onto"] = c.onto;
      break;
    case Command::K0:
      j["operator"] = c.operator_name;
      if (!c.idempotent.empty()) j["idempotent"] = c.idempotent;
      break;
    case Command::Commutant:
      j["operator"] = c.operator_name;
      j["full_solve"] = c.full_solve;
      break;
    case Command::Generate:
      j["n"] = c.n;
      j["m"] = c.gen_m;
      j["atoms"] = c.atoms;
      j["pattern"] = c.pattern;
      break;
    default:
      j["operator"] = c.operator_name;
  }
  return j;
}

const std::string& label(const MatrixField& f, std::size_t i) { return f.space()->atom(i).label; }

Json per_atom_values(const MatrixField& f, const std::vector<double>& v) {
  Json out = Json::object();
  for (std::size_t i : f.finite_atoms()) out[label(f, i)] = v.at(i);
  return out;
}

Json certificate_json(const SimilarityCertificate& c) {
  Json log = Json::array();
  for (const LogEntry& e : c.construction_log)
    log.push_back({{"name", e.name}, {"note", e.note}, {"factor", field_to_json(e.factor)}});
  return {{"x", field_to_json(c.x)},
          {"x_inv", field_to_json(c.x_inv)},
          {"condition", per_atom_values(c.x, c.condition)},
          {"construction_log", std::move(log)}};
}

Json rank_profile_json(const MatrixField& f, const RankProfile& p) {
  Json per = Json::object();
  for (std::size_t i : f.finite_atoms()) per[label(f, i)] = *p.per_atom[i];
  Json part = Json::object();
  for (const auto& [r, atoms] : p.value_partition) {
    Json names = Json::array();
    for (std::size_t i : atoms) names.push_back(label(f, i));
    part[std::to_string(r)] = std::move(names);
  }
  return {{"per_atom", std::move(per)}, {"is_constant", p.is_constant}, {"value_partition", std::move(part)}};
}

Json k0_class_json(const K0Class& c) {
  Json pts = Json::array();
  for (std::size_t k = 0; k < c.support.size(); ++k)
    pts.push_back({{"phi", complex_to_json(c.support[k])}, {"value", c.values[k]}});
  return {{"values", std::move(pts)}};
}

Json k0_descriptor_json(const K0Descriptor& d) {
  Json support = Json::array();
  for (std::size_t k = 0; k < d.spectrum_support.size(); ++k)
    support.push_back({{"phi", complex_to_json(d.spectrum_support[k])}, {"fiber_dim", d.point_dimensions[k]}});
  Json zero = Json::array();
  for (const ZeroContribution& z : d.zero_contributions) {
    Json e = {{"atom", z.atom}, {"contribution", "0"}};
    e["class"] = z.dimension_class ? Json(*z.dimension_class) : Json("Λ_∞");
    if (z.phi) e["phi"] = complex_to_json(*z.phi);
    zero.push_back(std::move(e));
  }
  return {{"group", d.shape()},
          {"rank", d.rank()},
          {"spectrum_support", std::move(support)},
          {"generators", "indicator of each support point"},
          {"zero_contributions", std::move(zero)}};
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::string> resolve_family(const Document& doc, const std::string& spec) {
  if (spec.empty()) throw Error(ErrorKind::InvalidInput, "--family is required");
  if (doc.families.count(spec)) return doc.family(spec);
  return split_names(spec);
}

const MatrixField& operator_field(const Document& doc, const RunConfig& c) {
  const MatrixField& t = doc.field(c.operator_name);
  if (t.space()->amplification() != 1)
    throw Error(ErrorKind::DimensionMismatch, "operator blocks must match the fiber dimensions");
  return t;
}

std::vector<IdempotentField> load_family(const Document& doc, const MatrixField& t,
                                         const std::vector<std::string>& names, const Tolerances& tol) {
  std::vector<IdempotentField> out;
  for (const std::string& n : names) out.push_back(IdempotentField::make(doc.field(n), t, tol));
  return out;
}

struct Outcome {
  Json results;
  Json residuals = Json::object();
  int exit_code = 0;
};

Outcome do_check_si(const Document& doc, const RunConfig& c) {
  const MatrixField& t = operator_field(doc, c);
  const SITriangularForm form = validate_si_form(t, c.tol);
  const SIVerdict v = si_test_superdiagonal(form, c.tol);
  Outcome o;
  Json atoms = Json::array();
  double jordan_res = 0.0, witness_idem = 0.0, witness_comm = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    Json a = {{"atom", label(t, i)}};
    if (!t.has_block(i)) {
      a["si"] = nullptr;
      a["note"] = "symbolic infinite fiber";
      atoms.push_back(std::move(a));
      continue;
    }
    const Matrix& b = t.block(i);
    double min_super = b.rows() > 1 ? std::abs(b(0, 1)) : 0.0;
    for (Eigen::Index k = 1; k + 1 < b.rows(); ++k) min_super = std::min(min_super, std::abs(b(k, k + 1)));
    a["si"] = *v.per_atom[i];
    a["phi"] = complex_to_json(*form.diagonal[i]);
    if (b.rows() > 1) a["min_superdiagonal"] = min_super;
    if (*v.per_atom[i]) {
      const JordanReport jr = jordan_similarity(b, c.tol);
      a["jordan_residual"] = jr.residual;
      jordan_res = std::max(jordan_res, jr.residual);
    } else {
      const Matrix& w = v.witnesses.at(i);
      a["witness"] = matrix_to_json(w);
      const double idem = (w * w - w).norm();
      const double comm = (b * w - w * b).norm();
      a["witness_idempotency_residual"] = idem;
      a["witness_commutation_residual"] = comm;
      witness_idem = std::max(witness_idem, idem);
      witness_comm = std::max(witness_comm, comm);
    }
    atoms.push_back(std::move(a));
  }
  o.results = {{"strongly_irreducible", v.overall}, {"atoms", std::move(atoms)}};
  o.residuals = {{"jordan_similarity", jordan_res},
                 {"witness_idempotency", witness_idem},
                 {"witness_commutation", witness_comm}};
  o.exit_code = v.overall ? 0 : 1;
  return o;
}

Outcome do_commutant(const Document& doc, const RunConfig& c) {
  const MatrixField& t = operator_field(doc, c);
  const CommutantStructure s = field_commutant_structure(t, c.tol, c.full_solve);
  Outcome o;
  Json classes = Json::array();
  double res = 0.0;
  for (const ClassCommutant& cc : s.classes) {
    Json atoms = Json::array();
    for (std::size_t i : cc.spectral.atoms) atoms.push_back(label(t, i));
    Json groups = Json::array();
    for (const IdenticalGroup& g : cc.groups) {
      Json ga = Json::array();
      for (std::size_t i : g.atoms) ga.push_back(label(t, i));
      groups.push_back({{"atoms", std::move(ga)},
                        {"fiber_dimension", g.fiber.dimension()},
                        {"coupled_dimension", g.coupled_dimension()},
                        {"sylvester_residual", g.fiber.max_residual}});
      res = std::max(res, g.fiber.max_residual);
    }
    Json e = {{"phi", complex_to_json(cc.spectral.phi)},
              {"atoms", std::move(atoms)},
              {"groups", std::move(groups)},
              {"predicted_dimension", cc.predicted_dimension()},
              {"coupling_omitted", cc.coupling_omitted()}};
    if (cc.full_dimension) e["full_dimension"] = *cc.full_dimension;
    classes.push_back(std::move(e));
  }
  o.results = {{"spectral_classes", std::move(classes)}, {"total_dimension", s.total_dimension()}};
  o.residuals = {{"sylvester", res}};
  return o;
}

Outcome do_canonicalize(const Document& doc, const RunConfig& c) {
  const MatrixField& t = operator_field(doc, c);
  if (c.idempotent.empty()) throw Error(ErrorKind::InvalidInput, "--idempotent is required");
  const IdempotentField q = IdempotentField::make(doc.field(c.idempotent), t, c.tol);
  if (c.m && *c.m != q.m)
    throw Error(ErrorKind::DimensionMismatch,
                "idempotent is over T^(" + std::to_string(q.m) + "), not T^(" + std::to_string(*c.m) + ")");
  const RankProfile profile = rank_profile(q, c.tol);
  const Canonicalization can = canonicalize_in_commutant(q, c.tol);
  Outcome o;
  o.results = {{"m", q.m},
               {"projection", field_to_json(can.projection.field)},
               {"rank_profile", rank_profile_json(q.field, profile)},
               {"certificate", certificate_json(can.certificate)}};
  o.residuals = {{"conjugation", can.residual},
                 {"commutation", can.certificate.commutation_residual},
                 {"inverse", can.certificate.inverse_residual}};
  return o;
}

Outcome do_align(const Document& doc, const RunConfig& c) {
  const MatrixField& t = operator_field(doc, c);
  const auto family = load_family(doc, t, resolve_family(doc, c.family), c.tol);
  const Alignment a = align_family(family, c.tol);
  Outcome o;
  Json minimal = Json::array();
  for (const IdempotentField& q : a.minimal) minimal.push_back(field_to_json(q.field));
  o.results = {{"m", family.front().m},
               {"minimal_family", std::move(minimal)},
               {"certificate", certificate_json(a.certificate)}};
  o.residuals = {{"alignment", a.residual},
                 {"commutation", a.certificate.commutation_residual},
                 {"inverse", a.certificate.inverse_residual}};
  if (!c.onto.empty()) {
    const auto onto = load_family(doc, t, resolve_family(doc, c.onto), c.tol);
    const FamilyMap map = map_family_onto(family, onto, c.tol);
    o.results["map_onto"] = certificate_json(map.certificate);
    o.residuals["map_onto"] = map.residual;
    o.residuals["map_commutation"] = map.certificate.commutation_residual;
  }
  return o;
}

Outcome do_k0(const Document& doc, const RunConfig& c) {
  const MatrixField& t = operator_field(doc, c);
  Outcome o;
  if (c.idempotent.empty()) {
    o.results = {{"descriptor", k0_descriptor_json(k0_descriptor(t, c.tol))}};
    return o;
  }
  const IdempotentField q = IdempotentField::make(doc.field(c.idempotent), t, c.tol);
  const K0Class cls = trace_class(q, c.tol);
  o.results = {{"class", k0_class_json(cls)}, {"m", q.m}};
  o.residuals = {{"integer_rounding", cls.max_rounding}};
  return o;
}

Outcome do_uniqueness(const Document& doc, const RunConfig& c) {
  const MatrixField& t = operator_field(doc, c);
  const UniquenessVerdict v = decide_uniqueness(t, c.tol);
  Outcome o;
  Json reasons = Json::array();
  for (const ClassReason& r : v.reasons)
    reasons.push_back({{"class", r.dim ? Json(*r.dim) : Json("Λ_∞")}, {"simple", r.simple}, {"reason", r.reason}});
  Json table = Json::array();
  for (const ClassProfile& cp : v.profile.per_class) {
    Json pts = Json::array();
    for (const PointMultiplicity& pm : cp.points) {
      Json atoms = Json::array();
      for (std::size_t i : pm.atoms) atoms.push_back(label(t, i));
      pts.push_back({{"phi", pm.phi ? complex_to_json(*pm.phi) : Json(nullptr)},
                     {"multiplicity", pm.multiplicity ? Json(*pm.multiplicity) : Json("inf")},
                     {"atoms", std::move(atoms)}});
    }
    table.push_back({{"class", cp.dim ? Json(*cp.dim) : Json("Λ_∞")},
                     {"simple", cp.is_simple},
                     {"points", std::move(pts)}});
  }
  o.results = {{"unique", v.unique},
               {"reasons", std::move(reasons)},
               {"multiplicity", std::move(table)},
               {"k0", k0_descriptor_json(v.k0)},
               {"k0_consistent", v.k0_consistent}};
  o.exit_code = v.unique ? 0 : 1;
  return o;
}

Outcome do_selftest(const RunConfig& c) {
  const std::uint64_t seed = c.seed.value_or(kAcceptanceSeed);
  const auto results = run_acceptance(seed, c.tol, [](const CriterionResult& r) {
    std::cerr << format_line(r) << std::endl;
  });
  Outcome o;
  Json crit = Json::array();
  bool all = true;
  for (const CriterionResult& r : results) {
    all = all && r.passed;
    crit.push_back({{"id", r.id},
                    {"name", r.name},
                    {"passed", r.passed},
                    {"detail", r.detail},
                    {"seconds", r.seconds},
                    {"metrics", r.metrics}});
  }
  o.results = {{"seed", seed}, {"all_passed", all}, {"criteria", std::move(crit)}};
  o.exit_code = all ? 0 : 1;
  return o;
}

}  // namespace

std::string to_string(Command c) {
  for (const auto& e : kCommands)
    if (e.command == c) return e.name;
  return "unknown";
}

std::optional<Command> parse_command(const std::string& name) {
  for (const auto& e : kCommands)
    if (name == e.name) return e.command;
  return std::nullopt;
}

RunResult run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Json report = {{"schema", kReportSchema}, {"command", to_string(config.command)}, {"config", config_json(config)}};
  RunResult out;
  try {
    if (config.command == Command::Generate) {
      GeneratorConfig g{config.seed.value_or(0), config.n, config.gen_m, config.atoms, config.pattern};
      out.report = generate_instance(g, config.tol);
      return out;
    }
    Outcome o;
    if (config.command == Command::Selftest) {
      o = do_selftest(config);
    } else {
      if (config.input_path.empty()) throw Error(ErrorKind::InvalidInput, "an input document is required");
      const Document doc = load_document(config.input_path);
      switch (config.command) {
        case Command::CheckSI: o = do_check_si(doc, config); break;
        case Command::Commutant: o = do_commutant(doc, config); break;
        case Command::Canonicalize: o = do_canonicalize(doc, config); break;
        case Command::AlignFamily: o = do_align(doc, config); break;
        case Command::K0: o = do_k0(doc, config); break;
        case Command::Uniqueness: o = do_uniqueness(doc, config); break;
        default: throw Error(ErrorKind::InvalidInput, "unsupported command");
      }
    }
    report["results"] = std::move(o.results);
    report["residuals"] = std::move(o.residuals);
    out.exit_code = o.exit_code;
  } catch (const Error& e) {
    Json err = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    if (!e.atom().empty()) err["atom"] = e.atom();
    if (e.value() != 0.0) err["value"] = e.value();
    report["error"] = std::move(err);
    out.exit_code = 2;
  } catch (const std::exception& e) {
    report["error"] = {{"kind", "Internal"}, {"message", e.what()}};
    out.exit_code = 2;
  }
  report["timing_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out.report = std::move(report);
  return out;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Strongly irreducible decompositions of atomic direct integrals"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env = std::getenv("SID_MAX_DIM")) {
    try {
      cfg.tol.max_dim = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed SID_MAX_DIM\n";
    }
  }
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input) sub->add_option("input", cfg.input_path, "input document (JSON)")->required();
    sub->add_option("--out,--report", cfg.output_path, "write the report here instead of stdout");
    sub->add_option("--seed", seed, "64-bit seed");
    auto pos = CLI::PositiveNumber;
    sub->add_option("--tol-zero", cfg.tol.zero, "superdiagonal zero threshold")->check(pos);
    sub->add_option("--tol-spec", cfg.tol.spec, "spectral clustering threshold")->check(pos);
    sub->add_option("--tol-rank", cfg.tol.rank, "numerical rank threshold")->check(pos);
    sub->add_option("--tol-idem", cfg.tol.idem, "idempotency threshold")->check(pos);
    sub->add_option("--kappa-max", cfg.tol.kappa_max, "certificate conditioning cap")->check(pos);
  };

  for (const auto& e : kCommands) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    const Command cmd = e.command;
    add_common(sub, cmd != Command::Generate && cmd != Command::Selftest);
    if (cmd != Command::Generate && cmd != Command::Selftest)
      sub->add_option("--operator", cfg.operator_name, "field holding T")->capture_default_str();
    switch (cmd) {
      case Command::Commutant:
        sub->add_flag("--full-solve", cfg.full_solve, "solve the coupled system within each spectral class");
        break;
      case Command::Canonicalize:
        sub->add_option("--idempotent", cfg.idempotent, "field holding Q")->required();
        sub->add_option("--m", cfg.m, "expected amplification");
        break;
      case Command::AlignFamily:
        sub->add_option("--family", cfg.family, "family name or comma-separated fields")->required();
        sub->add_option("--onto", cfg.onto, "second family to map onto");
        break;
      case Command::K0:
        sub->add_option("--idempotent", cfg.idempotent, "field holding an idempotent");
        break;
      case Command::Generate:
        sub->add_option("--n", cfg.n, "fiber dimension")->capture_default_str();
        sub->add_option("--m", cfg.gen_m, "amplification for seeded idempotents")->capture_default_str();
        sub->add_option("--atoms", cfg.atoms, "number of simple atoms without a pattern")->capture_default_str();
        sub->add_option("--pattern", cfg.pattern, "multiplicity pattern, e.g. 2:1,2;3:inf");
        break;
      default:
        break;
    }
    sub->callback([&cfg, cmd] { cfg.command = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  for (CLI::App* sub : app.get_subcommands())
    if (sub->count("--seed")) cfg.seed = seed;

  const RunResult r = run(cfg);
  const std::string text = r.report.dump(2);
  if (cfg.output_path.empty()) {
    std::cout << text << '\n';
  } else {
    try {
      write_json_file(cfg.output_path, r.report);
    } catch (const Error& e) {
      std::cerr << e.what() << '\n';
      return 2;
    }
  }
  return r.exit_code;
}

}  // namespace sid

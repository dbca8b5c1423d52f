#include "distortion/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "distortion/foliation.hpp"
#include "distortion/spheres.hpp"

namespace distortion {

namespace {

std::string read_file(const std::string& path) {
  if (path.empty()) throw ParseError("--input is required for this command");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + path + "'");
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string num(const Real& x, int digits = 10) { return format_real(x, digits); }

std::string ratio_text(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", r);
  return buf;
}

Real golden() { return (rm::sqrt(5) - 1) / 2; }

// Parameters only, so reports do not depend on where they are written.
Json report_config(const RunConfig& cfg) {
  Json j = config_to_json(cfg);
  j.erase("out");
  j.erase("words");
  j.erase("csv");
  return j;
}

Json alphabet_of(const std::vector<Word>& words) {
  std::set<std::string> names;
  for (const auto& w : words)
    for (const auto& l : w.letters()) names.insert(l.gen);
  Json a = Json::array();
  for (const auto& n : names) a.push_back(n);
  return a;
}

// ---- plan -----------------------------------------------------------------

int cmd_plan(const RunConfig& cfg, std::ostream& out) {
  GeneratorParams params = GeneratorParams{cfg.dim, cfg.lambda, {}}.validated();
  WitnessPlan plan = build_plan(params, cfg.nmax, PlanOptions{cfg.samples, 256, cfg.seed, true});
  std::ostringstream s;
  s << "# seed=" << cfg.seed << " dim=" << cfg.dim << " lambda=" << num(cfg.lambda)
    << " nmax=" << cfg.nmax << "\n";
  s << "n,l_n,l_tilde_n,k_n,diam_U\n";
  for (int n = 0; n < plan.n_max(); ++n) {
    Real diam = n < static_cast<int>(plan.checks.diameters.size()) ? plan.checks.diameters[n] : 0;
    s << n << "," << plan.slots[n].l << "," << plan.slots[n].l_tilde << ","
      << k_bound(plan, n) << "," << num(diam) << "\n";
  }
  const PlanChecks& c = plan.checks;
  s << "# pairs_checked=" << c.pairs_checked << " overlap_violations=" << c.overlap_violations
    << " displacement_violations=" << c.displacement_violations
    << " containment_violations=" << c.containment_violations
    << " diameters_decreasing=" << (c.diameters_decreasing ? "yes" : "no") << "\n";
  write_text(cfg.out, s.str(), out);
  return c.ok() ? kExitOk : kExitFailed;
}

// ---- witness / verify -----------------------------------------------------

struct Built {
  std::shared_ptr<const WitnessPlan> plan;
  std::unique_ptr<WitnessMachinery> machinery;
  std::vector<std::string> kinds;
};

Built build_session(const Session& s, const RunConfig& cfg) {
  Built b;
  const int nmax = std::max<int>(s.nmax, static_cast<int>(s.targets.size()));
  b.plan = std::make_shared<const WitnessPlan>(
      build_plan(s.params, nmax, PlanOptions{cfg.samples, 256, cfg.seed, true}));
  b.machinery = std::make_unique<WitnessMachinery>(b.plan);
  for (std::size_t i = 0; i < s.targets.size(); ++i) {
    if (auto p = std::get_if<CommutatorPair>(&s.targets[i])) {
      b.machinery->set_pair(static_cast<int>(i), *p);
      b.kinds.push_back("pair");
    } else {
      b.machinery->set_homeo(static_cast<int>(i), std::get<PlainHomeo>(s.targets[i]).h);
      b.kinds.push_back("homeo");
    }
  }
  b.machinery->build();
  return b;
}

Json witness_entry(int n, const std::string& kind, long k, std::size_t len, const Real& err,
                   int samples, bool passed) {
  return Json{{"n", n},
              {"kind", kind},
              {"k_bound", k},
              {"reduced_len", len},
              {"sup_err", real_to_json(err)},
              {"samples", samples},
              {"passed", passed}};
}

std::string witness_csv(const RunConfig& cfg, const Json& entries) {
  std::ostringstream s;
  s << "# seed=" << cfg.seed << " samples=" << cfg.samples << " tol=" << num(cfg.tol) << "\n";
  s << "n,kind,k_n,reduced_len,sup_err,passed\n";
  for (const auto& e : entries)
    s << e["n"].get<int>() << "," << e["kind"].get<std::string>() << ","
      << e["k_bound"].get<long>() << "," << e["reduced_len"].get<std::size_t>() << ","
      << num(real_from_json(e["sup_err"]), 6) << "," << (e["passed"].get<bool>() ? 1 : 0)
      << "\n";
  return s.str();
}

int cmd_witness(const RunConfig& cfg, std::ostream& out) {
  Session session = session_from_json(parse_json_text(read_file(cfg.input)));
  Built b = build_session(session, cfg);
  VerifyOptions vo{cfg.samples, 2.5L, cfg.seed, cfg.tol};
  Json entries = Json::array(), words = Json::array();
  std::vector<Word> all;
  bool ok = true;
  for (std::size_t i = 0; i < session.targets.size(); ++i) {
    Witness w = b.machinery->witness(static_cast<int>(i), vo);
    entries.push_back(witness_entry(w.n, w.kind, w.k_bound, w.report.reduced_len,
                                    w.report.sup_err, w.report.samples, w.report.passed));
    words.push_back(Json{{"n", w.n}, {"word", word_to_json(w.word)}});
    all.push_back(w.word);
    ok = ok && w.report.passed;
  }
  Json report{{"config", report_config(cfg)}, {"witnesses", entries}, {"all_passed", ok}};
  write_text(cfg.out, dump(report), out);
  if (!cfg.words.empty())
    write_text(cfg.words, dump(Json{{"alphabet", alphabet_of(all)}, {"words", words}}), out);
  if (!cfg.csv.empty()) write_text(cfg.csv, witness_csv(cfg, entries), out);
  return ok ? kExitOk : kExitFailed;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  Session session = session_from_json(parse_json_text(read_file(cfg.input)));
  if (cfg.words.empty()) throw ParseError("verify needs --words");
  Json wj = parse_json_text(read_file(cfg.words));
  if (!wj.is_object() || !wj.contains("words") || !wj["words"].is_array())
    throw ParseError("/words: expected an array");
  Built b = build_session(session, cfg);
  Json entries = Json::array();
  bool ok = true;
  for (std::size_t i = 0; i < wj["words"].size(); ++i) {
    const Json& e = wj["words"][i];
    const std::string where = "/words/" + std::to_string(i);
    if (!e.is_object() || !e.contains("n") || !e["n"].is_number_integer() || !e.contains("word"))
      throw ParseError(where + ": expected {\"n\": integer, \"word\": [...]}");
    const int n = e["n"].get<int>();
    if (n < 0 || n >= static_cast<int>(session.targets.size()))
      throw ParseError(where + "/n: no target in slot " + std::to_string(n));
    Word w = word_from_json(e["word"], where + "/word");
    BoundWord bw(w, b.machinery->assignment());
    MapExpr target = b.machinery->target(n);
    Real err = 0;
    auto pts = draw(Sampler{Sampler::Kind::ball, b.plan->params.dim, cfg.samples, 2.5L,
                            cfg.seed + static_cast<std::uint64_t>(n)});
    for (const auto& x : pts) err = std::max(err, distance(bw.apply(x), target.apply(x)));
    const long k = b.machinery->k_bound(n);
    const std::size_t len = reduce(w).size();
    bool passed = err < cfg.tol && static_cast<long>(len) <= k;
    entries.push_back(witness_entry(n, b.kinds[n], k, len, err, cfg.samples, passed));
    ok = ok && passed;
  }
  Json report{{"config", report_config(cfg)}, {"witnesses", entries}, {"all_passed", ok}};
  write_text(cfg.out, dump(report), out);
  if (!cfg.csv.empty()) write_text(cfg.csv, witness_csv(cfg, entries), out);
  return ok ? kExitOk : kExitFailed;
}

// ---- demo -----------------------------------------------------------------

int cmd_demo(const RunConfig& cfg, std::ostream& out) {
  std::string label;
  SphereMap h = sphere_identity(1);
  if (!cfg.input.empty()) {
    h = sphere_map_from_json(parse_json_text(read_file(cfg.input)));
    label = "input";
  } else if (cfg.kind == "circle-rotation") {
    h = circle_rotation(cfg.alpha.value_or(golden()));
    label = cfg.kind + " alpha=" + num(cfg.alpha.value_or(golden()), 21);
  } else if (cfg.kind == "sphere-rotation") {
    h = sphere_rotation(cfg.theta);
    label = cfg.kind + " theta=" + num(cfg.theta, 21);
  } else {
    throw ParseError("unknown demo kind '" + cfg.kind + "'");
  }
  DemoOptions o;
  o.n_max = cfg.nmax;
  o.samples = cfg.samples;
  o.seed = cfg.seed;
  o.tol = cfg.tol;
  o.scale = cfg.scale;
  if (cfg.recurrent) {
    if (h.kind() != SphereMapKind::circle_rotation && !h.is_identity())
      throw ParseError("--recurrent needs a circle rotation");
    o.recurrent_alpha = cfg.alpha.value_or(golden());
  }
  DemoResult r = sphere_distortion_demo(h, o);

  std::ostringstream s;
  s << "# seed=" << cfg.seed << " samples=" << cfg.samples << " nmax=" << cfg.nmax << " "
    << label << "\n";
  s << "n,p_n,k_n,reduced_len,ratio,sup_err\n";
  for (const auto& row : r.rows)
    s << row.n << "," << row.p << "," << row.k << "," << row.reduced_len << ","
      << ratio_text(row.ratio) << "," << num(row.sup_err, 6) << "\n";
  write_text(cfg.out, s.str(), out);
  if (!cfg.words.empty()) {
    Json words = Json::array();
    for (std::size_t i = 0; i < r.rows.size(); ++i)
      words.push_back(Json{{"n", r.rows[i].n}, {"p", r.rows[i].p},
                           {"word", word_to_json(r.words[i])}});
    write_text(cfg.words, dump(Json{{"alphabet", alphabet_of(r.words)}, {"words", words}}),
               out);
  }
  return r.all_passed ? kExitOk : kExitFailed;
}

// ---- fragment -------------------------------------------------------------

int cmd_fragment(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  MapExpr f = parse_map(read_file(cfg.input));
  FoliationOptions o;
  o.grid = cfg.grid;
  o.tol = cfg.tol;
  o.seed = cfg.seed;
  Json report{{"config", report_config(cfg)}, {"dim", f.dim()}};
  bool ok = false;
  try {
    DecompositionReport rep = foliation_decompose(f, o);
    Json factors = Json::array();
    for (std::size_t k = 0; k < rep.factors.size(); ++k)
      factors.push_back(Json{{"axis", k},
                             {"margin", real_to_json(rep.margins[k])},
                             {"projection_error", real_to_json(rep.projection_errors[k])}});
    report["factors"] = factors;
    report["sup_error"] = real_to_json(rep.sup_error);
    report["max_solve_residual"] = real_to_json(rep.max_solve_residual);
    report["grid_points"] = rep.grid_points;
    ok = rep.passed;
  } catch (const MonotonicityError& e) {
    report["error"] = Json{{"kind", "monotonicity"},
                           {"axis", e.axis},
                           {"sample", point_to_json(e.sample)},
                           {"slope", real_to_json(e.slope)},
                           {"message", e.what()}};
    err << "fragment: " << e.what() << "\n";
  }
  report["passed"] = ok;
  write_text(cfg.out, dump(report), out);
  return ok ? kExitOk : kExitFailed;
}

Real parse_real(const std::string& s, const char* flag) {
  char* end = nullptr;
  long double v = std::strtold(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw ParseError(std::string(flag) + ": not a number '" + s + "'");
  return Real(v);
}

struct Raw {
  std::string lambda, tol, alpha, theta;
};

void add_common(CLI::App* sub, RunConfig& c, Raw& raw) {
  sub->add_option("--input", c.input, "input JSON file");
  sub->add_option("--out", c.out, "main output file (default stdout)");
  sub->add_option("--seed", c.seed, "random seed");
  sub->add_option("--tol", raw.tol, "verification tolerance");
  sub->add_option("--samples", c.samples, "random samples per check");
}

void setup(CLI::App& app, RunConfig& c, Raw& raw) {
  app.require_subcommand(1);
  auto plan = app.add_subcommand("plan", "print l_n, l~_n, k_n and the plan checks");
  add_common(plan, c, raw);
  plan->add_option("--dim", c.dim, "dimension");
  plan->add_option("--nmax", c.nmax, "number of slots");
  plan->add_option("--lambda", raw.lambda, "contraction factor of F1");

  auto wit = app.add_subcommand("witness", "emit and verify words for a session file");
  add_common(wit, c, raw);
  wit->add_option("--words", c.words, "write the words here");
  wit->add_option("--csv", c.csv, "write a CSV summary here");

  auto ver = app.add_subcommand("verify", "re-check a words file against a session");
  add_common(ver, c, raw);
  ver->add_option("--words", c.words, "words file to check")->required();
  ver->add_option("--csv", c.csv, "write a CSV summary here");

  auto demo = app.add_subcommand("demo", "distortion ratio table for a rotation");
  add_common(demo, c, raw);
  demo->add_option("--kind", c.kind, "circle-rotation or sphere-rotation")
      ->check(CLI::IsMember({"circle-rotation", "sphere-rotation"}));
  demo->add_option("--alpha", raw.alpha, "rotation number in turns (default golden mean)");
  demo->add_option("--theta", raw.theta, "sphere rotation angle in radians");
  demo->add_option("--nmax", c.nmax, "number of rows");
  demo->add_option("--scale", c.scale, "power schedule scale (0 = automatic)");
  demo->add_flag("--recurrent", c.recurrent, "take powers among continued-fraction denominators");
  demo->add_option("--words", c.words, "write the words here");

  auto frag = app.add_subcommand("fragment", "foliation decomposition of a map of the cube");
  add_common(frag, c, raw);
  frag->add_option("--grid", c.grid, "grid points per axis");
}

RunConfig finish(CLI::App& app, RunConfig c, const Raw& raw) {
  c.command = app.get_subcommands().front()->get_name();
  if (!raw.lambda.empty()) c.lambda = parse_real(raw.lambda, "--lambda");
  if (!raw.tol.empty()) c.tol = parse_real(raw.tol, "--tol");
  if (!raw.alpha.empty()) c.alpha = parse_real(raw.alpha, "--alpha");
  if (!raw.theta.empty()) c.theta = parse_real(raw.theta, "--theta");
  if (c.command == "demo" && app.get_subcommands().front()->count("--nmax") == 0)
    c.nmax = c.kind == "sphere-rotation" ? 4 : 6;
  return c;
}

}  // namespace

Json config_to_json(const RunConfig& c) {
  return Json{{"command", c.command},
              {"input", c.input},
              {"out", c.out},
              {"words", c.words},
              {"csv", c.csv},
              {"dim", c.dim},
              {"nmax", c.nmax},
              {"lambda", real_to_json(c.lambda)},
              {"tol", real_to_json(c.tol)},
              {"grid", c.grid},
              {"samples", c.samples},
              {"seed", c.seed},
              {"kind", c.kind},
              {"alpha", c.alpha ? real_to_json(*c.alpha) : Json(nullptr)},
              {"theta", real_to_json(c.theta)},
              {"scale", c.scale},
              {"recurrent", c.recurrent}};
}

RunConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("/: config must be an object");
  RunConfig c;
  try {
    c.command = j.value("command", c.command);
    c.input = j.value("input", c.input);
    c.out = j.value("out", c.out);
    c.words = j.value("words", c.words);
    c.csv = j.value("csv", c.csv);
    c.dim = j.value("dim", c.dim);
    c.nmax = j.value("nmax", c.nmax);
    c.grid = j.value("grid", c.grid);
    c.samples = j.value("samples", c.samples);
    c.seed = j.value("seed", c.seed);
    c.kind = j.value("kind", c.kind);
    c.scale = j.value("scale", c.scale);
    c.recurrent = j.value("recurrent", c.recurrent);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("/: ") + e.what());
  }
  if (j.contains("lambda")) c.lambda = real_from_json(j["lambda"], "/lambda");
  if (j.contains("tol")) c.tol = real_from_json(j["tol"], "/tol");
  if (j.contains("theta")) c.theta = real_from_json(j["theta"], "/theta");
  if (j.contains("alpha") && !j["alpha"].is_null()) c.alpha = real_from_json(j["alpha"], "/alpha");
  return c;
}

Session session_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("/: session must be an object");
  Session s;
  const Json params = j.value("params", Json::object());
  if (!params.is_object()) throw ParseError("/params: expected an object");
  if (params.contains("dim")) {
    if (!params["dim"].is_number_integer()) throw ParseError("/params/dim: expected an integer");
    s.params.dim = params["dim"].get<int>();
  }
  if (params.contains("lambda")) s.params.lambda = real_from_json(params["lambda"], "/params/lambda");
  if (params.contains("a")) s.params.a = point_from_json(params["a"], s.params.dim, "/params/a");
  s.params = s.params.validated();
  if (j.contains("nmax")) {
    if (!j["nmax"].is_number_integer() || j["nmax"].get<int>() < 0)
      throw ParseError("/nmax: expected a non-negative integer");
    s.nmax = j["nmax"].get<int>();
  }
  const Json targets = j.value("targets", Json::array());
  if (!targets.is_array()) throw ParseError("/targets: expected an array");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string where = "/targets/" + std::to_string(i);
    const Json& t = targets[i];
    if (!t.is_object() || !t.contains("type") || !t["type"].is_string())
      throw ParseError(where + ": target needs a string 'type'");
    const std::string type = t["type"].get<std::string>();
    auto field = [&](const char* key) {
      if (!t.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
      return map_from_json(t[key], s.params.dim, where + "/" + key);
    };
    if (type == "pair")
      s.targets.push_back(CommutatorPair{field("f"), field("g")});
    else if (type == "homeo")
      s.targets.push_back(PlainHomeo{field("h")});
    else
      throw ParseError(where + "/type: expected \"pair\" or \"homeo\"");
  }
  return s;
}

Json session_to_json(const Session& s) {
  Json targets = Json::array();
  for (const auto& t : s.targets) {
    if (auto p = std::get_if<CommutatorPair>(&t))
      targets.push_back(Json{{"type", "pair"}, {"f", map_to_json(p->f)}, {"g", map_to_json(p->g)}});
    else
      targets.push_back(Json{{"type", "homeo"}, {"h", map_to_json(std::get<PlainHomeo>(t).h)}});
  }
  Json params{{"dim", s.params.dim}, {"lambda", real_to_json(s.params.lambda)}};
  if (s.params.a.dim() > 0) params["a"] = point_to_json(s.params.a);
  return Json{{"params", params}, {"nmax", s.nmax}, {"targets", targets}};
}

RunConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"distortion"};
  RunConfig c;
  Raw raw;
  setup(app, c, raw);
  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    throw ParseError(e.what());
  }
  return finish(app, c, raw);
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "plan") return cmd_plan(cfg, out);
    if (cfg.command == "witness") return cmd_witness(cfg, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    if (cfg.command == "demo") return cmd_demo(cfg, out);
    if (cfg.command == "fragment") return cmd_fragment(cfg, out, err);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SupportError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "failed: " << e.what() << "\n";
    return kExitFailed;
  }
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Distortion witnesses for homeomorphism groups"};
  RunConfig c;
  Raw raw;
  setup(app, c, raw);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  RunConfig cfg;
  try {
    cfg = finish(app, c, raw);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  }
  return run_command(cfg, std::cout, std::cerr);
}

}  // namespace distortion

#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "calculus.hpp"
#include "charproc.hpp"
#include "envsem.hpp"
#include "parse.hpp"
#include "typesys.hpp"

namespace stc {

using nlohmann::json;

namespace {

json item_json(const PrefixItem& it) {
  return {{"dir", it.out ? "!" : "?"},
          {"peer", it.peer},
          {"label", it.label},
          {"sort", sort_name(it.payload)}};
}

PrefixItem item_from_json(const json& j) {
  auto s = sort_from(j.at("sort").get<std::string>());
  if (!s) throw std::runtime_error("bad sort in certificate");
  return {j.at("dir").get<std::string>() == "!",
          j.at("peer").get<std::string>(), j.at("label").get<std::string>(),
          *s};
}

json neg_node_json(const NegNode& n) {
  json kids = json::array();
  for (const NegNode& c : n.children) kids.push_back(neg_node_json(c));
  return {{"rule", n.rule},
          {"lhs", show_type(n.lhs)},
          {"rhs", show_type(n.rhs)},
          {"children", kids}};
}

NegNode neg_node_from_json(const json& j) {
  NegNode n;
  n.rule = j.at("rule").get<std::string>();
  n.lhs = parse_type(j.at("lhs").get<std::string>());
  n.rhs = parse_type(j.at("rhs").get<std::string>());
  for (const json& c : j.at("children")) n.children.push_back(neg_node_from_json(c));
  return n;
}

}  // namespace

json refinement_cert_json(const RefinementCertificate& c) {
  json chain = json::array();
  for (const CertNode& n : c.chain)
    chain.push_back({{"rule", n.rule},
                     {"lhs", show_type(n.lhs)},
                     {"rhs", show_type(n.rhs)}});
  json j{{"kind", "refinement"},
         {"pumped", c.pumped},
         {"chain", chain},
         {"back_edge", c.back_edge}};
  if (c.pumped) {
    json word = json::array();
    for (const PrefixItem& it : c.pump_word) word.push_back(item_json(it));
    j["pump"] = {{"lhs", show_type(c.pump_lhs)},
                 {"rhs", show_type(c.pump_rhs)},
                 {"pos", c.pump_pos},
                 {"word", word}};
  }
  return j;
}

RefinementCertificate refinement_cert_from_json(const json& j) {
  RefinementCertificate c;
  c.pumped = j.at("pumped").get<bool>();
  c.back_edge = j.at("back_edge").get<int>();
  for (const json& n : j.at("chain"))
    c.chain.push_back({n.at("rule").get<std::string>(),
                       parse_type(n.at("lhs").get<std::string>()),
                       parse_type(n.at("rhs").get<std::string>())});
  if (c.pumped) {
    const json& p = j.at("pump");
    c.pump_lhs = parse_type(p.at("lhs").get<std::string>());
    c.pump_rhs = parse_type(p.at("rhs").get<std::string>());
    c.pump_pos = p.at("pos").get<int>();
    for (const json& w : p.at("word")) c.pump_word.push_back(item_from_json(w));
  }
  return c;
}

json negation_json(const NegationDerivation& d) {
  return {{"kind", "negation"}, {"root", neg_node_json(d.root)}};
}

NegationDerivation negation_from_json(const json& j) {
  return {neg_node_from_json(j.at("root"))};
}

json subtype_cert_json(TypeRef lhs, TypeRef rhs, const SubtypeCertificate& c) {
  json cells = json::array();
  for (const CellWitness& cw : c.cells)
    cells.push_back({{"u", show_type(cw.u)},
                     {"v", show_type(cw.v)},
                     {"w", show_type(cw.w)},
                     {"w2", show_type(cw.w2)},
                     {"cert", refinement_cert_json(cw.cert)}});
  return {{"kind", "subtype"},
          {"lhs", show_type(lhs)},
          {"rhs", show_type(rhs)},
          {"used_family", c.used_family},
          {"cells", cells}};
}

bool certify_json(const json& j, const RunConfig& cfg, std::string* diag) {
  try {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "refinement") {
      RefinementCertificate c = refinement_cert_from_json(j);
      return check_refinement_certificate(c, cfg.refine_limits(), diag);
    }
    if (kind == "negation") {
      NegationDerivation d = negation_from_json(j);
      return check_negation_derivation(d, cfg.refine_limits(), diag);
    }
    if (kind == "subtype") {
      TypeRef lhs = parse_type(j.at("lhs").get<std::string>());
      TypeRef rhs = parse_type(j.at("rhs").get<std::string>());
      SubtypeCertificate c;
      c.used_family = j.at("used_family").get<bool>();
      for (const json& cw : j.at("cells"))
        c.cells.push_back({parse_type(cw.at("u").get<std::string>()),
                           parse_type(cw.at("v").get<std::string>()),
                           parse_type(cw.at("w").get<std::string>()),
                           parse_type(cw.at("w2").get<std::string>()),
                           refinement_cert_from_json(cw.at("cert"))});
      return check_subtype_certificate(lhs, rhs, c, cfg.subtype_limits(), diag);
    }
    if (diag) *diag = "unknown certificate kind " + kind;
    return false;
  } catch (const std::exception& e) {
    if (diag) *diag = e.what();
    return false;
  }
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << data;
}

int verdict_code(V3 v) {
  switch (v) {
    case V3::Yes: return 0;
    case V3::No: return 1;
    case V3::Unknown: return 2;
  }
  return 2;
}

int cmd_subtype(const RunConfig& cfg, const std::string& a,
                const std::string& b, const std::string& cert_path) {
  TypeRef lhs = parse_type(read_file(a));
  TypeRef rhs = parse_type(read_file(b));
  SubtypeResult r = subtype(lhs, rhs, cfg.subtype_limits());
  if (cfg.format == "json") {
    json out{{"verdict", v3_name(r.verdict)},
             {"used_family", r.used_family},
             {"note", r.note}};
    if (r.refuted) out["refuted_rule"] = r.refuted->rule;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << v3_name(r.verdict) << "\n";
    if (!r.note.empty()) std::cout << "note: " << r.note << "\n";
    if (r.refuted) {
      std::cout << "refuted cell:\n  U  = " << show_type(r.refuted->u)
                << "\n  V' = " << show_type(r.refuted->v)
                << "\nrule: " << r.refuted->rule << "\n";
      if (r.refuted->sample)
        std::cout << "sample leaf: " << leaf_rule(*r.refuted->sample) << "\n";
    }
  }
  if (!cert_path.empty()) {
    if (r.verdict == V3::Yes && r.cert)
      write_file(cert_path, subtype_cert_json(lhs, rhs, *r.cert).dump(2));
    else if (r.verdict == V3::No && r.refuted && r.refuted->sample)
      write_file(cert_path, negation_json(*r.refuted->sample).dump(2));
  }
  return verdict_code(r.verdict);
}

int cmd_refine(const RunConfig& cfg, const std::string& a,
               const std::string& b, const std::string& cert_path) {
  TypeRef lhs = parse_type(read_file(a));
  TypeRef rhs = parse_type(read_file(b));
  if (!is_siso(lhs) || !is_siso(rhs)) {
    std::cerr << "refine expects single-input single-output types\n";
    return 3;
  }
  RefineResult r = refine(lhs, rhs, cfg.refine_limits());
  std::cout << v3_name(r.verdict) << "\n";
  if (!r.note.empty()) std::cout << "note: " << r.note << "\n";
  if (r.cert) {
    std::cout << (r.cert->pumped ? "pumped" : "cyclic") << " certificate, "
              << r.cert->chain.size() << " steps\n";
    for (const CertNode& n : r.cert->chain)
      std::cout << "  " << n.rule << ": " << show_type(n.lhs)
                << "  <  " << show_type(n.rhs) << "\n";
  }
  if (r.neg) std::cout << "leaf rule: " << leaf_rule(*r.neg) << "\n";
  if (!cert_path.empty()) {
    if (r.cert) write_file(cert_path, refinement_cert_json(*r.cert).dump(2));
    else if (r.neg) write_file(cert_path, negation_json(*r.neg).dump(2));
  }
  return verdict_code(r.verdict);
}

int cmd_typecheck(const RunConfig& cfg, const std::string& sfile,
                  const std::string& efile) {
  Session s = parse_session(read_file(sfile));
  TypingEnv g = parse_env(read_file(efile));
  Tri t = check_session(s, g, cfg.subtype_limits());
  std::cout << tri_name(t) << "\n";
  switch (t) {
    case Tri::Typed: return 0;
    case Tri::Untyped: return 1;
    case Tri::Indeterminate: return 2;
  }
  return 2;
}

int cmd_run(const RunConfig& cfg, const std::string& sfile) {
  Session s = parse_session(read_file(sfile));
  RunOutcome r = run_session(s, cfg.run_states);
  switch (r.kind) {
    case RunKind::Terminated:
      std::cout << "NoError (" << r.states << " states)\n";
      return 0;
    case RunKind::ErrorReached:
      std::cout << "Error: " << r.error_rule << "\n";
      for (const std::string& l : r.trace) std::cout << "  " << l << "\n";
      return 1;
    case RunKind::LimitReached:
      std::cout << "Unknown: state limit reached\n";
      return 2;
  }
  return 2;
}

int cmd_live(const RunConfig& cfg, const std::string& efile) {
  TypingEnv g = parse_env(read_file(efile));
  LiveResult r = check_live(g, cfg.queue_bound, cfg.live_states);
  std::cout << (r.verdict == V3::Yes
                    ? "Live"
                    : r.verdict == V3::No ? "NotLive" : "Unknown")
            << "\n";
  if (!r.note.empty()) std::cout << "note: " << r.note << "\n";
  if (r.verdict == V3::No) {
    std::cout << "violation: " << r.witness << "\n";
    if (!r.stem.empty()) {
      std::cout << "stem:\n";
      for (const std::string& l : r.stem) std::cout << "  " << l << "\n";
    }
    if (!r.cycle.empty()) {
      std::cout << "cycle:\n";
      for (const std::string& l : r.cycle) std::cout << "  " << l << "\n";
    }
  }
  return verdict_code(r.verdict);
}

int cmd_oracle(const RunConfig& cfg, const std::string& a,
               const std::string& b) {
  TypeRef lhs = parse_type(read_file(a));
  TypeRef rhs = parse_type(read_file(b));
  OracleOutcome r = completeness_oracle(lhs, rhs, cfg.oracle_steps);
  switch (r.verdict) {
    case V3::Yes:
      std::cout << "NoError (" << r.states << " states)\n";
      return 0;
    case V3::No:
      std::cout << "Error: " << r.rule << "\n";
      for (const std::string& l : r.trace) std::cout << "  " << l << "\n";
      return 1;
    case V3::Unknown: std::cout << "Unknown: step limit reached\n"; return 2;
  }
  return 2;
}

int cmd_certify(const RunConfig& cfg, const std::string& file) {
  json j = json::parse(read_file(file));
  std::string diag;
  if (certify_json(j, cfg, &diag)) {
    std::cout << "valid\n";
    return 0;
  }
  std::cout << "invalid: " << diag << "\n";
  return 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"verification toolkit for asynchronous multiparty session types"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--unroll-bound", cfg.unroll_bound)->envname("STC_UNROLL_BOUND");
  app.add_option("--max-members", cfg.max_members)->envname("STC_MAX_MEMBERS");
  app.add_option("--max-pairs", cfg.max_pairs)->envname("STC_MAX_PAIRS");
  app.add_option("--refine-max-nodes", cfg.refine_max_nodes)
      ->envname("STC_REFINE_MAX_NODES");
  app.add_option("--refine-max-prefix", cfg.refine_max_prefix)
      ->envname("STC_REFINE_MAX_PREFIX");
  app.add_option("--pump-replays", cfg.pump_replays)->envname("STC_PUMP_REPLAYS");
  app.add_option("--family-threshold", cfg.family_threshold)
      ->envname("STC_FAMILY_THRESHOLD");
  app.add_option("--queue-bound", cfg.queue_bound)->envname("STC_QUEUE_BOUND");
  app.add_option("--oracle-steps", cfg.oracle_steps)->envname("STC_ORACLE_STEPS");
  app.add_option("--run-states", cfg.run_states)->envname("STC_RUN_STATES");
  app.add_option("--live-states", cfg.live_states)->envname("STC_LIVE_STATES");
  app.add_option("--seed", cfg.seed)->envname("STC_SEED");
  app.add_flag("--sync-only", cfg.sync_only)->envname("STC_SYNC_ONLY");
  app.add_option("--format", cfg.format)->envname("STC_FORMAT");

  std::string a, b, cert_path;
  auto* sub = app.add_subcommand("subtype", "decide T <= T' between type files");
  sub->add_option("lhs", a)->required();
  sub->add_option("rhs", b)->required();
  sub->add_option("--cert", cert_path, "write a certificate to this file");
  auto* ref = app.add_subcommand("refine", "decide W < W' between type files");
  ref->add_option("lhs", a)->required();
  ref->add_option("rhs", b)->required();
  ref->add_option("--cert", cert_path, "write a certificate to this file");
  auto* tc = app.add_subcommand("typecheck", "type a session against an environment");
  tc->add_option("session", a)->required();
  tc->add_option("env", b)->required();
  auto* run = app.add_subcommand("run", "search a session for runtime errors");
  run->add_option("session", a)->required();
  auto* live = app.add_subcommand("live", "check environment liveness");
  live->add_option("env", a)->required();
  auto* orc = app.add_subcommand("oracle", "execute the characteristic session");
  orc->add_option("lhs", a)->required();
  orc->add_option("rhs", b)->required();
  auto* cert = app.add_subcommand("certify", "re-validate a certificate file");
  cert->add_option("file", a)->required();
  for (CLI::App* s :
       {sub, ref, tc, run, live, orc, cert})
    s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  try {
    if (sub->parsed()) return cmd_subtype(cfg, a, b, cert_path);
    if (ref->parsed()) return cmd_refine(cfg, a, b, cert_path);
    if (tc->parsed()) return cmd_typecheck(cfg, a, b);
    if (run->parsed()) return cmd_run(cfg, a);
    if (live->parsed()) return cmd_live(cfg, a);
    if (orc->parsed()) return cmd_oracle(cfg, a, b);
    if (cert->parsed()) return cmd_certify(cfg, a);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}

}  // namespace stc

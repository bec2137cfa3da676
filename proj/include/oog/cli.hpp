#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "oog/http.hpp"
#include "oog/ku.hpp"

namespace oog {

namespace cli_detail {

inline void emit_json(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write " + out);
  f << j.dump(2) << "\n";
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + " is not JSON: " + e.what());
  }
}

inline json parse_json_arg(const std::string& text, const std::string& flag) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(flag + " is not JSON: " + e.what());
  }
}

inline std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& s) {
  const auto dots = s.find("..");
  auto num = [&](const std::string& x) -> std::uint64_t {
    if (x.empty() || x.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("--seeds expects a..b, got " + s);
    return std::stoull(x);
  };
  if (dots == std::string::npos) throw ConfigError("--seeds expects a..b, got " + s);
  const auto a = num(s.substr(0, dots)), b = num(s.substr(dots + 2));
  if (b < a) throw ConfigError("--seeds range is empty: " + s);
  return {a, b};
}

struct SimulateOptions {
  std::string space = "cantor";
  std::string p1;
  std::string p2;
  int rounds = 6;
  std::optional<std::uint64_t> seed;
  std::string seeds;
  std::optional<std::size_t> test_depth;
  std::string tf;
  std::string out;
};

struct RunOutcome {
  std::uint64_t seed = 0;
  int code = 0;
  std::string summary;
  json transcript;
};

template <Space S>
std::string certificate_line(const std::vector<DensityCertificate<Region<S>>>& certs) {
  std::string s;
  for (const auto& c : certs) s += " k=" + std::to_string(c.k) + (c.pass ? ":pass" : ":fail");
  return s;
}

template <Space S>
RunOutcome simulate_one(const S& space, const SimulateOptions& o, const std::string& tf_desc, std::uint64_t seed,
                        const Limits& limits) {
  RunOutcome r;
  r.seed = seed;
  auto pair = make_strategies(space, o.p1, o.p2, limits);
  const auto tf = make_test_family(space, tf_desc);
  Transcript<S> t;
  try {
    t = run_game(*pair.one, *pair.two, space, o.rounds, seed);
  } catch (const Error& e) {
    r.code = static_cast<int>(e.code());
    r.summary = "seed " + std::to_string(seed) + ": engine error: " + e.what();
    return r;
  }
  t.test_family = tf_desc;
  t.certificates = adjudicate_all(space, t, tf);
  r.summary = "seed " + std::to_string(seed) + ":" + certificate_line<S>(t.certificates);
  if constexpr (std::is_same_v<S, CantorCube>) {
    r.summary += " mu=" + to_string(played_measure(t));
    if (auto w = complement_witness(t)) r.summary += " witness=" + w->str();
    if (auto* d = dynamic_cast<DiagonalPlayerTwo*>(pair.two.get()); d && d->alpha())
      r.summary += " alpha=" + std::to_string(*d->alpha());
  }
  if constexpr (std::is_same_v<S, SumSpace<CantorCube>> || std::is_same_v<S, SumSpace<FiniteSpace>>) {
    if (auto u = untouched_summand(space, t)) r.summary += " untouched-summand=" + std::to_string(*u);
  }
  r.transcript = transcript_to_json(space, t);
  return r;
}

inline int cmd_simulate(const SimulateOptions& o, const Limits& limits) {
  if (o.test_depth && !o.tf.empty()) throw ConfigError("give either --test-depth or --tf, not both");
  if (o.seed && !o.seeds.empty()) throw ConfigError("give either --seed or --seeds, not both");
  const std::string tf = !o.tf.empty() ? o.tf : "depth:" + std::to_string(o.test_depth.value_or(2));
  if (!o.seed && o.seeds.empty() && (is_randomized(o.p1) || is_randomized(o.p2)))
    throw ConfigError("--seed is required for randomized strategies");
  const AnySpace space = make_space(o.space);

  std::vector<std::uint64_t> seeds;
  if (!o.seeds.empty()) {
    if (o.out.empty()) throw ConfigError("--seeds needs --out <directory>");
    const auto [a, b] = parse_seed_range(o.seeds);
    for (auto s = a; s <= b; ++s) seeds.push_back(s);
  } else {
    seeds.push_back(o.seed.value_or(0));
  }

  // Configuration errors surface before any work or output.
  std::visit(
      [&](const auto& sp) {
        make_strategies(sp, o.p1, o.p2, limits);
        make_test_family(sp, tf);
      },
      space);

  std::vector<RunOutcome> results(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++)
      results[i] = std::visit([&](const auto& sp) { return simulate_one(sp, o, tf, seeds[i], limits); }, space);
  };
  const std::size_t threads =
      std::min<std::size_t>(seeds.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  int code = 0;
  std::size_t passed = 0;
  if (o.seeds.empty()) {
    const auto& r = results.front();
    std::cerr << r.summary << "\n";
    if (r.code != 0) return r.code;
    emit_json(r.transcript, o.out);
    return 0;
  }
  std::filesystem::create_directories(o.out);
  for (const auto& r : results) {
    std::cerr << r.summary << "\n";
    if (r.code != 0) {
      code = std::max(code, r.code);
      continue;
    }
    const auto& certs = r.transcript["certificates"];
    if (!certs.empty() && certs.front()["status"] == "pass") ++passed;
    emit_json(r.transcript, (std::filesystem::path(o.out) / ("transcript-" + std::to_string(r.seed) + ".json")).string());
  }
  std::cerr << "k=0 passed on " << passed << "/" << results.size() << " seeds\n";
  return code;
}

template <Space S>
int verify_typed(const S& space, const json& j, const std::string& tf_override) {
  const Transcript<S> t = transcript_from_json(space, j);
  try {
    check_transcript(space, t);
  } catch (const ContractViolation& e) {
    throw VerificationFailure(std::string("illegal transcript: ") + e.what());
  }
  if (t.completed_rounds() * 2 != t.rounds.size()) throw VerificationFailure("transcript ends mid-round");
  const std::string tf_desc = !tf_override.empty() ? tf_override : t.test_family;
  const auto tf = make_test_family(space, tf_desc);
  const auto fresh = adjudicate_all(space, t, tf);
  if (t.certificates.empty()) {
    std::cerr << "no stored certificates; recomputed:" << certificate_line<S>(fresh) << "\n";
    return 0;
  }
  for (std::size_t i = 0; i < t.certificates.size(); ++i) {
    const auto& c = t.certificates[i];
    if (!replay_certificate(space, t, tf, c))
      throw VerificationFailure("certificate " + std::to_string(i) + " (k=" + std::to_string(c.k) +
                                ") does not replay");
  }
  std::cerr << "all " << t.certificates.size() << " certificates replay:" << certificate_line<S>(t.certificates)
            << "\n";
  return 0;
}

inline int cmd_verify(const std::string& path, const std::string& tf) {
  const json j = read_json_file(path);
  if (!j.is_object() || !j.contains("space") || !j["space"].is_string())
    throw ConfigError("transcript has no space field");
  if (!j.contains("version") || j["version"] != kTranscriptVersion) throw ConfigError("unsupported transcript version");
  const AnySpace space = make_space(j["space"].get<std::string>());
  return std::visit([&](const auto& sp) { return verify_typed(sp, j, tf); }, space);
}

/// exp(...) filters live on exp(cantor), prod(f1,…,fk) on a product of k
/// Cantor cubes, everything else on cantor.
inline std::string filter_space(const std::string& filter) {
  if (filter.rfind("exp(", 0) == 0) return "exp(cantor)";
  if (filter.rfind("prod(", 0) == 0 && filter.back() == ')') {
    const auto k = detail::split_factors(filter.substr(5, filter.size() - 6)).size();
    std::string s = "product(";
    for (std::size_t i = 0; i < k; ++i) s += i ? ",cantor" : "cantor";
    return s + ")";
  }
  return "cantor";
}

template <Space S>
std::vector<Region<S>> decode_regions(const S& space, const std::string& text, const std::string& flag) {
  std::vector<Region<S>> out;
  if (text.empty()) return out;
  const json j = parse_json_arg(text, flag);
  if (!j.is_array()) throw ConfigError(flag + " must be a JSON array of regions");
  for (const auto& r : j) out.push_back(space.decode(r));
  return out;
}

template <Space S>
FilterElement<Region<S>> build_filter(const S& space, ClubSource<S>& src, const std::string& seed_text) {
  return src.extend(space, decode_regions(space, seed_text, "--seed-regions"));
}

inline int cmd_club(const std::string& action, const std::string& filter, const std::string& seed_text,
                    const std::string& v_text, const std::string& out, const Limits& limits) {
  const std::string sdesc = filter_space(filter);
  const AnySpace any = make_space(sdesc);
  if (filter.rfind("exp(", 0) == 0) {
    const auto& space = std::get<Hyperspace<CantorCube>>(any);
    auto src = make_hyperspace_source(filter, limits);
    const auto p = build_filter(space, *src, seed_text);
    if (action == "build") {
      emit_json(json{{"space", sdesc}, {"filter", filter_to_json(space, p)}}, out);
      return 0;
    }
    const auto v = space.decode(parse_json_arg(v_text, "--v"));
    space.validate(v);
    if (!space.is_nonempty(v)) throw ConfigError("--v is empty");
    const auto rep = check_condition3_hyperspace(space, p, v);
    json j{{"space", sdesc}, {"filter", filter}, {"members", p.sets.size()}, {"holds", rep.report.holds},
           {"verified", rep.verified}};
    if (rep.report.holds) {
      j["witness"] = space.encode(p.sets[*rep.report.witness]);
      json pts = json::array();
      for (const auto& pt : rep.points) {
        json one = json::array();
        for (const auto& c : pt) one.push_back(encode_cylinder(c));
        pts.push_back(std::move(one));
      }
      j["points"] = pts;
    }
    emit_json(j, out);
    if (!rep.report.holds || !rep.verified) {
      std::cerr << "condition (3) fails for V = " << space.str(v) << "\n";
      return static_cast<int>(ErrorCode::verification);
    }
    std::cerr << "witness W = " << space.str(p.sets[*rep.report.witness]) << "\n";
    return 0;
  }
  const auto& space = std::get<CantorCube>(any);
  auto src = make_cantor_source(filter, limits);
  const auto p = build_filter(space, *src, seed_text);
  if (action == "build") {
    emit_json(json{{"space", sdesc}, {"filter", filter_to_json(space, p)}}, out);
    return 0;
  }
  const auto v = space.decode(parse_json_arg(v_text, "--v"));
  space.validate(v);
  if (!space.is_nonempty(v)) throw ConfigError("--v is empty");
  const Condition3Checker<CantorCube> checker(space, p);
  const auto rep = checker.check(v);
  const bool verified = rep.holds && checker.verify(v, *rep.witness);
  json j{{"space", sdesc}, {"filter", filter}, {"members", p.sets.size()}, {"holds", rep.holds}, {"verified", verified}};
  if (rep.holds) {
    j["witness"] = space.encode(p.sets[*rep.witness]);
  } else {
    json blockers = json::array();
    for (const auto& [w, u] : rep.blockers)
      blockers.push_back(json{{"w", space.encode(p.sets[w])}, {"u", space.encode(p.sets[u])}});
    j["blockers"] = blockers;
  }
  emit_json(j, out);
  if (!verified) {
    std::cerr << "condition (3) fails for V = " << v.str() << "\n";
    return static_cast<int>(ErrorCode::verification);
  }
  std::cerr << "witness W = " << p.sets[*rep.witness].str() << "\n";
  return 0;
}

struct KuOptions {
  std::string oracle = "diag";
  std::string p1 = "cantor-p1";
  std::string space_y = "cantor";
  int rounds = 4;
  int branching = 2;
  std::size_t samples = 5;
  std::size_t test_depth = 4;
  std::uint64_t seed = 0;
  std::optional<Coord> hole;
  std::string out;
};

inline std::map<Coord, Coord> parse_perm(const std::string& text) {
  std::map<Coord, Coord> perm;
  for (const auto& item : detail::split_top_level(text)) {
    const auto gt = item.find('>');
    if (gt == std::string::npos) throw ConfigError("graph permutation entries look like a>b, got " + item);
    perm[static_cast<Coord>(detail::parse_count(item.substr(0, gt), text))] =
        static_cast<Coord>(detail::parse_count(item.substr(gt + 1), text));
  }
  return perm;
}

inline std::shared_ptr<const DenseOpenOracle<CantorCube>> make_cantor_oracle(const std::string& d, const Limits& limits) {
  if (d == "diag") return off_diagonal_oracle(limits);
  if (d.rfind("graph:", 0) == 0) return std::make_shared<GraphComplementOracle>(parse_perm(d.substr(6)), limits);
  if (d == "nd:diag")
    return std::make_shared<NowhereDenseAdapter<CantorCube>>(std::make_shared<DiagonalSet>(std::map<Coord, Coord>{}, limits),
                                                             CantorCube());
  if (d.rfind("nd:graph:", 0) == 0)
    return std::make_shared<NowhereDenseAdapter<CantorCube>>(
        std::make_shared<DiagonalSet>(parse_perm(d.substr(9)), limits), CantorCube());
  if (d == "nd:empty")
    return std::make_shared<NowhereDenseAdapter<CantorCube>>(std::make_shared<EmptyClosedSet<CantorCube>>(), CantorCube());
  throw ConfigError("unknown oracle for Y = cantor: " + d);
}

inline std::shared_ptr<const DenseOpenOracle<Hyperspace<CantorCube>>> make_hyperspace_oracle(const std::string& d,
                                                                                          const Limits& limits) {
  using H = Hyperspace<CantorCube>;
  if (d == "diag") return std::make_shared<HyperspaceOffDiagonalOracle>(limits);
  if (d == "nd:empty") return std::make_shared<NowhereDenseAdapter<H>>(std::make_shared<EmptyClosedSet<H>>(), H(CantorCube()));
  throw ConfigError("unknown oracle for Y = exp(cantor): " + d);
}

template <Space Y>
int ku_typed(const Y& y, std::shared_ptr<const DenseOpenOracle<Y>> e, const KuOptions& o, const Limits& limits) {
  // With --hole the tree is built and audited with E, and the sections are
  // checked against E minus the hole.
  std::shared_ptr<const DenseOpenOracle<Y>> checked = e;
  if (o.hole) {
    const ClopenSet u = ClopenSet::of(Cylinder::single(*o.hole, 0));
    Region<Y> v;
    if constexpr (std::is_same_v<Y, CantorCube>)
      v = u;
    else
      v = Region<Y>::make({u});
    checked = std::make_shared<BoxRemovedOracle<Y>>(e, y, u, v);
  }
  auto p1 = make_strategy(y, o.p1, Player::one, limits);
  const auto tree = run_ku_construction(CantorCube(), y, *e, *p1, o.rounds, o.branching, o.seed, limits);
  const auto audit = audit_ku(y, *e, tree);
  const auto tf = make_test_family(y, "depth:" + std::to_string(o.test_depth));
  const auto sections = verify_sections(y, tree, *checked, o.samples, tf, o.seed, limits);
  json j = ku_to_json(y, tree);
  j["audit"] = audit_to_json(audit);
  j["sections"] = sections_to_json(y, sections);
  emit_json(j, o.out);
  std::cerr << "ku: " << tree.nodes.size() << " nodes, " << tree.branches.size() << " branches, " << tree.pruned
            << " pruned; audit " << (audit.ok() ? "ok" : "FAILED") << " (" << audit.box_checks
            << " box checks); sections " << sections.passed << " pass, " << sections.failed << " fail over "
            << tf.regions.size() << " tests\n";
  for (const auto& m : audit.messages) std::cerr << "  " << m << "\n";
  return audit.ok() && sections.failed == 0 ? 0 : static_cast<int>(ErrorCode::verification);
}

inline int cmd_ku(const KuOptions& o, const Limits& limits) {
  if (o.space_y == "cantor") return ku_typed<CantorCube>(CantorCube(), make_cantor_oracle(o.oracle, limits), o, limits);
  if (o.space_y == "exp(cantor)")
    return ku_typed<Hyperspace<CantorCube>>(Hyperspace<CantorCube>(CantorCube()), make_hyperspace_oracle(o.oracle, limits),
                                            o, limits);
  throw ConfigError("--space-y must be cantor or exp(cantor), got " + o.space_y);
}

inline int cmd_serve(const std::string& host, int port, const Limits& limits) {
  std::cerr << "serving on http://" << host << ":" << port << "\n";
  if (!serve(host, port, limits)) throw ConfigError("cannot listen on " + host + ":" + std::to_string(port));
  return 0;
}

}  // namespace cli_detail

/// Entry point of the `oog` tool. Returns the process exit code.
inline int run_cli(int argc, char** argv) {
  using namespace cli_detail;
  CLI::App app{"Open-open game simulator and verifier"};
  app.require_subcommand(1);
  Limits limits;
  app.add_option("--support-cap", limits.support_cap, "largest support enumerated exhaustively");
  app.add_option("--j-cap", limits.cantor_j_cap, "largest |J_n| for cantor-p1");
  app.add_option("--family-cap", limits.family_cap, "largest move family");
  app.add_option("--filter-cap", limits.filter_cap, "largest filter element");
  app.add_option("--max-branches", limits.max_branches, "branches expanded per KU level");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "play one game, or a tournament over --seeds");
  simulate->add_option("--space", sim.space, "space descriptor")->capture_default_str();
  simulate->add_option("--p1", sim.p1, "Player I strategy")->required();
  simulate->add_option("--p2", sim.p2, "Player II strategy")->required();
  simulate->add_option("--rounds", sim.rounds, "rounds N")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--seeds", sim.seeds, "tournament seed range a..b");
  simulate->add_option("--test-depth", sim.test_depth, "test family depth:<d>");
  simulate->add_option("--tf", sim.tf, "test family descriptor");
  simulate->add_option("--out", sim.out, "transcript file (directory with --seeds)");

  std::string verify_path, verify_tf;
  auto* verify = app.add_subcommand("verify", "re-check legality and certificates of a transcript");
  verify->add_option("transcript", verify_path, "transcript JSON")->required();
  verify->add_option("--tf", verify_tf, "test family descriptor (default: the transcript's)");

  std::string club_filter, club_seed, club_v, club_out;
  auto* club = app.add_subcommand("club", "build or query club filter elements");
  club->require_subcommand(1);
  auto* club_build = club->add_subcommand("build", "write the filter element for a seed");
  auto* club_check = club->add_subcommand("check", "condition (3) for one V");
  for (auto* sc : {club_build, club_check}) {
    sc->add_option("--filter", club_filter, "filter descriptor")->required();
    sc->add_option("--seed-regions", club_seed, "JSON array of seed regions");
    sc->add_option("--out", club_out, "output file");
  }
  club_check->add_option("--v", club_v, "JSON region V")->required();

  KuOptions ku;
  auto* kucmd = app.add_subcommand("ku", "run and verify a Kuratowski-Ulam refinement tree");
  kucmd->add_option("--oracle", ku.oracle, "diag | graph:a>b,... | nd:diag | nd:graph:... | nd:empty")
      ->capture_default_str();
  kucmd->add_option("--p1", ku.p1, "Player I strategy on Y")->capture_default_str();
  kucmd->add_option("--space-y", ku.space_y, "cantor | exp(cantor)")->capture_default_str();
  kucmd->add_option("--rounds", ku.rounds)->capture_default_str();
  kucmd->add_option("--branching", ku.branching)->capture_default_str();
  kucmd->add_option("--samples", ku.samples, "sampled x per branch")->capture_default_str();
  kucmd->add_option("--test-depth", ku.test_depth, "Y test family depth")->capture_default_str();
  kucmd->add_option("--seed", ku.seed, "sampling seed")->capture_default_str();
  kucmd->add_option("--hole", ku.hole, "remove the box W_{c->0} x W_{c->0} from E");
  kucmd->add_option("--out", ku.out, "result file");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "JSON API for interactive play");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorCode::config);
  }

  try {
    if (*simulate) return cmd_simulate(sim, limits);
    if (*verify) return cmd_verify(verify_path, verify_tf);
    if (*club) return cmd_club(*club_build ? "build" : "check", club_filter, club_seed, club_v, club_out, limits);
    if (*kucmd) return cmd_ku(ku, limits);
    if (*serve) return cmd_serve(host, port, limits);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::config);
  }
  return static_cast<int>(ErrorCode::config);
}

}  // namespace oog

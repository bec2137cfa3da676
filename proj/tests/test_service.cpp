#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "oog/cli.hpp"
#include "oog/http.hpp"

using namespace oog;

namespace {

json post(SessionManager& m, const std::string& path, const json& body, int expect) {
  const auto r = handle_request(m, "POST", path, body.dump());
  EXPECT_EQ(r.status, expect) << r.body.dump();
  return r.body;
}

json get(SessionManager& m, const std::string& path, int expect = 200) {
  const auto r = handle_request(m, "GET", path, "");
  EXPECT_EQ(r.status, expect) << r.body.dump();
  return r.body;
}

json human_p2(std::uint64_t seed = 1, int rounds = 3, const std::string& engine = "cantor-p1:8") {
  return json{{"role", "II"}, {"strategy", engine}, {"roundsN", rounds}, {"seed", seed}};
}

std::string sid(const json& st) { return st.at("id").get<std::string>(); }

std::vector<ClopenSet> last_family(const json& st) {
  const auto& rounds = st.at("transcript").at("rounds");
  std::vector<ClopenSet> out;
  for (const auto& s : rounds.back().at("sets")) out.push_back(decode_clopen(s));
  return out;
}

/// A legal reply: each U refined by its first cylinder with a few random
/// extra coordinates.
json random_reply(const std::vector<ClopenSet>& a, std::mt19937_64& rng) {
  json sets = json::array();
  std::set<ClopenSet> seen;
  for (const auto& u : a) {
    Cylinder c = u.cylinders().front();
    for (int e = 0; e < 2; ++e) {
      const Coord x = static_cast<Coord>(rng() % 6);
      if (!c.fixes(x)) c = c.with(x, static_cast<std::uint8_t>(rng() % 2));
    }
    const auto v = ClopenSet::of(c);
    if (seen.insert(v).second) sets.push_back(encode_clopen(v));
  }
  return json{{"sets", sets}};
}

void expect_error(const Response& r, int status, const std::string& kind) {
  EXPECT_EQ(r.status, status) << r.body.dump();
  ASSERT_TRUE(r.body.contains("error")) << r.body.dump();
  EXPECT_EQ(r.body["error"]["kind"], kind);
  EXPECT_TRUE(r.body["error"]["message"].is_string());
}

}  // namespace

TEST(Service, CreateAsPlayerTwoSeesWholeSpace) {
  SessionManager m;
  const auto st = post(m, "/api/sessions", human_p2(), 201);
  EXPECT_EQ(st["status"], "awaiting-human");
  EXPECT_EQ(st["toMove"], "II");
  EXPECT_EQ(st["round"], 0);
  EXPECT_EQ(last_family(st), std::vector<ClopenSet>{ClopenSet::whole()});
  EXPECT_EQ(st["testRegions"].size(), 9u);
  EXPECT_EQ(st["coverage"], json::array());
  EXPECT_TRUE(st.contains("measure"));
}

TEST(Service, CreateAsPlayerOneWaitsForHuman) {
  SessionManager m;
  const auto st = post(m, "/api/sessions", json{{"role", "I"}, {"strategy", "random-p2:1"}, {"roundsN", 2}}, 201);
  EXPECT_EQ(st["toMove"], "I");
  EXPECT_TRUE(st["transcript"]["rounds"].empty());
  const auto after = post(m, "/api/sessions/" + sid(st) + "/moves", json{{"sets", json::array({json::array({json::array()})})}}, 200);
  EXPECT_EQ(after["round"], 1);
  EXPECT_EQ(after["toMove"], "I");
}

TEST(Service, InvalidCreateRequests) {
  SessionManager m;
  auto bad = human_p2();
  bad["strategy"] = "no-such-strategy";
  expect_error(handle_request(m, "POST", "/api/sessions", bad.dump()), 400, "config");
  bad = human_p2();
  bad["colour"] = "red";
  expect_error(handle_request(m, "POST", "/api/sessions", bad.dump()), 400, "config");
  bad = human_p2();
  bad["strategy"] = "random-p2:1";
  expect_error(handle_request(m, "POST", "/api/sessions", bad.dump()), 400, "config");
  bad = human_p2();
  bad["space"] = "moon";
  expect_error(handle_request(m, "POST", "/api/sessions", bad.dump()), 400, "config");
  bad = human_p2();
  bad.erase("roundsN");
  expect_error(handle_request(m, "POST", "/api/sessions", bad.dump()), 400, "config");
  expect_error(handle_request(m, "POST", "/api/sessions", "{not json"), 400, "config");
}

TEST(Service, SameSeedSameSessions) {
  SessionManager m;
  const json req{{"role", "I"}, {"strategy", "random-p2:2"}, {"roundsN", 3}, {"seed", 17}};
  const auto a = post(m, "/api/sessions", req, 201), b = post(m, "/api/sessions", req, 201);
  EXPECT_NE(sid(a), sid(b));
  const json move{{"sets", json::array({json::array({json::array()})})}};
  for (int i = 0; i < 3; ++i) {
    post(m, "/api/sessions/" + sid(a) + "/moves", move, 200);
    post(m, "/api/sessions/" + sid(b) + "/moves", move, 200);
  }
  EXPECT_EQ(get(m, "/api/sessions/" + sid(a) + "/transcript"), get(m, "/api/sessions/" + sid(b) + "/transcript"));
}

TEST(Service, LegalMoveAdvancesAndIllegalNamesU) {
  SessionManager m;
  const auto st = post(m, "/api/sessions", human_p2(), 201);
  const std::string base = "/api/sessions/" + sid(st);
  const json refine{{"sets", json::array({encode_clopen(ClopenSet::of(Cylinder::from({{0, 1}})))})}};
  const auto next = post(m, base + "/moves", refine, 200);
  EXPECT_EQ(next["round"], 1);
  EXPECT_EQ(last_family(next).size(), 2u);
  const json partial{{"sets", json::array({encode_clopen(ClopenSet::of(Cylinder::from({{0, 1}})))})}};
  const auto r = handle_request(m, "POST", base + "/moves", partial.dump());
  expect_error(r, 409, "contract");
  EXPECT_NE(r.body["error"]["message"].get<std::string>().find("U = "), std::string::npos);
  EXPECT_EQ(get(m, base)["round"], 1);
}

TEST(Service, FinishedGameCertificatesVerify) {
  SessionManager m;
  auto st = post(m, "/api/sessions", human_p2(4, 3), 201);
  const std::string base = "/api/sessions/" + sid(st);
  while (st["status"] == "awaiting-human") st = post(m, base + "/moves", get(m, base + "/hint"), 200);
  EXPECT_EQ(st["status"], "finished");
  EXPECT_TRUE(st["toMove"].is_null());
  const auto t = get(m, base + "/transcript");
  ASSERT_EQ(t["certificates"].size(), 3u);
  EXPECT_EQ(cli_detail::verify_typed(CantorCube(), t, ""), 0);
  const CantorCube c;
  const auto parsed = transcript_from_json(c, t);
  const auto fresh = adjudicate_all(c, parsed, make_test_family(c, "depth:2"));
  for (std::size_t k = 0; k < fresh.size(); ++k) EXPECT_EQ(certificate_to_json(c, fresh[k]), t["certificates"][k]);
  expect_error(handle_request(m, "POST", base + "/moves", get(m, base + "/hint", 409).dump()), 409, "contract");
}

TEST(Service, FuzzedSessionExportsVerifiableTranscript) {
  SessionManager m;
  auto st = post(m, "/api/sessions", json{{"role", "II"}, {"strategy", "cantor-p1"}, {"roundsN", 4}, {"seed", 8}}, 201);
  const std::string base = "/api/sessions/" + sid(st);
  std::mt19937_64 rng(13);
  const CantorCube c;
  int fuzzed = 0;
  while (st["status"] == "awaiting-human") {
    for (int i = 0; i < 25; ++i, ++fuzzed) {
      json body = random_reply(last_family(st), rng);
      switch (rng() % 4) {
        case 0:
          body["sets"].erase(body["sets"].size() - 1);
          if (body["sets"].empty()) body = json::object();
          break;
        case 1: body["sets"].push_back(json::array({json::array({json::array({0, 7})})})); break;
        case 2: body["sets"][0] = json::array(); break;
        default: body = json{{"sets", json::array({"x"})}}; break;
      }
      const auto r = handle_request(m, "POST", base + "/moves", body.dump());
      if (r.status == 200) {
        st = r.body;
        break;
      }
      EXPECT_TRUE(r.status == 400 || r.status == 409) << r.body.dump();
      EXPECT_NO_THROW(check_transcript(c, transcript_from_json(c, get(m, base + "/transcript"))));
    }
    if (st["status"] == "awaiting-human") st = post(m, base + "/moves", get(m, base + "/hint"), 200);
  }
  EXPECT_GE(fuzzed, 100);
  EXPECT_EQ(st["status"], "finished");
  const auto t = get(m, base + "/transcript");
  EXPECT_EQ(cli_detail::verify_typed(c, t, ""), 0);
  const auto parsed = transcript_from_json(c, t);
  const auto fresh = adjudicate_all(c, parsed, make_test_family(c, "depth:2"));
  ASSERT_EQ(fresh.size(), 4u);
  for (std::size_t k = 0; k < fresh.size(); ++k) EXPECT_EQ(certificate_to_json(c, fresh[k]), t["certificates"][k]);
}

TEST(Service, HintIsAlwaysLegal) {
  SessionManager m;
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto st = post(m, "/api/sessions", human_p2(seed, 4, "club-p1:cj:0,1:2"), 201);
    const std::string base = "/api/sessions/" + sid(st);
    while (st["status"] == "awaiting-human") {
      const auto hint = get(m, base + "/hint");
      if (rng() % 2) {
        st = post(m, base + "/moves", hint, 200);
      } else {
        st = post(m, base + "/moves", random_reply(last_family(st), rng), 200);
      }
    }
    EXPECT_EQ(st["status"], "finished");
  }
}

TEST(Service, MalformedPayloadsLeaveTranscriptLegal) {
  SessionManager m;
  auto st = post(m, "/api/sessions", human_p2(2, 6), 201);
  std::string base = "/api/sessions/" + sid(st);
  std::mt19937_64 rng(9);
  const std::vector<std::string> junk{
      "", "[]", "{}", "42", "\"x\"", "{\"sets\":5}", "{\"sets\":[[[0]]]}", "{\"sets\":[[[0,2]]]}",
      "{\"sets\":[[[0,1],[0,0]]]}", "{\"sets\":[[]]}", "{\"sets\":[[[[0,1]]]]}", "[[[-1,0]]]", "[null]", "{\"sets\":[]}"};
  int rejected = 0;
  for (int i = 0; i < 100; ++i) {
    if (st["status"] != "awaiting-human") {
      st = post(m, "/api/sessions", human_p2(static_cast<std::uint64_t>(i), 6), 201);
      base = "/api/sessions/" + sid(st);
    }
    std::string body;
    if (i % 3 == 0) {
      body = junk[rng() % junk.size()];
    } else {
      json sets = json::array();
      const int n = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < n; ++k) {
        json c = json::array();
        for (int l = 0; l < static_cast<int>(rng() % 3); ++l) c.push_back(json::array({rng() % 4, rng() % 2}));
        sets.push_back(json::array({c}));
      }
      body = json{{"sets", sets}}.dump();
    }
    const auto r = handle_request(m, "POST", base + "/moves", body);
    if (r.status == 200) {
      st = r.body;
    } else {
      EXPECT_TRUE(r.status == 400 || r.status == 409) << r.status;
      ++rejected;
    }
    const CantorCube c;
    EXPECT_NO_THROW(check_transcript(c, transcript_from_json(c, get(m, base + "/transcript"))));
  }
  EXPECT_GT(rejected, 0);
}

TEST(Service, PreviewMatchesCommittedCoverage) {
  SessionManager m;
  std::mt19937_64 rng(21);
  int moves = 0;
  for (std::uint64_t seed = 0; moves < 50; ++seed) {
    auto st = post(m, "/api/sessions", human_p2(seed, 6, "cantor-p1:4"), 201);
    const std::string base = "/api/sessions/" + sid(st);
    json prev_cov = st["coverage"];
    while (st["status"] == "awaiting-human" && moves < 50) {
      const auto move = random_reply(last_family(st), rng);
      const auto pv = post(m, base + "/preview", move, 200);
      EXPECT_EQ(get(m, base)["round"], st["round"]);
      st = post(m, base + "/moves", move, 200);
      EXPECT_EQ(pv["coverage"], st["coverage"]);
      for (const auto& nc : pv["newlyCovered"]) {
        const auto k = nc["k"].get<std::size_t>(), i = nc["test"].get<std::size_t>();
        EXPECT_TRUE(st["coverage"][k][i].get<bool>());
        if (k < prev_cov.size()) {
          EXPECT_FALSE(prev_cov[k][i].get<bool>());
        }
      }
      for (std::size_t k = 0; k < prev_cov.size(); ++k)
        for (std::size_t i = 0; i < prev_cov[k].size(); ++i)
          if (prev_cov[k][i].get<bool>()) {
            EXPECT_TRUE(st["coverage"][k][i].get<bool>());
          }
      prev_cov = st["coverage"];
      ++moves;
    }
  }
}

TEST(Service, RoutingErrors) {
  SessionManager m;
  expect_error(handle_request(m, "GET", "/api/sessions/s99", ""), 404, "config");
  expect_error(handle_request(m, "GET", "/api/nothing", ""), 404, "config");
  expect_error(handle_request(m, "DELETE", "/api/sessions/s99", ""), 404, "config");
  const auto st = post(m, "/api/sessions", json{{"role", "I"}, {"strategy", "random-p2:1"}, {"roundsN", 2}}, 201);
  const std::string base = "/api/sessions/" + sid(st);
  const json reply{{"sets", json::array({encode_clopen(ClopenSet::whole())})}};
  get(m, base + "/hint");
  const auto r = handle_request(m, "POST", base + "/moves", json{{"sets", json::array()}}.dump());
  expect_error(r, 409, "contract");
  EXPECT_EQ(handle_request(m, "DELETE", base, "").body["deleted"], sid(st));
  expect_error(handle_request(m, "GET", base, ""), 404, "config");
}

TEST(Service, WrongTurnIsContractError) {
  SessionManager m;
  const auto st = post(m, "/api/sessions", json{{"role", "II"}, {"strategy", "cantor-p1"}, {"roundsN", 1}}, 201);
  const std::string base = "/api/sessions/" + sid(st);
  const auto done = post(m, base + "/moves", get(m, base + "/hint"), 200);
  EXPECT_EQ(done["status"], "finished");
  expect_error(handle_request(m, "GET", base + "/hint", ""), 409, "contract");
  expect_error(handle_request(m, "POST", base + "/preview", "[]"), 409, "contract");
}

TEST(Service, EngineErrorIsReported) {
  SessionManager m;
  auto st = post(m, "/api/sessions", json{{"role", "II"}, {"strategy", "cantor-p1"}, {"roundsN", 6}}, 201);
  const std::string base = "/api/sessions/" + sid(st);
  for (int i = 0; i < 6 && st["status"] == "awaiting-human"; ++i) {
    json sets = json::array();
    std::set<ClopenSet> seen;
    for (const auto& u : last_family(st)) {
      Cylinder c = u.cylinders().front();
      for (Coord x = 0; c.size() < 13; ++x)
        if (!c.fixes(x)) c = c.with(x, 0);
      if (seen.insert(ClopenSet::of(c)).second) sets.push_back(encode_clopen(ClopenSet::of(c)));
    }
    st = post(m, base + "/moves", json{{"sets", sets}}, 200);
  }
  EXPECT_EQ(st["status"], "engine-error");
  EXPECT_NE(st["engineError"].get<std::string>().find("cap exceeded"), std::string::npos);
}

TEST(Service, CatalogEndpoints) {
  SessionManager m;
  const auto s = get(m, "/api/strategies");
  EXPECT_EQ(s.size(), strategy_catalog().size());
  EXPECT_EQ(s[0]["name"], "cantor-p1");
  const auto sp = get(m, "/api/spaces");
  EXPECT_EQ(sp[0], "cantor");
}

TEST(Service, OtherSpaces) {
  SessionManager m;
  const auto h = post(m, "/api/sessions",
                      json{{"space", "exp(cantor)"}, {"role", "II"}, {"strategy", "club-p1:exp(cj:0:1):1"}, {"roundsN", 2}},
                      201);
  EXPECT_FALSE(h.contains("measure"));
  auto st = h;
  const std::string base = "/api/sessions/" + sid(h);
  while (st["status"] == "awaiting-human") st = post(m, base + "/moves", get(m, base + "/hint"), 200);
  EXPECT_EQ(st["status"], "finished");
  const std::string lattice = std::string(OOG_DATA_DIR) + "/lattice4.json";
  const auto f = post(m, "/api/sessions",
                      json{{"space", "finite:" + lattice}, {"role", "I"}, {"strategy", "random-p2:0"}, {"roundsN", 1}},
                      201);
  const auto fin = post(m, "/api/sessions/" + sid(f) + "/moves", json::array({json::array({0, 1, 2, 3})}), 200);
  EXPECT_EQ(fin["status"], "finished");
}

TEST(Http, ServesTheApiOverSockets) {
  SessionManager m;
  httplib::Server server;
  mount_api(server, m);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/api/sessions", human_p2().dump(), "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const auto st = json::parse(created->body);
  const std::string base = "/api/sessions/" + sid(st);
  auto hint = client.Get(base + "/hint");
  ASSERT_TRUE(hint);
  EXPECT_EQ(hint->status, 200);
  auto moved = client.Post(base + "/moves", hint->body, "application/json");
  ASSERT_TRUE(moved);
  EXPECT_EQ(moved->status, 200);
  EXPECT_EQ(json::parse(moved->body)["round"], 1);
  auto missing = client.Get("/api/sessions/zzz");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto del = client.Delete(base);
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 200);
  auto cat = client.Get("/api/strategies");
  ASSERT_TRUE(cat);
  EXPECT_EQ(json::parse(cat->body).size(), strategy_catalog().size());
  server.stop();
  th.join();
}

TEST(Http, ConcurrentSessions) {
  SessionManager m;
  std::vector<std::thread> ts;
  std::vector<int> finished(4, 0);
  for (int i = 0; i < 4; ++i)
    ts.emplace_back([&, i] {
      auto st = m.create(human_p2(static_cast<std::uint64_t>(i), 3));
      const std::string id = sid(st);
      while (st["status"] == "awaiting-human") st = m.apply_move(id, m.hint(id));
      finished[static_cast<std::size_t>(i)] = st["status"] == "finished";
    });
  for (auto& t : ts) t.join();
  for (int f : finished) EXPECT_EQ(f, 1);
}

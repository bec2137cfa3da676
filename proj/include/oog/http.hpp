#pragma once

#include <httplib.h>

#include "oog/service.hpp"

namespace oog {

/// Mounts the JSON API on `server`.
inline void mount_api(httplib::Server& server, SessionManager& mgr) {
  auto route = [&mgr](const httplib::Request& req, httplib::Response& res) {
    const Response r = handle_request(mgr, req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  const std::string any = R"(/api/.*)";
  server.Get(any, route);
  server.Post(any, route);
  server.Delete(any, route);
}

/// Blocks serving the API until the server is stopped.
inline bool serve(const std::string& host, int port, const Limits& limits = {}) {
  SessionManager mgr(limits);
  httplib::Server server;
  mount_api(server, mgr);
  return server.listen(host, port);
}

}  // namespace oog

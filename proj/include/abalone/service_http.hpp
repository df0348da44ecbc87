#pragma once

// Binds a Service to a cpp-httplib server.

#include <string>

#include <httplib.h>

#include "abalone/service.hpp"

namespace abalone {

inline void bind_http(httplib::Server& server, Service& service) {
  auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
    const Response r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Get(R"(/databases)", forward);
  server.Get(R"(/sessions(/.*)?)", forward);
  server.Post(R"(/sessions(/.*)?)", forward);
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

}  // namespace abalone

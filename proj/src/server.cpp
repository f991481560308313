#include "kgsmith/server.hpp"

#include <algorithm>
#include <charconv>

#include <httplib.h>

namespace kgsmith {

using nlohmann::json;

namespace {

constexpr const char* json_type = "application/json";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), json_type);
}

void send_error(httplib::Response& res, ErrorCode code, std::string_view message) {
  send_json(res, http_status(code), error_body(code, message));
}

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded()) {
    throw Error(ErrorCode::InvalidArgument, "request body is not valid JSON");
  }
  return body;
}

std::uint64_t parse_id(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, "'" + s + "' is not a numeric id");
  }
  return v;
}

template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const std::exception& e) {
      send_error(res, ErrorCode::IoFailure, e.what());
    }
  };
}

} // namespace

struct Server::Impl {
  Platform& platform;
  ServerConfig config;
  httplib::Server http;

  Impl(Platform& p, ServerConfig c) : platform(p), config(std::move(c)) {}

  void routes();
};

void Server::Impl::routes() {
  // Multipart framing needs some headroom over the file itself; the exact
  // limit is enforced by Platform::ingest.
  http.set_payload_max_length(platform.config().max_upload_bytes + (std::size_t{1} << 20));

  http.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const std::string origin = req.get_header_value("Origin");
    const auto& allowed = config.cors_origins;
    if (!origin.empty() &&
        std::any_of(allowed.begin(), allowed.end(), [&](const std::string& o) { return o == "*" || o == origin; })) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    }
    if (req.method == "OPTIONS") {
      res.status = 204;
      return httplib::Server::HandlerResponse::Handled;
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) {
      return;
    }
    if (res.status == 413) {
      send_error(res, ErrorCode::PayloadTooLarge, "request body exceeds the upload limit");
    } else if (res.status == 404) {
      res.set_content(json({{"code", "NotFound"}, {"message", "no such endpoint"}}).dump(), json_type);
    }
  });

  http.Post("/api/kgs", guarded([this](const httplib::Request& req, httplib::Response& res) {
              send_json(res, 201, platform.create_kg(parse_body(req)));
            }));

  http.Get("/api/kgs", guarded([this](const httplib::Request&, httplib::Response& res) {
             send_json(res, 200, platform.list_kgs());
           }));

  http.Get("/api/kgs/:name", guarded([this](const httplib::Request& req, httplib::Response& res) {
             send_json(res, 200, platform.get_kg(req.path_params.at("name")));
           }));

  http.Delete("/api/kgs/:name", guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, platform.delete_kg(req.path_params.at("name")));
              }));

  http.Post("/api/kgs/:name/data", guarded([this](const httplib::Request& req, httplib::Response& res) {
              const std::string& name = req.path_params.at("name");
              if (req.is_multipart_form_data()) {
                if (!req.has_file("file")) {
                  throw Error(ErrorCode::InvalidArgument, "multipart upload needs a 'file' part");
                }
                send_json(res, 200, platform.ingest(name, req.get_file_value("file").content));
              } else {
                send_json(res, 200, platform.ingest(name, req.body));
              }
            }));

  http.Get("/api/kgs/:name/graph", guarded([this](const httplib::Request& req, httplib::Response& res) {
             GraphQuery q;
             if (req.has_param("entity")) q.entity = req.get_param_value("entity");
             if (req.has_param("type")) q.type = req.get_param_value("type");
             if (req.has_param("relation")) q.relation = req.get_param_value("relation");
             send_json(res, 200, platform.graph(req.path_params.at("name"), q));
           }));

  http.Delete("/api/kgs/:name/nodes/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200,
                          platform.delete_node(req.path_params.at("name"), parse_id(req.path_params.at("id"))));
              }));

  http.Delete("/api/kgs/:name/edges/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200,
                          platform.delete_edge(req.path_params.at("name"), parse_id(req.path_params.at("id"))));
              }));

  http.Get("/api/kgs/:name/export.cypher", guarded([this](const httplib::Request& req, httplib::Response& res) {
             res.status = 200;
             res.set_content(platform.export_cypher(req.path_params.at("name")), "text/plain; charset=utf-8");
           }));

  http.Post("/api/qa", guarded([this](const httplib::Request& req, httplib::Response& res) {
              send_json(res, 200, platform.qa(parse_body(req)));
            }));

  http.Post("/api/dialogue/analyze", guarded([this](const httplib::Request& req, httplib::Response& res) {
              send_json(res, 200, platform.analyze(parse_body(req)));
            }));
}

Server::Server(Platform& platform, ServerConfig config)
    : impl_(std::make_unique<Impl>(platform, std::move(config))) {
  impl_->routes();
}

Server::~Server() {
  stop();
}

int Server::bind() {
  int port = impl_->config.port;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(impl_->config.host);
  } else if (!impl_->http.bind_to_port(impl_->config.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(ErrorCode::IoFailure, "cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
  }
  return port;
}

void Server::serve() {
  impl_->http.listen_after_bind();
}

void Server::stop() {
  if (impl_ && impl_->http.is_running()) {
    impl_->http.stop();
  }
}

void Server::wait_until_ready() const {
  impl_->http.wait_until_ready();
}

} // namespace kgsmith

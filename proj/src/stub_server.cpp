// Copyright 2026 The fpensemble Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fpensemble/stub_server.hpp"

#include <atomic>
#include <thread>

#include <sys/socket.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fpensemble/error.hpp"
#include "fpensemble/scripted_model.hpp"

namespace fpensemble {

struct StubServer::Impl {
  std::shared_ptr<const Provider> provider;
  httplib::Server server;
  std::thread worker;
  bool bound = false;
  std::atomic<bool> served{false};
};

namespace {

struct BadRequest {
  std::string message;
};

nlohmann::json parse_body(const httplib::Request& req) {
  auto j = nlohmann::json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw BadRequest{"body must be a JSON object"};
  return j;
}

template <typename T>
T field(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) throw BadRequest{std::string("missing field '") + name + "'"};
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw BadRequest{std::string("bad field '") + name + "'"};
  }
}

template <typename Fn>
httplib::Server::Handler json_handler(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(fn(parse_body(req)).dump(), "application/json");
      res.status = 200;
    } catch (const BadRequest& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.message}}.dump(), "application/json");
    } catch (const Error& e) {
      res.status = e.code() == Errc::context_rejected ? 422 : 500;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  };
}

}  // namespace

StubServer::StubServer(std::shared_ptr<const Provider> provider) : impl_(std::make_unique<Impl>()) {
  impl_->provider = std::move(provider);
  const Provider* p = impl_->provider.get();

  // httplib defaults to SO_REUSEPORT, which lets a second server share a live port.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  impl_->server.Post("/v1/topk", json_handler([p](const nlohmann::json& body) {
    const auto context = field<std::string>(body, "context");
    const auto k = field<std::size_t>(body, "k");
    const double temperature = body.contains("temperature") ? field<double>(body, "temperature") : 1.0;
    if (k == 0) throw BadRequest{"k must be >= 1"};
    return entries_to_json(p->top_k_next(context, k, temperature).entries);
  }));

  impl_->server.Post("/v1/generate", json_handler([p](const nlohmann::json& body) {
    const auto prompt = field<std::string>(body, "prompt");
    GenerationParams params;
    if (body.contains("params")) {
      try {
        params = generation_params_from_json(body.at("params"));
      } catch (const Error& e) {
        throw BadRequest{e.what()};
      }
    }
    return nlohmann::json{{"text", p->generate(prompt, params)}};
  }));

  impl_->server.Post("/v1/logprobs", json_handler([p](const nlohmann::json& body) {
    const auto text = field<std::string>(body, "text");
    return nlohmann::json{{"logprobs", p->token_log_probs(text)}};
  }));
}

StubServer::~StubServer() { stop(); }

int StubServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(Errc::port_in_use, "cannot bind any port on " + host);
    impl_->bound = true;
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port))
    throw Error(Errc::port_in_use, "cannot bind " + host + ":" + std::to_string(port));
  impl_->bound = true;
  return port;
}

void StubServer::serve() {
  impl_->served = true;
  impl_->server.listen_after_bind();
}

int StubServer::start_background(const std::string& host, int port) {
  const int bound = bind(host, port);
  impl_->worker = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
  return bound;
}

void StubServer::stop() {
  // httplib only closes the listening socket of a running server.
  if (impl_->bound && !impl_->served) {
    impl_->worker = std::thread([this] { serve(); });
    impl_->server.wait_until_ready();
  }
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace fpensemble

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

#include "fpensemble/remote_provider.hpp"

#include <thread>

#include <httplib.h>

#include "fpensemble/error.hpp"
#include "fpensemble/scripted_model.hpp"

namespace fpensemble {

namespace {

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

RemoteProvider::RemoteProvider(std::string base_url, RemoteOptions options)
    : base_url_(std::move(base_url)), options_(options) {
  if (options_.max_in_flight == 0 || options_.max_in_flight > 1024)
    throw Error(Errc::invalid_argument, "max_in_flight must be in [1,1024]");
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  slots_ = std::make_unique<std::counting_semaphore<1024>>(
      static_cast<std::ptrdiff_t>(options_.max_in_flight));
}

nlohmann::json RemoteProvider::post(const std::string& path, const nlohmann::json& body) const {
  const std::string payload = body.dump();
  auto backoff = options_.initial_backoff;
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Result res;
    {
      SlotGuard guard(*slots_);
      httplib::Client client(base_url_);
      const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
      client.set_connection_timeout(secs.count(), usecs.count());
      client.set_read_timeout(secs.count(), usecs.count());
      res = client.Post(path, payload, "application/json");
    }
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 422)
      throw Error(Errc::context_rejected, base_url_ + path + " rejected the request: " + res->body);
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw Error(Errc::provider_unavailable,
                  base_url_ + path + " returned HTTP " + std::to_string(res->status));
    auto parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object())
      throw Error(Errc::context_rejected, base_url_ + path + " returned a malformed body");
    return parsed;
  }
  throw Error(Errc::provider_unavailable, base_url_ + path + ": " + last_error);
}

TopKDistribution RemoteProvider::top_k_next(std::string_view context, std::size_t k,
                                            double temperature) const {
  if (k == 0) throw Error(Errc::invalid_argument, "k must be >= 1");
  nlohmann::json body{{"context", std::string(context)}, {"k", k}};
  if (temperature != 1.0) body["temperature"] = temperature;
  const auto reply = post("/v1/topk", body);
  TopKDistribution out;
  try {
    out.entries = entries_from_json(reply);
  } catch (const Error& e) {
    // A reply that is not a valid distribution is a malformed body.
    if (e.code() == Errc::context_rejected) throw;
    throw Error(Errc::context_rejected, "topk reply is not a valid distribution: " +
                                            std::string(e.what()));
  }
  if (out.entries.size() > k) out.entries.resize(k);
  return out;
}

std::string RemoteProvider::generate(std::string_view prompt,
                                     const GenerationParams& params) const {
  validate(params);
  const auto reply = post("/v1/generate", {{"prompt", std::string(prompt)}, {"params", to_json(params)}});
  if (!reply.contains("text") || !reply.at("text").is_string())
    throw Error(Errc::context_rejected, "generate reply lacks \"text\"");
  return reply.at("text").get<std::string>();
}

std::vector<double> RemoteProvider::token_log_probs(std::string_view text) const {
  if (text.empty()) throw Error(Errc::context_rejected, "cannot score empty text");
  const auto reply = post("/v1/logprobs", {{"text", std::string(text)}});
  if (!reply.contains("logprobs") || !reply.at("logprobs").is_array())
    throw Error(Errc::context_rejected, "logprobs reply lacks \"logprobs\"");
  std::vector<double> out;
  for (const auto& v : reply.at("logprobs")) {
    if (!v.is_number() || v.get<double>() > 0.0)
      throw Error(Errc::context_rejected, "malformed log-probability in reply");
    out.push_back(v.get<double>());
  }
  if (out.empty()) throw Error(Errc::context_rejected, "empty logprobs reply");
  return out;
}

}  // namespace fpensemble

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

#pragma once

#include <memory>
#include <string>

#include "fpensemble/provider.hpp"

namespace fpensemble {

/// Serves any Provider over the remote wire protocol. Each request is handled
/// independently against the shared, read-only provider.
///
/// Status mapping: ContextRejected -> 422, malformed request -> 400,
/// any other failure -> 500.
class StubServer {
 public:
  explicit StubServer(std::shared_ptr<const Provider> provider);
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  /// Binds to `port` (0 = any free port) and returns the bound port.
  /// Throws PortInUse when the port cannot be bound.
  int bind(const std::string& host, int port);

  /// Blocks serving requests until stop() is called.
  void serve();

  /// bind() + serve() on a background thread; returns the bound port.
  int start_background(const std::string& host = "127.0.0.1", int port = 0);

  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fpensemble

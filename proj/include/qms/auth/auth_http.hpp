// Copyright 2026 The QMS Authors.
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

#include "qms/auth/auth_service.hpp"

#include "qms/common/httplib.hpp"

namespace qms::auth {

/// POST /auth/signup, POST /auth/signin, POST /auth/signout,
/// GET /auth/verify, POST /auth/propagation/retry.
void register_routes(httplib::Server& server, AuthService& service);

}  // namespace qms::auth

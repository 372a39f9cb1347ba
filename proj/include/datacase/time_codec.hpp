// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#pragma once

#include <string>

#include "datacase/status.hpp"
#include "datacase/types.hpp"

namespace datacase {

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" and "YYYY-MM-DDTHH:MM:SSZ",
// always interpreted as UTC. Dates before 1970-01-01 are rejected.
Result<Timestamp> parse_iso8601(const std::string& text);

// "YYYY-MM-DDTHH:MM:SSZ", UTC.
std::string format_iso8601(Timestamp t);

}  // namespace datacase

// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include <doctest.h>

#include "datacase/time_codec.hpp"

using namespace datacase;

TEST_CASE("iso8601 parse of known instants") {
  CHECK(parse_iso8601("1970-01-01").value() == 0);
  CHECK(parse_iso8601("2023-01-01").value() == 1672531200);
  CHECK(parse_iso8601("2024-01-01").value() == 1704067200);
  CHECK(parse_iso8601("2023-02-26T00:10:00Z").value() == 1677370200);
  CHECK(parse_iso8601("2022-12-31").value() == 1672444800);
  CHECK(parse_iso8601("2023-01-02").value() == 1672617600);
  CHECK(parse_iso8601("2023-01-01T00:00:00").value() == 1672531200);
}

TEST_CASE("iso8601 rejects malformed input") {
  CHECK_FALSE(parse_iso8601("").is_ok());
  CHECK_FALSE(parse_iso8601("2023/01/01").is_ok());
  CHECK_FALSE(parse_iso8601("2023-13-01").is_ok());
  CHECK_FALSE(parse_iso8601("2023-02-30").is_ok());
  CHECK_FALSE(parse_iso8601("2023-01-01T25:00:00Z").is_ok());
  CHECK_FALSE(parse_iso8601("010123").is_ok());
  CHECK_FALSE(parse_iso8601("1969-12-31").is_ok());
}

TEST_CASE("format round-trips parse on a coarse grid") {
  for (Timestamp t = 0; t < 4'000'000'000ULL; t += 86'399'137ULL) {
    const std::string text = format_iso8601(t);
    auto back = parse_iso8601(text);
    REQUIRE(back.is_ok());
    CHECK(back.value() == t);
  }
  CHECK(format_iso8601(1677370200) == "2023-02-26T00:10:00Z");
}

TEST_CASE("leap day accepted") {
  CHECK(parse_iso8601("2024-02-29").is_ok());
  CHECK_FALSE(parse_iso8601("2023-02-29").is_ok());
}

// Copyright (c) 2026 the datacase authors. All rights reserved.
// This source code is licensed under the Apache 2.0 license found in
// the LICENSE file in the root directory of this source tree.

#include "datacase/time_codec.hpp"

#include <cstdio>
#include <cstdint>

namespace datacase {
namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += (m <= 2);
}

bool parse_fixed_uint(const std::string& s, size_t pos, size_t len, unsigned& out) {
  unsigned v = 0;
  if (pos + len > s.size()) return false;
  for (size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + static_cast<unsigned>(s[i] - '0');
  }
  out = v;
  return true;
}

unsigned days_in_month(unsigned y, unsigned m) {
  static const unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2) {
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return leap ? 29 : 28;
  }
  return kDays[m - 1];
}

}  // namespace

Result<Timestamp> parse_iso8601(const std::string& text) {
  unsigned y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
  const Status bad(Code::kInvalidArgument, "not an ISO-8601 UTC timestamp: " + text);
  if (text.size() != 10 && text.size() != 19 && text.size() != 20) return bad;
  if (!parse_fixed_uint(text, 0, 4, y) || text[4] != '-' ||
      !parse_fixed_uint(text, 5, 2, mo) || text[7] != '-' ||
      !parse_fixed_uint(text, 8, 2, d)) {
    return bad;
  }
  if (text.size() > 10) {
    if (text[10] != 'T') return bad;
    if (!parse_fixed_uint(text, 11, 2, h) || text[13] != ':' ||
        !parse_fixed_uint(text, 14, 2, mi) || text[16] != ':' ||
        !parse_fixed_uint(text, 17, 2, se)) {
      return bad;
    }
    if (text.size() == 20 && text[19] != 'Z') return bad;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo)) return bad;
  if (h > 23 || mi > 59 || se > 60) return bad;
  const std::int64_t days = days_from_civil(y, mo, d);
  if (days < 0) return Status(Code::kInvalidArgument, "timestamps before 1970 unsupported: " + text);
  return static_cast<Timestamp>(days) * 86400u + h * 3600u + mi * 60u + se;
}

std::string format_iso8601(Timestamp t) {
  std::int64_t y;
  unsigned mo, d;
  civil_from_days(static_cast<std::int64_t>(t / 86400), y, mo, d);
  const unsigned sod = static_cast<unsigned>(t % 86400);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02u:%02u:%02uZ",
                static_cast<long long>(y), mo, d, sod / 3600, (sod / 60) % 60, sod % 60);
  return buf;
}

}  // namespace datacase

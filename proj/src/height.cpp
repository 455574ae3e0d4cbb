#include "umcalc/height.hpp"

#include <cstdio>
#include <cstdlib>

namespace umcalc {

std::string Height::str() const {
  std::int64_t u = units_;
  std::string sign;
  if (u < 0) {
    sign = "-";
    u = -u;
  }
  const std::int64_t whole = u / kScale;
  std::int64_t frac = u % kScale;
  if (frac == 0) {
    return sign + std::to_string(whole);
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%012lld", static_cast<long long>(frac));
  std::string digits(buf);
  while (!digits.empty() && digits.back() == '0') {
    digits.pop_back();
  }
  return sign + std::to_string(whole) + "." + digits;
}

}  // namespace umcalc

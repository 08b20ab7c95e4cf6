#include "mupir/rational.hpp"

#include "mupir/errors.hpp"

namespace mupir {

Rat rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(std::stoll(s));
    long long num = std::stoll(s.substr(0, slash));
    long long den = std::stoll(s.substr(slash + 1));
    if (den == 0) throw InvalidParameter("rational with zero denominator: " + s);
    return Rat(num, den);
  } catch (const std::invalid_argument&) {
    throw InvalidParameter("malformed rational: " + s);
  } catch (const std::out_of_range&) {
    throw InvalidParameter("rational out of range: " + s);
  }
}

}  // namespace mupir

#include "dpmix/random.hpp"

#include <numeric>
#include <sstream>
#include <vector>

#include "dpmix/errors.hpp"

namespace dpmix {

std::size_t RandomSource::categorical(const std::vector<double>& weights) {
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) {
    throw ParameterError("categorical: weights must have positive total mass");
  }
  double u = uniform() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (u < cum) return i;
  }
  // u landed on the accumulated rounding boundary: last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

std::string RandomSource::save_state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void RandomSource::restore_state(const std::string& text) {
  std::istringstream is(text);
  is >> engine_;
  if (is.fail()) throw ParameterError("RandomSource: bad engine state string");
}

}  // namespace dpmix

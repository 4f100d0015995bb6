#include "spincm/errors.hpp"

namespace spincm {

CollidingPoles::CollidingPoles(const std::string& what, double separation, Complex time)
    : Error(what), separation_(separation), time_(time) {}

ConstraintViolated::ConstraintViolated(const std::string& what, double violation)
    : Error(what), violation_(violation) {}

SpectralCollision::SpectralCollision(const std::string& what, double rcond)
    : Error(what), rcond_(rcond) {}

}  // namespace spincm

#include "nnrank/errors.hpp"

#include <sstream>

namespace nnrank {

namespace {

std::string outside_ball_message(double distance, double radius) {
    std::ostringstream os;
    os.precision(17);
    os << "outside ball: distance " << distance << " >= radius " << radius;
    return os.str();
}

}  // namespace

OutsideBall::OutsideBall(double distance, double radius)
    : Error(outside_ball_message(distance, radius)), distance_(distance), radius_(radius) {}

RankOutOfRange::RankOutOfRange(const std::string& what, long jacobian_cap) : Error(what), cap_(jacobian_cap) {}

}  // namespace nnrank

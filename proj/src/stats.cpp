#include "pathdep/stats.hpp"

#include <boost/math/distributions/normal.hpp>

namespace pathdep {

double normal_two_sided_z(double alpha) {
    boost::math::normal_distribution<double> nd(0.0, 1.0);
    return boost::math::quantile(nd, 1.0 - alpha / 2.0);
}

double bonferroni_z(double base_z, std::size_t cells) {
    if (cells <= 1) return base_z;
    boost::math::normal_distribution<double> nd(0.0, 1.0);
    const double alpha = 2.0 * boost::math::cdf(boost::math::complement(nd, base_z));
    return normal_two_sided_z(alpha / static_cast<double>(cells));
}

} // namespace pathdep

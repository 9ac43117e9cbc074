#pragma once

// Independent Student-t oracle for the tests, backed by Boost.Math. The
// production code never links this; it exists to check the hand-rolled
// sampler and the Monte Carlo calibration from a second route.

#include <boost/math/distributions/students_t.hpp>

inline double t_quantile(double dof, double p) {
    return boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
}

inline double t_cdf(double dof, double x) {
    return boost::math::cdf(boost::math::students_t_distribution<double>(dof), x);
}

// Copyright 2026 The assosm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Published data matrices and decision variables, rounded to four decimals.

#ifndef ASSOSM_TESTS_FIXTURES_HPP_
#define ASSOSM_TESTS_FIXTURES_HPP_

#include "assosm/data.hpp"
#include "assosm/design.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>

namespace fixtures {

inline Eigen::MatrixXd row(std::initializer_list<double> v) {
  Eigen::MatrixXd m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

inline assosm::DesignData pendulum_data() {
  assosm::DesignData d;
  d.upper = row({1, 1.0588, 1.0397});
  d.last = row({1, 0.1857, -0.5515});
  d.upper_rates = row({0.9366, -0.5117, -1.3232});
  d.inputs = row({0.1, 0.1 * std::cos(0.1), 0.1 * std::cos(0.2)});
  return d;
}

inline assosm::DesignData linear_data() {
  assosm::DesignData d;
  d.upper = row({2, 3.3133, 4.0258});
  d.last = row({3, 2.1330, 0.6289});
  d.upper_rates = row({3.3242, 0.7827, -1.1786});
  d.inputs = -2.0 * d.upper - d.last;
  return d;
}

inline Eigen::RowVectorXd b3_gain() {
  Eigen::RowVectorXd k(3);
  k << -0.2832, 0.2328, -0.1733;
  return k;
}

inline Eigen::MatrixXd b3_p() {
  Eigen::MatrixXd p(3, 3);
  p << 20.2193, 8.1914, -21.1564,
       8.1914, 8.9159, -2.7685,
       -21.1564, -2.7685, 31.4177;
  return p;
}

}  // namespace fixtures

#endif  // ASSOSM_TESTS_FIXTURES_HPP_

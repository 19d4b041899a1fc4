// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "sdsm/errors.hpp"
#include "sdsm/filter_designs.hpp"
#include "sdsm/serialize.hpp"

using namespace sdsm;

TEST_CASE("design JSON round trip") {
  const FilterDesign d = band_stop(3, 0.7, 30);
  const FilterDesign back = design_from_json(nlohmann::json::parse(design_to_json(d).dump()));
  CHECK(back.amplitude() == d.amplitude());
  CHECK(back.m_levels() == 30);
  CHECK(back.coeffs() == d.coeffs());
  const FilterDesign d2 = first_order_2d(5);
  const FilterDesign back2 = design_from_json(design_to_json(d2));
  CHECK(back2.is_2d());
  CHECK(back2.coeffs_2d() == d2.coeffs_2d());
  CHECK(design_to_json(d2)["kind"] == "2d");
  CHECK(design_to_json(d)["overload_safe"] == true);
}

TEST_CASE("malformed design JSON") {
  nlohmann::json j = design_to_json(first_order(3));
  j.erase("amplitude");
  CHECK_THROWS_AS(design_from_json(j), ConfigError);
  j = design_to_json(first_order(3));
  j["kind"] = "3d";
  CHECK_THROWS_AS(design_from_json(j), ConfigError);
  j = design_to_json(first_order(3));
  j["coeffs_im"] = nlohmann::json::array();
  CHECK_THROWS_AS(design_from_json(j), ConfigError);
  CHECK_THROWS_AS(design_from_json(nlohmann::json::array()), ConfigError);
}

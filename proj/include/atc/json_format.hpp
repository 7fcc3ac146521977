#pragma once

#include <json.hpp>
#include <string>
#include "atc/grid.hpp"
#include "atc/region.hpp"

namespace atc
{

// Serialize with every floating-point number printed to 17 significant digits,
// so equal values always produce identical bytes.
std::string dump_json(const nlohmann::json &j, int indent = 2);

nlohmann::json to_json(cplx z);  // [re, im]
nlohmann::json to_json(const Vec3c &v);
nlohmann::json to_json(const Eigen::MatrixXcd &m);  // {"re": rows, "im": rows}
nlohmann::json to_json(const Region &r);

}  // namespace atc

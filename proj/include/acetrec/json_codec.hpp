#pragma once

#include "acetrec/mesh.hpp"

#include <json.hpp>

namespace acetrec {

using json = nlohmann::json;

void to_json(json& j, const View& view);
void from_json(const json& j, View& view);

void to_json(json& j, const SimilarityTransform& xf);
void from_json(const json& j, SimilarityTransform& xf);

/// Row-major 9-element array.
json mat3_to_json(const Mat3& m);
Mat3 mat3_from_json(const json& j);

json vec3_to_json(const Vec3& v);
Vec3 vec3_from_json(const json& j);

}  // namespace acetrec

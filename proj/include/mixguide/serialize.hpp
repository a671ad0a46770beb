#pragma once

#include "mixguide/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mixguide {

// Flat object: {"w": [...], "x_center": [...], "x_scale": [...], "y_center": r}
nlohmann::json model_to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& j);

// Tagged array, one object per item, e.g. {"kind": "relative", "hi": 3, "lo": 0}.
nlohmann::json guidance_items_to_json(const std::vector<GuidanceItem>& items);
std::vector<GuidanceItem> guidance_items_from_json(const nlohmann::json& j);

void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

}  // namespace mixguide

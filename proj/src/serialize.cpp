#include "mixguide/serialize.hpp"

#include "mixguide/errors.hpp"

#include <fstream>

namespace mixguide {

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& arr, const char* field) {
  if (!arr.is_array()) fail(Errc::ParseError, std::string(field) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& x : arr) {
    if (!x.is_number()) fail(Errc::ParseError, std::string(field) + " holds a non-number");
    v(i++) = x.get<double>();
  }
  return v;
}

}  // namespace

nlohmann::json model_to_json(const LinearModel& model) {
  return nlohmann::json{{"w", vec_to_json(model.w)},
                        {"x_center", vec_to_json(model.x_center)},
                        {"x_scale", vec_to_json(model.x_scale)},
                        {"y_center", model.y_center}};
}

LinearModel model_from_json(const nlohmann::json& j) {
  LinearModel m;
  m.w = vec_from_json(j.at("w"), "w");
  m.x_center = vec_from_json(j.at("x_center"), "x_center");
  m.x_scale = vec_from_json(j.at("x_scale"), "x_scale");
  m.y_center = j.at("y_center").get<double>();
  if (m.x_center.size() != m.w.size() || m.x_scale.size() != m.w.size())
    fail(Errc::DimensionMismatch, "model fields disagree on dimension");
  for (Eigen::Index i = 0; i < m.x_scale.size(); ++i)
    if (!(m.x_scale(i) > 0.0)) fail(Errc::ParseError, "x_scale entries must be positive");
  return m;
}

nlohmann::json guidance_items_to_json(const std::vector<GuidanceItem>& items) {
  nlohmann::json arr = nlohmann::json::array();
  for (const GuidanceItem& item : items) {
    nlohmann::json j;
    std::visit(
        [&j](const auto& it) {
          using T = std::decay_t<decltype(it)>;
          if constexpr (std::is_same_v<T, RelativeItem>) {
            j = {{"kind", "relative"}, {"hi", it.hi}, {"lo", it.lo}};
          } else if constexpr (std::is_same_v<T, BoundItem>) {
            j = {{"kind", "bound"}, {"idx", it.idx}, {"a", it.a}, {"b", it.b}};
          } else if constexpr (std::is_same_v<T, NeighborItem>) {
            j = {{"kind", "neighbor"},
                 {"i", it.i},
                 {"j", it.j},
                 {"k", it.k},
                 {"side", it.side == NeighborSide::Above ? "above" : "below"}};
          } else {
            j = {{"kind", "similar"}, {"i", it.i}, {"j", it.j}};
          }
        },
        item);
    arr.push_back(std::move(j));
  }
  return arr;
}

std::vector<GuidanceItem> guidance_items_from_json(const nlohmann::json& j) {
  if (!j.is_array()) fail(Errc::ParseError, "guidance items must be an array");
  std::vector<GuidanceItem> items;
  items.reserve(j.size());
  for (const auto& obj : j) {
    const std::string kind = obj.at("kind").get<std::string>();
    if (kind == "relative") {
      items.push_back(RelativeItem{obj.at("hi").get<Eigen::Index>(),
                                   obj.at("lo").get<Eigen::Index>()});
    } else if (kind == "bound") {
      items.push_back(BoundItem{obj.at("idx").get<Eigen::Index>(), obj.at("a").get<double>(),
                                obj.at("b").get<double>()});
    } else if (kind == "neighbor") {
      const std::string side = obj.at("side").get<std::string>();
      if (side != "above" && side != "below")
        fail(Errc::ParseError, "neighbor side must be 'above' or 'below'");
      items.push_back(NeighborItem{obj.at("i").get<Eigen::Index>(), obj.at("j").get<Eigen::Index>(),
                                   obj.at("k").get<Eigen::Index>(),
                                   side == "above" ? NeighborSide::Above : NeighborSide::Below});
    } else if (kind == "similar") {
      items.push_back(SimilarItem{obj.at("i").get<Eigen::Index>(), obj.at("j").get<Eigen::Index>()});
    } else {
      fail(Errc::ParseError, "unknown guidance item kind '" + kind + "'");
    }
  }
  return items;
}

void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(Errc::IoError, "write failed for '" + path + "'");
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("bad JSON in '") + path + "': " + e.what());
  }
  return j;
}

}  // namespace mixguide

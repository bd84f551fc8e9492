#include <fstream>
#include <initializer_list>
#include <string_view>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"
#include "chainforge/model.hpp"

namespace chainforge {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ParseError(where + ": unknown key '" + key + "'");
  }
}

const json& member(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where + ": missing key '" + key + "'");
  }
  return *it;
}

double number(const json& obj, const std::string& where, const char* key) {
  const auto& v = member(obj, where, key);
  if (!v.is_number()) {
    throw ParseError(where + "." + key + ": expected a number");
  }
  return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key,
                 double fallback) {
  return obj.contains(key) ? number(obj, where, key) : fallback;
}

std::string text(const json& obj, const std::string& where, const char* key) {
  const auto& v = member(obj, where, key);
  if (!v.is_string()) {
    throw ParseError(where + "." + key + ": expected a string");
  }
  return v.get<std::string>();
}

Point point(const json& obj, const std::string& where, const char* key) {
  const auto& v = member(obj, where, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    throw ParseError(where + "." + key + ": expected [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

const json& array(const json& obj, const std::string& where, const char* key) {
  const auto& v = member(obj, where, key);
  if (!v.is_array()) throw ParseError(where + "." + key + ": expected an array");
  return v;
}

DemandSpec parse_demand(const json& obj, const std::string& where) {
  check_keys(obj, where, {"family", "mean", "variance", "spread"});
  if (text(obj, where, "family") != "normal") {
    throw ParseError(where + ".family: only \"normal\" is supported");
  }
  DemandSpec d;
  d.mean = number(obj, where, "mean");
  d.variance = number(obj, where, "variance");
  if (obj.contains("spread")) {
    const auto spread = text(obj, where, "spread");
    if (spread == "stddev") {
      d.spread_is_stddev = true;
    } else if (spread != "variance") {
      throw ParseError(where + ".spread: expected \"variance\" or \"stddev\"");
    }
  }
  return d;
}

json demand_to_json(const DemandSpec& d) {
  json out = {{"family", "normal"}, {"mean", d.mean}, {"variance", d.variance}};
  if (d.spread_is_stddev) out["spread"] = "stddev";
  return out;
}

}  // namespace

NetworkInstance parse_instance(const json& doc) {
  const std::string root = "instance";
  check_keys(doc, root,
             {"name", "warehouses", "regions", "nutrients", "path_weights",
              "stochastic", "safety_stock_fraction", "horizon",
              "normalization_scales", "persons_per_area"});
  NetworkInstance inst;
  if (doc.contains("name")) inst.name = text(doc, root, "name");

  const auto& stochastic = member(doc, root, "stochastic");
  check_keys(stochastic, "stochastic", {"demand", "supply_loss"});
  inst.default_demand =
      parse_demand(member(stochastic, "stochastic", "demand"), "stochastic.demand");
  {
    const auto& s = member(stochastic, "stochastic", "supply_loss");
    const std::string where = "stochastic.supply_loss";
    check_keys(s, where, {"family", "low", "high"});
    if (text(s, where, "family") != "uniform") {
      throw ParseError(where + ".family: only \"uniform\" is supported");
    }
    inst.supply.low = number(s, where, "low");
    inst.supply.high = number(s, where, "high");
  }

  const auto& warehouses = array(doc, root, "warehouses");
  for (std::size_t i = 0; i < warehouses.size(); ++i) {
    const auto& w = warehouses[i];
    const std::string where = "warehouses[" + std::to_string(i) + "]";
    check_keys(w, where, {"id", "location", "capacity", "order_unit_cost"});
    Warehouse out;
    out.id = text(w, where, "id");
    out.location = point(w, where, "location");
    out.capacity = number(w, where, "capacity");
    const auto& cost = member(w, where, "order_unit_cost");
    if (cost.is_number()) {
      out.order_unit_cost = cost.get<double>();
    } else {
      const std::string cw = where + ".order_unit_cost";
      check_keys(cost, cw, {"default", "per_dc"});
      out.order_unit_cost = number(cost, cw, "default");
      if (cost.contains("per_dc")) {
        const auto& per = cost["per_dc"];
        if (!per.is_object()) throw ParseError(cw + ".per_dc: expected an object");
        for (const auto& [dc, v] : per.items()) {
          if (!v.is_number()) throw ParseError(cw + ".per_dc: expected numbers");
          out.order_unit_cost_by_dc[dc] = v.get<double>();
        }
      }
    }
    inst.warehouses.push_back(std::move(out));
  }

  const auto& regions = array(doc, root, "regions");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto& r = regions[i];
    const std::string where = "regions[" + std::to_string(i) + "]";
    check_keys(r, where,
               {"id", "local_food_cost", "average_income", "residential_areas",
                "unfulfilled_unit_cost", "accessibility_weights", "dcs",
                "customers"});
    Region region;
    region.id = text(r, where, "id");
    region.local_food_cost = number(r, where, "local_food_cost");
    region.average_income = number(r, where, "average_income");
    const auto& areas = member(r, where, "residential_areas");
    if (!areas.is_number_integer()) {
      throw ParseError(where + ".residential_areas: expected an integer");
    }
    region.residential_areas = areas.get<int>();
    region.unfulfilled_unit_cost = number(r, where, "unfulfilled_unit_cost");
    if (r.contains("accessibility_weights")) {
      const auto& w = r["accessibility_weights"];
      const std::string ww = where + ".accessibility_weights";
      check_keys(w, ww, {"affordability", "transportation", "quality"});
      region.weights.affordability = number_or(w, ww, "affordability", 1.0);
      region.weights.transportation = number_or(w, ww, "transportation", 1.0);
      region.weights.quality = number_or(w, ww, "quality", 1.0);
    }
    const std::size_t region_index = inst.regions.size();
    inst.regions.push_back(std::move(region));

    const auto& dcs = array(r, where, "dcs");
    for (std::size_t k = 0; k < dcs.size(); ++k) {
      const auto& h = dcs[k];
      const std::string hw = where + ".dcs[" + std::to_string(k) + "]";
      check_keys(h, hw, {"id", "capacity", "inventory_unit_cost", "location"});
      DistributionCenter dc;
      dc.id = text(h, hw, "id");
      dc.region = region_index;
      dc.capacity = number(h, hw, "capacity");
      dc.inventory_unit_cost = number(h, hw, "inventory_unit_cost");
      if (h.contains("location")) dc.location = point(h, hw, "location");
      inst.dcs.push_back(std::move(dc));
    }
    const auto& customers = array(r, where, "customers");
    for (std::size_t k = 0; k < customers.size(); ++k) {
      const auto& c = customers[k];
      const std::string cw = where + ".customers[" + std::to_string(k) + "]";
      check_keys(c, cw, {"id", "location", "demand"});
      Customer customer;
      customer.id = text(c, cw, "id");
      customer.region = region_index;
      customer.location = point(c, cw, "location");
      customer.demand = c.contains("demand")
                            ? parse_demand(c["demand"], cw + ".demand")
                            : inst.default_demand;
      inst.customers.push_back(std::move(customer));
    }
  }

  const auto& nutrients = array(doc, root, "nutrients");
  for (std::size_t i = 0; i < nutrients.size(); ++i) {
    const auto& n = nutrients[i];
    const std::string where = "nutrients[" + std::to_string(i) + "]";
    check_keys(n, where, {"id", "weight", "min_requirement", "per_kg_content"});
    NutrientSpec spec;
    spec.id = text(n, where, "id");
    spec.weight = number_or(n, where, "weight", 1.0);
    spec.min_requirement = number(n, where, "min_requirement");
    spec.per_kg_content = number(n, where, "per_kg_content");
    inst.nutrients.push_back(std::move(spec));
  }

  if (doc.contains("path_weights")) {
    const auto& pw = array(doc, root, "path_weights");
    for (std::size_t i = 0; i < pw.size(); ++i) {
      const std::string where = "path_weights[" + std::to_string(i) + "]";
      check_keys(pw[i], where, {"dc", "customer", "factor"});
      const auto dc = inst.find_dc(text(pw[i], where, "dc"));
      const auto cust = inst.find_customer(text(pw[i], where, "customer"));
      if (!dc || !cust) {
        throw ValidationError(where, "unknown DC or customer identifier");
      }
      inst.path_weights[{*dc, *cust}] = number(pw[i], where, "factor");
    }
  }

  inst.safety_stock_fraction = number(doc, root, "safety_stock_fraction");
  const auto& horizon = member(doc, root, "horizon");
  if (!horizon.is_number_integer()) {
    throw ParseError("horizon: expected an integer");
  }
  inst.horizon = horizon.get<int>();
  inst.persons_per_area = number_or(doc, root, "persons_per_area", 50'000.0);
  if (doc.contains("normalization_scales")) {
    const auto& s = doc["normalization_scales"];
    check_keys(s, "normalization_scales",
               {"affordability", "transportation", "quality"});
    auto opt = [&s](const char* key) -> std::optional<double> {
      if (!s.contains(key)) return std::nullopt;
      return number(s, "normalization_scales", key);
    };
    inst.scales.affordability = opt("affordability");
    inst.scales.transportation = opt("transportation");
    inst.scales.quality = opt("quality");
  }

  inst.validate();
  return inst;
}

NetworkInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_instance(doc);
}

json instance_to_json(const NetworkInstance& inst) {
  json doc;
  if (!inst.name.empty()) doc["name"] = inst.name;
  doc["horizon"] = inst.horizon;
  doc["safety_stock_fraction"] = inst.safety_stock_fraction;
  doc["persons_per_area"] = inst.persons_per_area;
  doc["stochastic"] = {
      {"demand", demand_to_json(inst.default_demand)},
      {"supply_loss",
       {{"family", "uniform"}, {"low", inst.supply.low}, {"high", inst.supply.high}}}};
  json scales = json::object();
  if (inst.scales.affordability) scales["affordability"] = *inst.scales.affordability;
  if (inst.scales.transportation) scales["transportation"] = *inst.scales.transportation;
  if (inst.scales.quality) scales["quality"] = *inst.scales.quality;
  if (!scales.empty()) doc["normalization_scales"] = scales;

  doc["warehouses"] = json::array();
  for (const auto& w : inst.warehouses) {
    json cost = w.order_unit_cost;
    if (!w.order_unit_cost_by_dc.empty()) {
      cost = {{"default", w.order_unit_cost}, {"per_dc", w.order_unit_cost_by_dc}};
    }
    doc["warehouses"].push_back({{"id", w.id},
                                 {"location", {w.location.x, w.location.y}},
                                 {"capacity", w.capacity},
                                 {"order_unit_cost", cost}});
  }
  doc["regions"] = json::array();
  for (std::size_t r = 0; r < inst.regions.size(); ++r) {
    const auto& region = inst.regions[r];
    json out = {{"id", region.id},
                {"local_food_cost", region.local_food_cost},
                {"average_income", region.average_income},
                {"residential_areas", region.residential_areas},
                {"unfulfilled_unit_cost", region.unfulfilled_unit_cost},
                {"accessibility_weights",
                 {{"affordability", region.weights.affordability},
                  {"transportation", region.weights.transportation},
                  {"quality", region.weights.quality}}},
                {"dcs", json::array()},
                {"customers", json::array()}};
    for (auto h : inst.dcs_in_region(r)) {
      const auto& dc = inst.dcs[h];
      json d = {{"id", dc.id},
                {"capacity", dc.capacity},
                {"inventory_unit_cost", dc.inventory_unit_cost}};
      if (dc.location) d["location"] = {dc.location->x, dc.location->y};
      out["dcs"].push_back(std::move(d));
    }
    for (auto l : inst.customers_in_region(r)) {
      const auto& c = inst.customers[l];
      json j = {{"id", c.id}, {"location", {c.location.x, c.location.y}}};
      if (!(c.demand == inst.default_demand)) j["demand"] = demand_to_json(c.demand);
      out["customers"].push_back(std::move(j));
    }
    doc["regions"].push_back(std::move(out));
  }
  doc["nutrients"] = json::array();
  for (const auto& n : inst.nutrients) {
    doc["nutrients"].push_back({{"id", n.id},
                                {"weight", n.weight},
                                {"min_requirement", n.min_requirement},
                                {"per_kg_content", n.per_kg_content}});
  }
  if (!inst.path_weights.empty()) {
    doc["path_weights"] = json::array();
    for (const auto& [key, factor] : inst.path_weights) {
      doc["path_weights"].push_back({{"dc", inst.dcs[key.first].id},
                                     {"customer", inst.customers[key.second].id},
                                     {"factor", factor}});
    }
  }
  return doc;
}

}  // namespace chainforge

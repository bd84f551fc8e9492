#include "chainforge/plan.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "chainforge/error.hpp"

namespace chainforge {

using nlohmann::json;

OperationalPlan make_plan(const NetworkInstance& instance, const NetworkDesign& design,
                          const stochastic::EstimateResult& est, std::uint64_t seed) {
  OperationalPlan p;
  p.epsilon = est.epsilon;
  p.replications = est.replications;
  p.seed = seed;
  p.safety_stock_fraction = instance.safety_stock_fraction;
  p.z1 = est.z1;
  p.z1_se = est.z1_se;
  p.z2 = est.z2;
  p.z2_se = est.z2_se;
  p.costs = est.mean_costs;
  p.cost_se = est.cost_se;
  for (std::size_t h = 0; h < instance.dcs.size(); ++h) {
    p.dc_ids.push_back(instance.dcs[h].id);
    p.dc_supplier.push_back(instance.warehouses[design.dc_supplier[h]].id);
  }
  for (std::size_t l = 0; l < instance.customers.size(); ++l) {
    p.customer_ids.push_back(instance.customers[l].id);
    p.customer_dc.push_back(instance.dcs[design.customer_dc[l]].id);
  }
  p.initial_inventory = est.initial_inventory;
  p.mean_inventory = est.mean_inventory;
  p.mean_order = est.mean_order;
  p.mean_shipped = est.mean_shipped;
  return p;
}

bool linkages_match(const OperationalPlan& plan, const NetworkInstance& instance,
                    const NetworkDesign& design) {
  if (plan.dc_ids.size() != instance.dcs.size() ||
      plan.customer_ids.size() != instance.customers.size() ||
      plan.dc_supplier.size() != plan.dc_ids.size() ||
      plan.customer_dc.size() != plan.customer_ids.size() ||
      plan.initial_inventory.size() != plan.dc_ids.size()) {
    return false;
  }
  for (std::size_t h = 0; h < instance.dcs.size(); ++h) {
    if (plan.dc_ids[h] != instance.dcs[h].id) return false;
    if (plan.dc_supplier[h] != instance.warehouses[design.dc_supplier[h]].id) return false;
  }
  for (std::size_t l = 0; l < instance.customers.size(); ++l) {
    if (plan.customer_ids[l] != instance.customers[l].id) return false;
    if (plan.customer_dc[l] != instance.dcs[design.customer_dc[l]].id) return false;
  }
  return true;
}

namespace {

json costs_json(const stochastic::PeriodCosts& c) {
  return {{"inventory", c.inventory}, {"unfulfilled", c.unfulfilled}, {"order", c.order}};
}

stochastic::PeriodCosts costs_from(const json& j) {
  return {j.at("inventory").get<double>(), j.at("unfulfilled").get<double>(),
          j.at("order").get<double>()};
}

}  // namespace

json plan_to_json(const OperationalPlan& p) {
  json dcs = json::array();
  for (std::size_t h = 0; h < p.dc_ids.size(); ++h) {
    dcs.push_back({{"dc", p.dc_ids[h]}, {"warehouse", p.dc_supplier[h]}});
  }
  json customers = json::array();
  for (std::size_t l = 0; l < p.customer_ids.size(); ++l) {
    customers.push_back({{"customer", p.customer_ids[l]}, {"dc", p.customer_dc[l]}});
  }
  return {
      {"instance", p.instance_path},
      {"design", p.design_path},
      {"epsilon", p.epsilon},
      {"replications", p.replications},
      {"seed", p.seed},
      {"safety_stock_fraction", p.safety_stock_fraction},
      {"Z1", p.z1},
      {"Z1_se", p.z1_se},
      {"Z2", p.z2},
      {"Z2_se", p.z2_se},
      {"costs", costs_json(p.costs)},
      {"cost_se", costs_json(p.cost_se)},
      {"dc_links", dcs},
      {"customer_links", customers},
      {"initial_inventory", p.initial_inventory},
      {"mean_inventory", p.mean_inventory},
      {"mean_order", p.mean_order},
      {"mean_shipped", p.mean_shipped},
  };
}

OperationalPlan plan_from_json(const json& doc) {
  try {
    OperationalPlan p;
    p.instance_path = doc.at("instance").get<std::string>();
    p.design_path = doc.at("design").get<std::string>();
    p.epsilon = doc.at("epsilon").get<double>();
    p.replications = doc.at("replications").get<int>();
    p.seed = doc.at("seed").get<std::uint64_t>();
    p.safety_stock_fraction = doc.at("safety_stock_fraction").get<double>();
    p.z1 = doc.at("Z1").get<double>();
    p.z1_se = doc.at("Z1_se").get<double>();
    p.z2 = doc.at("Z2").get<double>();
    p.z2_se = doc.at("Z2_se").get<double>();
    p.costs = costs_from(doc.at("costs"));
    p.cost_se = costs_from(doc.at("cost_se"));
    for (const auto& d : doc.at("dc_links")) {
      p.dc_ids.push_back(d.at("dc").get<std::string>());
      p.dc_supplier.push_back(d.at("warehouse").get<std::string>());
    }
    for (const auto& c : doc.at("customer_links")) {
      p.customer_ids.push_back(c.at("customer").get<std::string>());
      p.customer_dc.push_back(c.at("dc").get<std::string>());
    }
    p.initial_inventory = doc.at("initial_inventory").get<std::vector<double>>();
    p.mean_inventory = doc.at("mean_inventory").get<std::vector<std::vector<double>>>();
    p.mean_order = doc.at("mean_order").get<std::vector<std::vector<double>>>();
    p.mean_shipped = doc.at("mean_shipped").get<std::vector<std::vector<double>>>();
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan: ") + e.what());
  }
}

OperationalPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open plan file '" + path.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return plan_from_json(doc);
}

}  // namespace chainforge

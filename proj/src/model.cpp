#include "chainforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "chainforge/error.hpp"

namespace chainforge {

double euclidean_distance(Point a, Point b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double DemandSpec::stddev() const {
  return spread_is_stddev ? variance : std::sqrt(variance);
}

double Warehouse::order_cost_to(const std::string& dc_id) const {
  auto it = order_unit_cost_by_dc.find(dc_id);
  return it == order_unit_cost_by_dc.end() ? order_unit_cost : it->second;
}

double NetworkInstance::path_weight(std::size_t dc, std::size_t customer) const {
  auto it = path_weights.find({dc, customer});
  return it == path_weights.end() ? 1.0 : it->second;
}

std::vector<std::size_t> NetworkInstance::dcs_in_region(
    std::size_t region) const {
  std::vector<std::size_t> out;
  for (std::size_t h = 0; h < dcs.size(); ++h) {
    if (dcs[h].region == region) out.push_back(h);
  }
  return out;
}

std::vector<std::size_t> NetworkInstance::customers_in_region(
    std::size_t region) const {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < customers.size(); ++l) {
    if (customers[l].region == region) out.push_back(l);
  }
  return out;
}

namespace {

template <typename T>
std::optional<std::size_t> find_by_id(const std::vector<T>& items,
                                      const std::string& id) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].id == id) return i;
  }
  return std::nullopt;
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ValidationError(field, message);
}

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

std::string indexed(const char* list, std::size_t i, const char* field) {
  return std::string(list) + "[" + std::to_string(i) + "]." + field;
}

}  // namespace

std::optional<std::size_t> NetworkInstance::find_warehouse(
    const std::string& id) const {
  return find_by_id(warehouses, id);
}
std::optional<std::size_t> NetworkInstance::find_dc(
    const std::string& id) const {
  return find_by_id(dcs, id);
}
std::optional<std::size_t> NetworkInstance::find_customer(
    const std::string& id) const {
  return find_by_id(customers, id);
}
std::optional<std::size_t> NetworkInstance::find_region(
    const std::string& id) const {
  return find_by_id(regions, id);
}

void NetworkInstance::validate() const {
  require(!warehouses.empty(), "warehouses", "at least one warehouse required");
  require(!regions.empty(), "regions", "at least one region required");
  require(!dcs.empty(), "dcs", "at least one distribution center required");
  require(!customers.empty(), "customers", "at least one customer required");
  require(!nutrients.empty(), "nutrients", "at least one nutrient required");

  std::set<std::string> ids;
  auto unique = [&ids](const std::string& id, const std::string& field) {
    require(!id.empty(), field, "identifier must not be empty");
    require(ids.insert(id).second, field, "duplicate identifier '" + id + "'");
  };

  for (std::size_t i = 0; i < warehouses.size(); ++i) {
    const auto& w = warehouses[i];
    unique(w.id, indexed("warehouses", i, "id"));
    require(finite(w.location), indexed("warehouses", i, "location"),
            "must be finite");
    require(w.capacity > 0, indexed("warehouses", i, "capacity"),
            "must be > 0");
    require(w.order_unit_cost >= 0, indexed("warehouses", i, "order_unit_cost"),
            "must be >= 0");
    for (const auto& [dc, cost] : w.order_unit_cost_by_dc) {
      require(cost >= 0, indexed("warehouses", i, "order_unit_cost"),
              "must be >= 0");
      require(find_dc(dc).has_value(), indexed("warehouses", i, "order_unit_cost"),
              "unknown DC '" + dc + "'");
    }
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto& r = regions[i];
    unique(r.id, indexed("regions", i, "id"));
    require(r.average_income > 0, indexed("regions", i, "average_income"),
            "must be > 0");
    require(r.local_food_cost >= 0, indexed("regions", i, "local_food_cost"),
            "must be >= 0");
    require(r.residential_areas >= 1, indexed("regions", i, "residential_areas"),
            "must be >= 1");
    require(r.unfulfilled_unit_cost >= 0,
            indexed("regions", i, "unfulfilled_unit_cost"), "must be >= 0");
    require(r.weights.affordability >= 0 && r.weights.transportation >= 0 &&
                r.weights.quality >= 0,
            indexed("regions", i, "accessibility_weights"), "must be >= 0");
  }
  for (std::size_t i = 0; i < dcs.size(); ++i) {
    const auto& h = dcs[i];
    unique(h.id, indexed("dcs", i, "id"));
    require(h.region < regions.size(), indexed("dcs", i, "region"),
            "region does not exist");
    require(h.capacity > 0, indexed("dcs", i, "capacity"), "must be > 0");
    require(h.inventory_unit_cost >= 0, indexed("dcs", i, "inventory_unit_cost"),
            "must be >= 0");
    require(!h.location || finite(*h.location), indexed("dcs", i, "location"),
            "must be finite");
  }
  for (std::size_t i = 0; i < customers.size(); ++i) {
    const auto& c = customers[i];
    unique(c.id, indexed("customers", i, "id"));
    require(c.region < regions.size(), indexed("customers", i, "region"),
            "region does not exist");
    require(finite(c.location), indexed("customers", i, "location"),
            "must be finite");
    require(c.demand.mean > 0, indexed("customers", i, "demand.mean"),
            "must be > 0");
    require(c.demand.variance >= 0, indexed("customers", i, "demand.variance"),
            "must be >= 0");
  }
  for (std::size_t i = 0; i < nutrients.size(); ++i) {
    const auto& n = nutrients[i];
    unique(n.id, indexed("nutrients", i, "id"));
    require(n.weight >= 0, indexed("nutrients", i, "weight"), "must be >= 0");
    require(n.min_requirement >= 0, indexed("nutrients", i, "min_requirement"),
            "must be >= 0");
    require(n.per_kg_content >= 0, indexed("nutrients", i, "per_kg_content"),
            "must be >= 0");
  }
  for (std::size_t r = 0; r < regions.size(); ++r) {
    require(!dcs_in_region(r).empty(), indexed("regions", r, "dcs"),
            "every region needs at least one DC");
  }
  for (const auto& [key, factor] : path_weights) {
    require(key.first < dcs.size() && key.second < customers.size(),
            "path_weights", "unknown DC or customer");
    require(factor >= 0, "path_weights", "factor must be >= 0");
  }
  require(safety_stock_fraction >= 0 && safety_stock_fraction <= 1,
          "safety_stock_fraction", "must lie in [0, 1]");
  require(horizon >= 1, "horizon", "must be >= 1");
  require(persons_per_area > 0, "persons_per_area", "must be > 0");
  require(supply.low >= 0 && supply.low <= supply.high && supply.high <= 1,
          "stochastic.supply_loss", "requires 0 <= low <= high <= 1");
  require(default_demand.mean > 0, "stochastic.demand.mean", "must be > 0");
  require(default_demand.variance >= 0, "stochastic.demand.variance",
          "must be >= 0");
  auto positive_scale = [](const std::optional<double>& s) {
    return !s || (std::isfinite(*s) && *s > 0);
  };
  require(positive_scale(scales.affordability) &&
              positive_scale(scales.transportation) &&
              positive_scale(scales.quality),
          "normalization_scales", "scales must be finite and > 0");
}

std::vector<std::size_t> NetworkDesign::customers_of(std::size_t dc) const {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < customer_dc.size(); ++l) {
    if (customer_dc[l] == dc) out.push_back(l);
  }
  return out;
}

NetworkDesign make_design(const NetworkInstance& instance,
                          std::vector<Point> dc_locations,
                          std::vector<std::size_t> dc_supplier,
                          std::vector<std::size_t> customer_dc) {
  NetworkDesign design;
  design.dc_locations = std::move(dc_locations);
  design.dc_supplier = std::move(dc_supplier);
  design.customer_dc = std::move(customer_dc);
  design.distances.assign(design.dc_locations.size(),
                          std::vector<double>(instance.customers.size()));
  for (std::size_t h = 0; h < design.dc_locations.size(); ++h) {
    for (std::size_t l = 0; l < instance.customers.size(); ++l) {
      design.distances[h][l] = euclidean_distance(
          design.dc_locations[h], instance.customers[l].location);
    }
  }
  return design;
}

void validate_design(const NetworkInstance& instance,
                     const NetworkDesign& design) {
  const auto H = instance.dcs.size();
  const auto L = instance.customers.size();
  require(design.dc_locations.size() == H, "design.dcs",
          "DC count does not match the instance");
  require(design.dc_supplier.size() == H, "design.z",
          "every DC needs exactly one supplying warehouse");
  require(design.customer_dc.size() == L, "design.y",
          "every customer needs exactly one supplying DC");
  for (std::size_t h = 0; h < H; ++h) {
    require(finite(design.dc_locations[h]), "design.dcs", "non-finite location");
    require(design.dc_supplier[h] < instance.warehouses.size(), "design.z",
            "unknown warehouse for DC '" + instance.dcs[h].id + "'");
  }
  for (std::size_t l = 0; l < L; ++l) {
    const auto h = design.customer_dc[l];
    require(h < H, "design.y",
            "unknown DC for customer '" + instance.customers[l].id + "'");
    require(instance.dcs[h].region == instance.customers[l].region, "design.y",
            "customer '" + instance.customers[l].id +
                "' is served from another region");
  }
  require(design.distances.size() == H, "design.distances", "wrong shape");
  for (std::size_t h = 0; h < H; ++h) {
    require(design.distances[h].size() == L, "design.distances", "wrong shape");
    for (std::size_t l = 0; l < L; ++l) {
      const double expected = euclidean_distance(design.dc_locations[h],
                                                 instance.customers[l].location);
      require(std::abs(design.distances[h][l] - expected) <=
                  1e-9 * std::max(1.0, expected),
              "design.distances", "distance disagrees with coordinates");
    }
  }
}

std::vector<double> derive_mean_local_demand(const NetworkDesign& design,
                                             const NetworkInstance& instance) {
  std::vector<double> s(instance.dcs.size(), 0.0);
  for (std::size_t l = 0; l < design.customer_dc.size(); ++l) {
    s[design.customer_dc[l]] += instance.customers[l].demand.mean;
  }
  return s;
}

}  // namespace chainforge

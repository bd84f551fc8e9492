#pragma once

// Domain types for the three-echelon network: warehouses supply distribution
// centers (DCs), DCs serve customers, and every DC and customer belongs to a
// region. The instance is stored flat; DCs and customers carry the index of
// their region.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace chainforge {

/// Planar coordinate in kilometres.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double euclidean_distance(Point a, Point b);

/// Normal demand per customer and period, in kg. `variance` is read as a
/// standard deviation when `spread_is_stddev` is set.
struct DemandSpec {
  double mean = 0.0;
  double variance = 0.0;
  bool spread_is_stddev = false;

  double stddev() const;

  friend bool operator==(const DemandSpec&, const DemandSpec&) = default;
};

/// Uniform bounds of the delivered fraction (1 - theta) on a
/// warehouse-to-DC shipment.
struct SupplySpec {
  double low = 1.0;
  double high = 1.0;

  friend bool operator==(const SupplySpec&, const SupplySpec&) = default;
};

struct Warehouse {
  std::string id;
  Point location;
  double capacity = 0.0;  // kg per period
  double order_unit_cost = 0.0;
  std::map<std::string, double> order_unit_cost_by_dc;

  double order_cost_to(const std::string& dc_id) const;

  friend bool operator==(const Warehouse&, const Warehouse&) = default;
};

struct AccessibilityWeights {
  double affordability = 1.0;
  double transportation = 1.0;
  double quality = 1.0;

  friend bool operator==(const AccessibilityWeights&,
                         const AccessibilityWeights&) = default;
};

struct Region {
  std::string id;
  double local_food_cost = 0.0;  // per kg
  double average_income = 0.0;   // per year
  int residential_areas = 1;
  double unfulfilled_unit_cost = 0.0;  // per kg
  AccessibilityWeights weights;

  friend bool operator==(const Region&, const Region&) = default;
};

struct DistributionCenter {
  std::string id;
  std::size_t region = 0;
  std::optional<Point> location;  // optional starting location
  double capacity = 0.0;          // kg
  double inventory_unit_cost = 0.0;  // per kg per period

  friend bool operator==(const DistributionCenter&,
                         const DistributionCenter&) = default;
};

struct Customer {
  std::string id;
  std::size_t region = 0;
  Point location;
  DemandSpec demand;

  friend bool operator==(const Customer&, const Customer&) = default;
};

struct NutrientSpec {
  std::string id;
  double weight = 1.0;           // q_j
  double min_requirement = 0.0;  // r_j per person per day
  double per_kg_content = 0.0;   // beta_j

  friend bool operator==(const NutrientSpec&, const NutrientSpec&) = default;
};

/// Per-dimension normalization scales. Unset entries are derived from the
/// network design (see `resolve_scales`).
struct NormalizationScales {
  std::optional<double> affordability;
  std::optional<double> transportation;
  std::optional<double> quality;

  friend bool operator==(const NormalizationScales&,
                         const NormalizationScales&) = default;
};

struct NetworkInstance {
  std::string name;
  std::vector<Warehouse> warehouses;
  std::vector<Region> regions;
  std::vector<DistributionCenter> dcs;
  std::vector<Customer> customers;
  std::vector<NutrientSpec> nutrients;
  /// Path weighting factor f_hl keyed by (dc index, customer index); absent
  /// pairs weigh 1.
  std::map<std::pair<std::size_t, std::size_t>, double> path_weights;
  DemandSpec default_demand;
  SupplySpec supply;
  double safety_stock_fraction = 0.0;
  int horizon = 1;
  NormalizationScales scales;
  double persons_per_area = 50'000.0;

  double path_weight(std::size_t dc, std::size_t customer) const;
  std::vector<std::size_t> dcs_in_region(std::size_t region) const;
  std::vector<std::size_t> customers_in_region(std::size_t region) const;

  std::optional<std::size_t> find_warehouse(const std::string& id) const;
  std::optional<std::size_t> find_dc(const std::string& id) const;
  std::optional<std::size_t> find_customer(const std::string& id) const;
  std::optional<std::size_t> find_region(const std::string& id) const;

  /// Throws ValidationError naming the first violated field.
  void validate() const;

  friend bool operator==(const NetworkInstance&,
                         const NetworkInstance&) = default;
};

/// Phase I output: DC coordinates plus single-channel linkages. Each DC is
/// supplied by exactly one warehouse and each customer by exactly one DC, so
/// the binary matrices z and y are stored as assignment vectors.
struct NetworkDesign {
  std::vector<Point> dc_locations;
  std::vector<std::size_t> dc_supplier;   // warehouse index per DC
  std::vector<std::size_t> customer_dc;   // DC index per customer
  std::vector<std::vector<double>> distances;  // d_hl, DC x customer

  bool z(std::size_t warehouse, std::size_t dc) const {
    return dc_supplier[dc] == warehouse;
  }
  bool y(std::size_t dc, std::size_t customer) const {
    return customer_dc[customer] == dc;
  }
  /// Distance between a customer and the DC that serves it.
  double linked_distance(std::size_t customer) const {
    return distances[customer_dc[customer]][customer];
  }
  std::vector<std::size_t> customers_of(std::size_t dc) const;

  friend bool operator==(const NetworkDesign&, const NetworkDesign&) = default;
};

/// Builds a design from DC coordinates and linkages, filling the distance
/// matrix from the coordinates.
NetworkDesign make_design(const NetworkInstance& instance,
                          std::vector<Point> dc_locations,
                          std::vector<std::size_t> dc_supplier,
                          std::vector<std::size_t> customer_dc);

/// Checks the single-channel invariants, region consistency of customer
/// linkages, and that stored distances match the coordinates.
void validate_design(const NetworkInstance& instance,
                     const NetworkDesign& design);

/// S_h: sum of the mean demands of the customers each DC serves.
std::vector<double> derive_mean_local_demand(const NetworkDesign& design,
                                             const NetworkInstance& instance);

// Instance file I/O. The format is documented in docs/instance_format.md.
NetworkInstance parse_instance(const nlohmann::json& doc);
NetworkInstance load_instance(const std::filesystem::path& path);
nlohmann::json instance_to_json(const NetworkInstance& instance);

}  // namespace chainforge

#include "chainforge/accessibility.hpp"

#include <algorithm>
#include <cmath>

#include "chainforge/error.hpp"

namespace chainforge::accessibility {

double affordability(const Region& region) {
  if (!(region.average_income > 0)) {
    throw DomainError("region '" + region.id + "': average income must be > 0");
  }
  return region.local_food_cost / region.average_income;
}

double transportation_effort(const NetworkInstance& instance,
                             const NetworkDesign& design, std::size_t region,
                             std::span<const Shipment> shipments) {
  double total = 0.0;
  for (const auto& s : shipments) {
    if (s.kg < 0) throw DomainError("negative shipment");
    if (s.kg > 0 && !design.y(s.dc, s.customer)) {
      throw LinkageError("shipment from DC '" + instance.dcs[s.dc].id +
                         "' to unlinked customer '" +
                         instance.customers[s.customer].id + "'");
    }
    if (instance.customers[s.customer].region != region) continue;
    total += instance.path_weight(s.dc, s.customer) *
             design.distances[s.dc][s.customer] * s.kg;
  }
  return total;
}

std::vector<double> accessible_nutrition(std::span<const double> inventories,
                                         std::span<const NutrientSpec> nutrients) {
  double stock = 0.0;
  for (double inv : inventories) stock += inv;
  std::vector<double> n;
  n.reserve(nutrients.size());
  for (const auto& nutrient : nutrients) n.push_back(stock * nutrient.per_kg_content);
  return n;
}

double nutrient_requirement(const Region& region, const NutrientSpec& nutrient,
                            double persons_per_area) {
  return nutrient.min_requirement * region.residential_areas * persons_per_area;
}

double quality_index(const Region& region, std::span<const double> nutrition,
                     std::span<const NutrientSpec> nutrients,
                     double persons_per_area) {
  double total = 0.0;
  for (std::size_t j = 0; j < nutrients.size(); ++j) {
    const double surplus =
        nutrition[j] - nutrient_requirement(region, nutrients[j], persons_per_area);
    total += nutrients[j].weight * std::max(0.0, surplus);
  }
  return total;
}

Normalizer::Normalizer(double scale, Kind kind) : scale_(scale), kind_(kind) {
  if (!std::isfinite(scale)) throw ConfigError("normalization scale must be finite");
  if (kind == Kind::Linear && !(scale > 0)) {
    throw ConfigError("linear normalization needs a positive scale");
  }
  if (kind == Kind::Saturating && !(scale < 0)) {
    throw ConfigError(
        "saturating normalization needs a negative scale to stay in [0, 1]");
  }
}

double Normalizer::operator()(double raw) const {
  if (raw <= 0) return 0.0;
  if (kind_ == Kind::Linear) return std::min(1.0, raw / scale_);
  return raw / (raw - scale_);
}

ResolvedScales resolve_scales(const NetworkInstance& instance,
                              const NetworkDesign& design) {
  ResolvedScales out;
  if (instance.scales.affordability) {
    out.affordability = *instance.scales.affordability;
  } else {
    double worst = 0.0;
    for (const auto& r : instance.regions) worst = std::max(worst, affordability(r));
    out.affordability = worst > 0 ? worst : 1.0;
  }
  if (instance.scales.transportation) {
    out.transportation = *instance.scales.transportation;
  } else {
    double total = 0.0;
    for (std::size_t l = 0; l < instance.customers.size(); ++l) {
      const auto h = design.customer_dc[l];
      total += instance.path_weight(h, l) * design.distances[h][l] *
               instance.dcs[h].capacity;
    }
    out.transportation = total > 0 ? total : 1.0;
  }
  if (instance.scales.quality) {
    out.quality = *instance.scales.quality;
  } else {
    double content = 0.0;
    for (const auto& n : instance.nutrients) content += n.weight * n.per_kg_content;
    double capacity = 0.0;
    for (const auto& h : instance.dcs) capacity += h.capacity;
    out.quality = content * capacity > 0 ? content * capacity : 1.0;
  }
  return out;
}

AccessibilitySnapshot evaluate_region(const NetworkInstance& instance,
                                      const NetworkDesign& design,
                                      const ResolvedScales& scales,
                                      std::size_t region, int period,
                                      std::span<const double> inventories,
                                      std::span<const double> shipments) {
  const auto& r = instance.regions[region];
  AccessibilitySnapshot snap;
  snap.region = region;
  snap.period = period;
  snap.raw_affordability = affordability(r);

  std::vector<Shipment> flows;
  for (auto l : instance.customers_in_region(region)) {
    flows.push_back({design.customer_dc[l], l, shipments[l]});
  }
  snap.raw_transportation = transportation_effort(instance, design, region, flows);

  std::vector<double> local;
  for (auto h : instance.dcs_in_region(region)) local.push_back(inventories[h]);
  snap.accessible_nutrition = accessible_nutrition(local, instance.nutrients);
  snap.raw_quality = quality_index(r, snap.accessible_nutrition, instance.nutrients,
                                   instance.persons_per_area);

  snap.affordability = Normalizer(scales.affordability)(snap.raw_affordability);
  snap.transportation = Normalizer(scales.transportation)(snap.raw_transportation);
  snap.quality = Normalizer(scales.quality)(snap.raw_quality);
  return snap;
}

}  // namespace chainforge::accessibility

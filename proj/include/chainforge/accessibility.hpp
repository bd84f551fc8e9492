#pragma once

// Food accessibility index: affordability (A), transportation effort (T) and
// nutrition quality (Q) per region and period, each normalized to [0, 1].

#include <cstddef>
#include <span>
#include <vector>

#include "chainforge/model.hpp"

namespace chainforge::accessibility {

/// Raw affordability l_i / s_i. Constant across periods.
double affordability(const Region& region);

/// Quantity shipped on a DC -> customer link during one period.
struct Shipment {
  std::size_t dc = 0;
  std::size_t customer = 0;
  double kg = 0.0;
};

/// Raw transportation effort of one region: sum of f_hl * d_hl * c_hl over
/// the region's linked pairs. Throws LinkageError for a positive shipment on
/// an unlinked pair.
double transportation_effort(const NetworkInstance& instance,
                             const NetworkDesign& design, std::size_t region,
                             std::span<const Shipment> shipments);

/// Accessible nutrition n_ij per nutrient from the inventories of the DCs in
/// one region.
std::vector<double> accessible_nutrition(std::span<const double> inventories,
                                         std::span<const NutrientSpec> nutrients);

/// Population requirement r_j * p_i * kappa for one nutrient in one region.
double nutrient_requirement(const Region& region, const NutrientSpec& nutrient,
                            double persons_per_area);

/// Raw quality index: sum over nutrients of q_j * (n_ij - requirement)^+.
double quality_index(const Region& region, std::span<const double> nutrition,
                     std::span<const NutrientSpec> nutrients,
                     double persons_per_area);

/// Maps a raw index onto [0, 1]. `Linear` is raw / scale clamped to [0, 1];
/// `Saturating` is raw / (raw - scale) and needs a negative scale to stay in
/// range. Only the linear rule can be embedded in the period model.
class Normalizer {
 public:
  enum class Kind { Linear, Saturating };

  explicit Normalizer(double scale, Kind kind = Kind::Linear);

  double operator()(double raw) const;
  double scale() const { return scale_; }
  Kind kind() const { return kind_; }

 private:
  double scale_;
  Kind kind_;
};

/// Scales actually used for normalization.
struct ResolvedScales {
  double affordability = 1.0;
  double transportation = 1.0;
  double quality = 1.0;
};

/// Fills unset instance scales with bounds that keep every feasible index in
/// [0, 1]: the largest l_i / s_i, the sum of f * d * Cap_h over all linked
/// pairs, and sum_j q_j * beta_j times the total DC capacity.
ResolvedScales resolve_scales(const NetworkInstance& instance,
                              const NetworkDesign& design);

struct AccessibilitySnapshot {
  std::size_t region = 0;
  int period = 0;
  double raw_affordability = 0.0;
  double raw_transportation = 0.0;
  double raw_quality = 0.0;
  double affordability = 0.0;
  double transportation = 0.0;
  double quality = 0.0;
  std::vector<double> accessible_nutrition;

  /// w^A I^A - w^T I^T + w^Q I^Q
  double score(const AccessibilityWeights& w) const {
    return w.affordability * affordability - w.transportation * transportation +
           w.quality * quality;
  }
};

/// Evaluates one region in one period. `inventories` holds Inv_h for every DC
/// in the instance and `shipments` the per-customer delivered quantity on its
/// linked DC.
AccessibilitySnapshot evaluate_region(const NetworkInstance& instance,
                                      const NetworkDesign& design,
                                      const ResolvedScales& scales,
                                      std::size_t region, int period,
                                      std::span<const double> inventories,
                                      std::span<const double> shipments);

}  // namespace chainforge::accessibility

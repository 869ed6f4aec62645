#pragma once

#include <functional>
#include <string>
#include <vector>

namespace actopt {

// Built-in initial conditions and diffusion profiles used by the bundled
// experiment configurations. Formula strings appear verbatim in the catalog
// listing.
struct CatalogEntry1D {
  std::string name;
  std::string formula;
  std::function<double(double)> fn;
};

struct CatalogEntry2D {
  std::string name;
  std::string formula;
  std::function<double(double, double)> fn;
};

const std::vector<CatalogEntry1D>& initial_conditions_1d();
const std::vector<CatalogEntry2D>& initial_conditions_2d();
const std::vector<CatalogEntry1D>& diffusion_profiles_1d();

// Lookups return nullptr when the name is unknown.
const CatalogEntry1D* find_initial_condition_1d(const std::string& name);
const CatalogEntry2D* find_initial_condition_2d(const std::string& name);
const CatalogEntry1D* find_diffusion_profile(const std::string& name);

// Deterministic plain-text listing of every catalog entry with its formula.
std::string list_catalog();

}  // namespace actopt

#include "actopt/catalog.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace actopt {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

const std::vector<CatalogEntry1D>& initial_conditions_1d() {
  static const std::vector<CatalogEntry1D> entries = {
      {"test1", "sin(pi x)", [](double x) { return std::sin(kPi * x); }},
      // The product form keeps the profile in H^1_0 (it vanishes at both
      // ends) and puts the optimal actuator position near x = 0.2.
      {"test2", "100 |x - 0.7|^4 x (x - 1)",
       [](double x) { return 100.0 * std::pow(std::abs(x - 0.7), 4) * x * (x - 1.0); }},
      {"test3", "max(sin(3 pi x), 0)^2",
       [](double x) {
         double s = std::max(std::sin(3.0 * kPi * x), 0.0);
         return s * s;
       }},
      {"test4", "sin(3 pi x)^2 chi_{x<2/3}",
       [](double x) {
         if (x >= 2.0 / 3.0) return 0.0;
         double s = std::sin(3.0 * kPi * x);
         return s * s;
       }},
  };
  return entries;
}

const std::vector<CatalogEntry2D>& initial_conditions_2d() {
  static const std::vector<CatalogEntry2D> entries = {
      {"test7", "max(sin(4 pi (x1 - 1/8)), 0)^3 sin(pi x2)^3",
       [](double x1, double x2) {
         double s = std::max(std::sin(4.0 * kPi * (x1 - 0.125)), 0.0);
         double t = std::sin(kPi * x2);
         return s * s * s * t * t * t;
       }},
  };
  return entries;
}

const std::vector<CatalogEntry1D>& diffusion_profiles_1d() {
  static const std::vector<CatalogEntry1D> entries = {
      {"test6_sigma", "(1 - max(sin(9 pi x), 0)) chi_{x<0.5} + 1e-3",
       [](double x) {
         double base = x < 0.5 ? 1.0 - std::max(std::sin(9.0 * kPi * x), 0.0) : 0.0;
         return base + 1e-3;
       }},
  };
  return entries;
}

namespace {

template <typename T>
const T* find_by_name(const std::vector<T>& entries, const std::string& name) {
  for (const T& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace

const CatalogEntry1D* find_initial_condition_1d(const std::string& name) {
  return find_by_name(initial_conditions_1d(), name);
}

const CatalogEntry2D* find_initial_condition_2d(const std::string& name) {
  return find_by_name(initial_conditions_2d(), name);
}

const CatalogEntry1D* find_diffusion_profile(const std::string& name) {
  return find_by_name(diffusion_profiles_1d(), name);
}

std::string list_catalog() {
  std::ostringstream os;
  os << "initial conditions (1D):\n";
  for (const auto& e : initial_conditions_1d()) os << "  " << e.name << ": " << e.formula << "\n";
  os << "initial conditions (2D):\n";
  for (const auto& e : initial_conditions_2d()) os << "  " << e.name << ": " << e.formula << "\n";
  os << "initial conditions (any dimension):\n";
  os << "  worst_case: costliest initial state in the unit H1 ball, refreshed per accepted shape\n";
  os << "diffusion profiles (1D):\n";
  for (const auto& e : diffusion_profiles_1d()) os << "  " << e.name << ": " << e.formula << "\n";
  os << "  constant: sigma given as a number\n";
  return os.str();
}

}  // namespace actopt

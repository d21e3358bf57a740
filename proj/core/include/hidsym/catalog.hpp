#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hidsym/manifold.hpp"
#include "hidsym/report.hpp"
#include "hidsym/sasaki.hpp"

namespace hidsym {

/// Closed form expected for one component of nabla T (derivative slot first).
struct ComponentExpectation {
  Index index;
  Expr value;
};

struct ManifestItem {
  std::string check;  // killing-vector, ky, cky, sk, covconst, unit-root, quaternion
  std::string target;
  bool expect_pass = true;
  std::optional<ComponentExpectation> component;
};

struct CatalogEntry {
  std::string name;
  Manifold manifold;
  std::map<std::string, TensorField> vectors;
  std::map<std::string, TensorField> forms;
  std::map<std::string, TensorField> tensors;
  std::map<std::string, Expr> scalars;
  /// Orthonormal coframe e^a_mu, row a.
  std::optional<Matrix> frame;
  std::optional<MixedThreeStructure> structure;
  std::vector<ManifestItem> manifest;
  std::map<std::string, std::string> metadata;
};

/// Euclidean Taub-NUT in (r, theta, phi, chi). Throws std::invalid_argument
/// unless m > 0.
CatalogEntry taub_nut(double m = 1.0);
/// Flat space in Cartesian coordinates x1..xn with diagonal signature.
CatalogEntry flat(std::size_t n, std::vector<int> signature = {});
/// Unit 2-sphere in (theta, phi).
CatalogEntry sphere2();
/// Unit pseudo-sphere <x,x> = 1 in R^{2,2}, chart (u, a, b), with its mixed
/// 3-Sasakian structure.
CatalogEntry pseudo_sphere_fixture();

/// Names understood by catalog_entry.
std::vector<std::string> catalog_names();
/// Looks up "taub-nut", "flatN", "minkowskiN", "sphere2" or "pseudo-sphere".
/// `params` overrides parameter values (e.g. m for Taub-NUT).
CatalogEntry catalog_entry(const std::string& name, const ParamEnv& params = {});

/// Runs one manifest-style check on a named target of an entry.
ResidualReport run_check(const CatalogEntry& e, const std::string& check, const std::string& target,
                         const CheckOptions& opt = {});
/// Runs a manifest item, including the closed-form component comparison.
ResidualReport run_manifest_item(const CatalogEntry& e, const ManifestItem& item, const CheckOptions& opt = {});
/// Expected outcome of (check, target) if the manifest lists it.
std::optional<bool> expected_outcome(const CatalogEntry& e, const std::string& check, const std::string& target);

}  // namespace hidsym

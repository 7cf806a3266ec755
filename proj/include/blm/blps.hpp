#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blm/model.hpp"
#include "blm/properties.hpp"

namespace blm {

// A serializable schema document: one service body (or, for integrated
// documents, an outer service wrapping several bodies) plus the evaluated
// property lists in local-index form.
struct BlpsDocument {
  std::string name;  // outer service name
  std::optional<std::vector<std::string>> cf;
  std::optional<std::vector<std::string>> tf;
  std::optional<std::vector<std::string>> af;
  std::optional<std::vector<std::string>> naf;
  std::vector<ServiceDef> services;

  bool integrated() const {
    return services.size() != 1 || services[0].name != name;
  }
  bool operator==(const BlpsDocument&) const = default;
};

// Builds the document for one service of the model. Property lists carry
// the local indices of that service in canonical order (kind-grouped BF,
// DR, CR; bytewise within a group); empty sets are omitted.
BlpsDocument generate_blps(const LogicModel& model, const PropertySets& sets,
                           const std::string& service);

// Document nesting every service of the model under `outer_name`.
BlpsDocument generate_integrated_blps(const LogicModel& model, const PropertySets& sets,
                                      const std::string& outer_name);

// Canonical XML: two-space indent, double-quoted attributes, deterministic
// attribute order (index, name, type, then alphabetical), byte-stable.
std::string serialize(const BlpsDocument& doc);

// Inverse of serialize on canonical output. Raises XmlError (malformed),
// SchemaError (unknown tag/attribute), DanglingIndex (property index absent
// from the body).
BlpsDocument deserialize(const std::string& text);

// Rebuilds a model from the document body; invoke targets outside the
// document become declared externals.
LogicModel to_model(const BlpsDocument& doc);

// Canonical ordering used for the property lists.
std::vector<std::string> canonical_local_order(const LogicModel& model,
                                               const std::set<std::string>& qualified);

}  // namespace blm

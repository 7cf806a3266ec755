#pragma once

#include <random>
#include <string>

#include "blm/blps.hpp"
#include "blm/contract.hpp"
#include "blm/model.hpp"

namespace blm::test {

// Random valid models with up to `max_elements` elements spread over one to
// three services. `allow_cycles` lets services invoke each other both ways.
LogicModel random_model(std::mt19937_64& rng, int max_elements = 12,
                        bool allow_cycles = true);

Contract random_contract(std::mt19937_64& rng, const LogicModel& model);

// A schema-valid document over a fresh random model.
BlpsDocument random_document(std::mt19937_64& rng);

std::string fixture_path(const std::string& name);
std::string read_fixture(const std::string& name);

}  // namespace blm::test

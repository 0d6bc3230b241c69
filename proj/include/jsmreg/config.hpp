#pragma once

#include <string>
#include <vector>

#include "jsmreg/registration.hpp"

namespace jsmreg {

struct ConfigKey {
  std::string name;
  std::string description;
  std::string default_value;
};

/// Every key accepted by apply_override, with defaults taken from a
/// default-constructed RegistrationConfig.
const std::vector<ConfigKey>& config_keys();

/// Comma-separated key names, for error messages.
std::string config_key_list();

/// Applies one `key=value` assignment. Unknown keys and unparsable values
/// throw InvalidInput; range checks are left to RegistrationConfig::validate.
void apply_override(RegistrationConfig& cfg, const std::string& assignment);

}  // namespace jsmreg

#pragma once

#include <optional>
#include <string>

#include "macpower/model.hpp"

namespace macpower::cli {

/// A network read from a JSON file (comments allowed). Either explicit
/// "gains"/"noise_vars" arrays or a "topology" object must be present.
struct InstanceConfig {
  NetworkConfig network;
  std::optional<LinearTopology> topology;
  std::optional<double> d;
  std::string source;
};

/// Throws macpower::Error{InvalidConfig} on unreadable files, malformed JSON or
/// missing fields; model validation errors propagate unchanged.
InstanceConfig load_instance(const std::string& path);
InstanceConfig parse_instance(const std::string& text, const std::string& source = "<string>");

}  // namespace macpower::cli

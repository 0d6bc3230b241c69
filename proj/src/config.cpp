#include "jsmreg/config.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace jsmreg {

namespace {

struct Entry {
  ConfigKey key;
  std::function<void(RegistrationConfig&, const std::string&)> set;
};

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || std::isnan(v)) {
    throw InvalidInput("--set " + key + ": '" + text + "' is not a number");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || v < -(1L << 30) || v > (1L << 30)) {
    throw InvalidInput("--set " + key + ": '" + text + "' is not an integer");
  }
  return static_cast<int>(v);
}

std::string show(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

template <class T>
Entry make(const std::string& name, const std::string& description, T RegistrationConfig::*outer, auto inner) {
  const RegistrationConfig d;
  using V = std::remove_reference_t<decltype(d.*outer.*inner)>;
  return {{name, description, show(static_cast<double>(d.*outer.*inner))},
          [name, outer, inner](RegistrationConfig& cfg, const std::string& text) {
            if constexpr (std::is_same_v<V, int>) {
              cfg.*outer.*inner = parse_int(name, text);
            } else {
              cfg.*outer.*inner = parse_double(name, text);
            }
          }};
}

template <class V>
Entry make_top(const std::string& name, const std::string& description, V RegistrationConfig::*member) {
  const RegistrationConfig d;
  return {{name, description, show(static_cast<double>(d.*member))},
          [name, member](RegistrationConfig& cfg, const std::string& text) {
            if constexpr (std::is_same_v<V, int>) {
              cfg.*member = parse_int(name, text);
            } else {
              cfg.*member = parse_double(name, text);
            }
          }};
}

const std::vector<Entry>& entries() {
  using R = RegistrationConfig;
  static const std::vector<Entry> table = {
      make_top("pyramid_levels", "number of pyramid levels", &R::pyramid_levels),
      make_top("iters_per_level", "maximum iterations per level", &R::iters_per_level),
      make_top("convergence_eps", "stop a level when the mean update falls below this (px)", &R::convergence_eps),
      make("diffusion.k", "Perona-Malik contrast parameter", &R::diffusion, &DiffusionConfig::contrast),
      make("diffusion.dt", "explicit diffusion time step", &R::diffusion, &DiffusionConfig::time_step),
      make("tensor.sigma_grad", "gradient pre-smoothing sigma", &R::tensor, &TensorConfig::sigma_grad),
      make("tensor.sigma_int", "structure tensor integration sigma", &R::tensor, &TensorConfig::sigma_int),
      make("slic.region_size", "superpixel grid interval (px)", &R::slic, &SlicConfig::region_size),
      make("slic.compactness", "superpixel compactness", &R::slic, &SlicConfig::compactness),
      make("slic.iterations", "SLIC iterations", &R::slic, &SlicConfig::iterations),
      make("mdl.b", "likelihood exponent weight", &R::mdl, &MdlParams::b),
      make("mdl.c", "model-cost weight on 1/sigma^2", &R::mdl, &MdlParams::c),
      make("mdl.lambda", "MRF smoothness weight", &R::mdl, &MdlParams::lambda),
      make("mdl.residual_scale", "residual scaling before the likelihood", &R::mdl, &MdlParams::residual_scale),
      make("jsm.f", "joint saliency gain F", &R::jsm, &JsmParams::gain),
      make("jsm.radius", "saliency neighbourhood radius", &R::jsm, &JsmParams::radius),
      make("jsm.saliency_floor", "background saliency threshold", &R::jsm, &JsmParams::saliency_floor),
      make("jsm.max_mismatch_scale", "upper bound of the mismatch scale", &R::jsm, &JsmParams::max_mismatch_scale),
      make("jsm.max_kernel_scale", "upper bound of the kernel scale", &R::jsm, &JsmParams::max_kernel_scale),
      make("block.size", "block size (odd, px)", &R::block, &BlockMatchConfig::block_size),
      make("block.radius", "search radius (px)", &R::block, &BlockMatchConfig::search_radius),
      make("block.step", "block grid spacing (px)", &R::block, &BlockMatchConfig::grid_step),
      make("block.bins", "mutual information histogram bins", &R::block, &BlockMatchConfig::bins),
  };
  return table;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

std::string config_key_list() {
  std::string out;
  for (const auto& k : config_keys()) {
    if (!out.empty()) out += ", ";
    out += k.name;
  }
  return out;
}

void apply_override(RegistrationConfig& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidInput("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  for (const auto& e : entries()) {
    if (e.key.name == key) {
      e.set(cfg, value);
      return;
    }
  }
  throw InvalidInput("unknown parameter '" + key + "'; valid keys: " + config_key_list());
}

}  // namespace jsmreg

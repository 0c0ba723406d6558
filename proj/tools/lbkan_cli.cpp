// Command-line front end. Links only the C API.
//
//   lbkan <run|mc-init|compare|decompose> [--config FILE] [--<key> VALUE ...]
//
// Precedence: command-line flag > config file > built-in default.

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "lbkan/lbkan.h"

namespace {

constexpr int kUsageExit = 2;

struct ConfigDeleter {
  void operator()(lbkan_config* c) const { lbkan_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<lbkan_config, ConfigDeleter>;

int report(lbkan_status st) {
  const std::string message = lbkan_last_error();
  const std::string key = lbkan_last_error_key();
  std::cerr << "lbkan: " << lbkan_status_name(st) << ": " << message;
  if (!key.empty() && message.find(key) == std::string::npos) std::cerr << " [" << key << "]";
  std::cerr << '\n';
  return lbkan_exit_code(st);
}

std::string dashed(std::string name) {
  for (char& c : name) {
    if (c == '_') c = '-';
  }
  return name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive tracking control simulator with KAN and DNN approximators"};
  app.set_version_flag("--version", std::string(lbkan_version()));

  std::string command;
  app.add_option("command", command, "Subcommand")
      ->required()
      ->check(CLI::IsMember({"run", "mc-init", "compare", "decompose"}));

  std::string config_file;
  app.add_option("--config", config_file, "key=value configuration file");

  // One string option per configuration key; values are validated by the
  // library so the error names the key.
  std::vector<std::pair<std::string, CLI::Option*>> key_options;
  std::vector<std::string> values(lbkan_config_key_count());
  for (std::size_t i = 0; i < lbkan_config_key_count(); ++i) {
    const std::string key = lbkan_config_key_name(i);
    if (key == "full") continue;
    std::string names = "--" + key;
    if (dashed(key) != key) names += ",--" + dashed(key);
    key_options.emplace_back(key, app.add_option(names, values[i], "Set " + key));
  }
  bool full = false;
  CLI::Option* full_flag =
      app.add_flag("--full", full, "Use the full 1000-candidate Monte Carlo initialization");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  lbkan_config* raw = nullptr;
  if (lbkan_status st = lbkan_config_create(&raw); st != LBKAN_OK) return report(st);
  ConfigPtr cfg(raw);

  if (!config_file.empty()) {
    if (lbkan_status st = lbkan_config_load_file(cfg.get(), config_file.c_str());
        st != LBKAN_OK) {
      return report(st);
    }
  }
  for (const auto& [key, opt] : key_options) {
    if (opt->count() == 0) continue;
    const std::string value = opt->as<std::string>();
    if (lbkan_status st = lbkan_config_set(cfg.get(), key.c_str(), value.c_str());
        st != LBKAN_OK) {
      return report(st);
    }
  }
  if (full_flag->count() > 0) {
    if (lbkan_status st = lbkan_config_set(cfg.get(), "full", full ? "true" : "false");
        st != LBKAN_OK) {
      return report(st);
    }
  }

  if (lbkan_status st = lbkan_execute(cfg.get(), command.c_str()); st != LBKAN_OK) {
    return report(st);
  }

  std::cout << command << ": done\n";
  return 0;
}

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rdtf/rdtf.h"

// Exit codes: 0 every check passed, 1 a check failed, 2 usage, config or runtime error.
namespace {

int report(rdtf_status s) {
  std::fprintf(stderr, "error (%s): %s\n", rdtf_status_name(s), rdtf_last_error());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ricci-DeTurck flow lab: run verification experiments from a JSON config"};
  app.set_version_flag("--version", rdtf_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string output_root;
  auto* run = app.add_subcommand("run", "Run every experiment listed in a config");
  run->add_option("config", config_path, "Path to the JSON config")->required();
  run->add_option("--output-root", output_root, "Prefix for relative output directories");

  auto* validate = app.add_subcommand("validate", "Parse and validate a config without running it");
  validate->add_option("config", config_path, "Path to the JSON config")->required();

  auto* list = app.add_subcommand("list", "List available experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    size_t needed = 0;
    rdtf_list_experiments(nullptr, 0, &needed);
    std::vector<char> buf(needed);
    if (rdtf_status s = rdtf_list_experiments(buf.data(), buf.size(), nullptr); s != RDTF_OK) return report(s);
    std::fputs(buf.data(), stdout);
    return 0;
  }
  if (validate->parsed()) {
    if (rdtf_status s = rdtf_config_validate(config_path.c_str()); s != RDTF_OK) return report(s);
    std::printf("config ok: %s\n", config_path.c_str());
    return 0;
  }
  int passed = 0;
  const rdtf_status s = rdtf_run_config(config_path.c_str(), output_root.empty() ? nullptr : output_root.c_str(), &passed);
  if (s == RDTF_CHECK_FAILED) {
    std::fprintf(stderr, "experiment error: %s\n", rdtf_last_error());
    return 1;
  }
  if (s != RDTF_OK) return report(s);
  std::printf("%s\n", passed ? "all experiments passed" : "one or more checks failed");
  return passed ? 0 : 1;
}

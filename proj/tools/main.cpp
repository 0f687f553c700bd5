#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "commands.hpp"
#include "kanlm/errors.hpp"

// Exit codes: 0 success, 1 runtime or numerical failure, 2 usage or input
// error. Every command is deterministic under a fixed seed: reruns with the
// same flags reproduce output files byte for byte.

int main(int argc, char** argv) {
  CLI::App app{"kanlm: learn interpretable load-model equations from disturbance data"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from an INI-style file");

  kanlmcli::register_synth(app);
  kanlmcli::register_train(app);
  kanlmcli::register_extract(app);
  kanlmcli::register_eval(app);
  kanlmcli::register_compare(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message
    return 2;
  } catch (const kanlm::InvalidInput& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

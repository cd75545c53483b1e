#include <cstdio>
#include <functional>
#include <map>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace {

enum Exit { kOk = 0, kInternal = 1, kInvariant = 2, kIo = 3, kBadArgs = 4 };

int report(const char* kind, const std::exception& e, int code) {
  std::fprintf(stderr, "bhdimer_cli: %s: %s\n", kind, e.what());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bose-Hubbard dimer with complex interaction: mean-field and many-body tools"};
  app.set_version_flag("--version", bhdimer::kVersion);
  cli::RunConfig cfg;
  cfg.register_options(app);
  app.require_subcommand(1);
  app.allow_config_extras(CLI::config_extras_mode::error);

  const std::map<std::string, std::pair<const char*, std::function<int(const cli::RunConfig&)>>>
      commands{
          {"regions", {"Region map over a (g, k) grid", cli::cmd_regions}},
          {"portrait", {"Bloch-sphere trajectories from a seed grid", cli::cmd_portrait}},
          {"decay", {"Population imbalance and norm decay curves", cli::cmd_decay}},
          {"fixed-points", {"Fixed-point catalog with stability", cli::cmd_fixed_points}},
          {"compare", {"Many-body versus mean-field error against N", cli::cmd_compare}},
          {"lindblad", {"Two-particle-loss master equation versus its mean field", cli::cmd_lindblad}},
          {"verify", {"Run the acceptance criteria", cli::cmd_verify}},
      };
  for (const auto& [name, entry] : commands) {
    app.add_subcommand(name, entry.first)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    app.exit(e);
    return kIo;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadArgs;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  try {
    return commands.at(cfg.command).second(cfg);
  } catch (const cli::IoError& e) {
    return report("i/o error", e, kIo);
  } catch (const bhdimer::InvariantViolation& e) {
    return report("invariant violation", e, kInvariant);
  } catch (const bhdimer::IntegrationError& e) {
    return report("integration failure", e, kInvariant);
  } catch (const std::domain_error& e) {
    return report("bad argument", e, kBadArgs);
  } catch (const std::length_error& e) {
    return report("size limit", e, kBadArgs);
  } catch (const std::exception& e) {
    return report("internal error", e, kInternal);
  }
}

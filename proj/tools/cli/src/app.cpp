#include "covep/cli/app.hpp"

#include "commands.hpp"
#include "covep/errors.hpp"

#include <CLI11.hpp>

#include <ostream>

namespace covep::cli {

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covariant Euler-Poincare reduction on trivial bundles", "covep"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, const std::filesystem::path&, std::ostream&);
  };
  const Command commands[] = {
      {"reduce", "Reduce a group-valued section to sigma and its curvature", cmd_reduce},
      {"verify", "Run the invariant suite and write a JSON report", cmd_verify},
      {"rigid-body", "Integrate the classical Euler-Poincare equations", cmd_rigid_body},
      {"harmonic", "Minimize the harmonic-map energy by residual descent", cmd_harmonic},
      {"reconstruct", "Rebuild a section from a flat sigma", cmd_reconstruct},
  };
  std::vector<CLI::App*> subs;
  std::vector<CLI::Option*> seed_opts;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "Output directory (created if missing)");
    seed_opts.push_back(sub->add_option("--seed", seed, "Overrides the config seed"));
    subs.push_back(sub);
  }

  // CLI11 expects argv without the program name, in reverse order.
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "covep: " << e.what() << "\n";
    return kInputError;
  }

  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (!subs[k]->parsed()) continue;
    try {
      RunConfig cfg = load_config(config_path);
      if (seed_opts[k]->count() > 0) cfg.seed = seed;
      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) throw InputError("cannot create output directory " + out_dir + ": " + ec.message());
      return commands[k].fn(cfg, out_dir, out);
    } catch (const InputError& e) {
      err << "covep: input error: " << e.what() << "\n";
      return kInputError;
    } catch (const ConstructionError& e) {
      err << "covep: input error: " << e.what() << "\n";
      return kInputError;
    } catch (const ContractViolation& e) {
      err << "covep: input error: " << e.what() << "\n";
      return kInputError;
    } catch (const FlatnessError& e) {
      err << "covep: refused: " << e.what() << "\n";
      return kNumericFailure;
    } catch (const NumericalError& e) {
      err << "covep: numeric failure: " << e.what() << "\n";
      return kNumericFailure;
    } catch (const DomainError& e) {
      err << "covep: numeric failure: " << e.what() << "\n";
      return kNumericFailure;
    } catch (const std::exception& e) {
      err << "covep: error: " << e.what() << "\n";
      return kNumericFailure;
    }
  }
  return kInputError;
}

}  // namespace covep::cli

// smlab: command-line front end for label structures.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "smlab/smlab.hpp"

namespace {

// Bad input: reported on stderr, exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kInputError = 2;

smlab::Json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return smlab::Json::parse(buf.str());
  } catch (const smlab::Json::parse_error& e) {
    throw InputError(path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

smlab::LabelStructure read_structure(const std::string& path) {
  const auto j = read_json(path);
  try {
    return smlab::validate_structure(j);
  } catch (const smlab::StructureError& e) {
    std::string msg = path + ": invalid label structure";
    for (const auto& v : e.violations()) msg += "\n  " + v;
    throw InputError(msg);
  } catch (const smlab::Json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

smlab::TheoryEngine engine(const std::string& name) {
  try {
    return smlab::TheoryEngine::from_name(name);
  } catch (const smlab::ExemplarError& e) {
    throw InputError(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* seed = std::getenv("SMLAB_SEED")) (void)seed;  // reserved; every command is deterministic

  CLI::App app{"smlab: label structures of strongly minimal theories"};
  app.require_subcommand(1);

  std::string input, output, name, report = "text";
  int depth = 3, stages = 6;

  auto* check = app.add_subcommand("check", "check a label structure against conditions (a)-(e)");
  check->add_option("structure", input, "structure JSON")->required();
  check->add_option("--report", report, "report format")->check(CLI::IsMember({"json", "text"}));

  auto* exemplar = app.add_subcommand("exemplar", "describe an exemplar theory");
  exemplar->add_option("name", name, "pure-set:k, pure-set:omega, succ:c, succ:omega or dlo")->required();
  exemplar->add_option("--depth", depth, "catalog depth")->check(CLI::PositiveNumber);

  auto* extract = app.add_subcommand("extract", "extract the label structure of an exemplar");
  extract->add_option("name", name, "exemplar name")->required();
  extract->add_option("--depth", depth, "catalog depth")->required()->check(CLI::PositiveNumber);
  extract->add_option("-o,--output", output, "output file (default stdout)");

  auto* build = app.add_subcommand("build", "build finite approximations of a generic model");
  build->add_option("structure", input, "structure JSON")->required();
  build->add_option("--stages", stages, "number of stages")->required()->check(CLI::NonNegativeNumber);
  build->add_option("-o,--output", output, "chain JSON (default stdout)");

  auto* roundtrip = app.add_subcommand("roundtrip", "build, re-extract and compare");
  roundtrip->add_option("structure", input, "structure JSON")->required();
  roundtrip->add_option("--stages", stages, "number of stages")->required()->check(CLI::NonNegativeNumber);

  auto* dot = app.add_subcommand("dot", "export the domination Hasse diagram as DOT");
  dot->add_option("structure", input, "structure JSON")->required();
  dot->add_option("-o,--output", output, "DOT file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kInputError;
  }

  try {
    if (check->parsed()) {
      const auto v = smlab::check_conditions(read_structure(input));
      std::cout << (report == "json" ? smlab::to_json(v).dump(2) + "\n" : smlab::text_report(v));
      return v.overall ? kOk : kFail;
    }
    if (exemplar->parsed()) {
      std::cout << engine(name).describe(depth);
      return kOk;
    }
    if (extract->parsed()) {
      write_text(output, engine(name).extract_json(depth).dump(2) + "\n");
      return kOk;
    }
    if (build->parsed()) {
      const auto s = read_structure(input);
      try {
        const auto r = smlab::build_approximation(s, stages);
        write_text(output, smlab::to_json(r).dump() + "\n");
        std::cerr << "built " << r.chain.size() << " stage(s), universe size " << r.universe_size() << "\n";
        return kOk;
      } catch (const smlab::BuildError& e) {
        std::cerr << "build aborted: " << e.what() << "\n";
        return kFail;
      }
    }
    if (roundtrip->parsed()) {
      const auto s = read_structure(input);
      try {
        const auto r = smlab::verify_roundtrip(s, stages);
        for (const auto& l : r.lines) std::cout << l << "\n";
        for (const auto& p : r.problems) std::cout << "mismatch: " << p << "\n";
        std::cout << (r.ok ? "ROUNDTRIP OK" : "ROUNDTRIP FAILED") << "\n";
        return r.ok ? kOk : kFail;
      } catch (const smlab::BuildError& e) {
        std::cout << "build aborted: " << e.what() << "\nROUNDTRIP FAILED\n";
        return kFail;
      }
    }
    if (dot->parsed()) {
      write_text(output, smlab::to_dot(read_structure(input)));
      return kOk;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

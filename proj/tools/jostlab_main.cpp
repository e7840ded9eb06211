#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "jostlab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"jostlab: Jost solutions, spectral evolution and tail analysis"};
  std::string config_path, out, suite;
  int threads = 0;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out, "output directory (overrides output_dir)");
  app.add_option("--threads", threads, std::string("worker threads (default: $") + jostlab::kThreadsEnv +
                                           " or hardware)")
      ->check(CLI::PositiveNumber);
  app.add_option("--suite", suite, "verification suite for task=verify")
      ->check(CLI::IsMember(jostlab::suite_names()));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  jostlab::RunRequest req;
  req.out = out;
  req.threads = threads;
  req.suite = suite;
  req.config_dir = std::filesystem::absolute(config_path).parent_path();
  try {
    std::ifstream in(config_path);
    if (!in) throw jostlab::Error(jostlab::ErrorCode::config_invalid, "cannot read " + config_path);
    req.config = jostlab::Json::parse(in);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error CONFIG_INVALID: %s\n", e.what());
    return 2;
  }
  auto res = jostlab::run(req);
  const auto& m = res.manifest;
  if (res.exit_status != 0) {
    std::fprintf(stderr, "error %s: %s\n", m["error"]["code"].get<std::string>().c_str(),
                 m["error"]["message"].get<std::string>().c_str());
    return res.exit_status;
  }
  for (const auto& a : m["artifacts"]) std::printf("wrote %s\n", a["file"].get<std::string>().c_str());
  if (m.contains("criteria"))
    for (const auto& l : m["criteria"]) std::printf("%s\n", l.get<std::string>().c_str());
  if (m.contains("all_pass")) std::printf("all criteria pass: %s\n", m["all_pass"].get<bool>() ? "yes" : "no");
  return 0;
}

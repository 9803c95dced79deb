// SPDX-License-Identifier: Apache-2.0
//
// nrp-service: HTTP/JSON planning service.
//
//   nrp-service [--listen HOST:PORT] [--time-limit SECONDS] [--spool DIR]
//
// Each flag falls back to NRP_LISTEN, NRP_TIME_LIMIT and NRP_SPOOL.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "nrp/service.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nrp-service: nurse rostering planner over HTTP/JSON"};
  std::string listen = "127.0.0.1:8080";
  double time_limit = nrp::kDefaultTimeLimitSeconds;
  std::string spool;
  app.add_option("--listen", listen, "HOST:PORT to bind")->envname("NRP_LISTEN");
  app.add_option("--time-limit", time_limit, "default per-solve time limit in seconds")
      ->envname("NRP_TIME_LIMIT")
      ->check(CLI::PositiveNumber);
  app.add_option("--spool", spool, "directory for per-job result documents")->envname("NRP_SPOOL");
  CLI11_PARSE(app, argc, argv);

  nrp::ServiceConfig config;
  try {
    nrp::parse_listen_address(listen, config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  }
  config.time_limit_seconds = time_limit;
  if (!spool.empty()) config.spool_dir = spool;

  try {
    nrp::PlannerServer server(config);
    const int port = server.bind();
    std::cout << "listening on " << config.host << ":" << port << std::endl;
    server.serve();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

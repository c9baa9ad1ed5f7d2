#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "ksbound.h"

TEST_CASE("version and error strings") {
  REQUIRE(ksb_version() != nullptr);
  CHECK(std::strlen(ksb_version()) > 0);
  REQUIRE(ksb_last_error() != nullptr);
}

TEST_CASE("option keys are validated") {
  ksb_options* opts = ksb_options_create();
  REQUIRE(opts != nullptr);
  CHECK(ksb_options_set(opts, "eps", 1e-7) == KSB_OK);
  CHECK(ksb_options_set(opts, "max_iters", 100000) == KSB_OK);
  CHECK(ksb_options_set(opts, "polish", 1) == KSB_OK);
  CHECK(ksb_options_set(opts, "symmetry", 0) == KSB_OK);
  CHECK(ksb_options_set(opts, "workers", 2) == KSB_OK);
  CHECK(ksb_options_set(opts, "seed", 7) == KSB_OK);
  CHECK(ksb_options_set(opts, "no_such_key", 1) == KSB_EINVAL);
  CHECK(std::strlen(ksb_last_error()) > 0);
  CHECK(ksb_options_set(nullptr, "eps", 1e-7) == KSB_EINVAL);
  ksb_options_destroy(opts);
}

TEST_CASE("bound computation through the c interface") {
  ksb_bound_result* result = nullptr;
  REQUIRE(ksb_bound(KSB_KIND_TRUNCATED, 6, 3.5, 2, nullptr, &result) == KSB_OK);
  REQUIRE(result != nullptr);
  CHECK(ksb_bound_value(result) == doctest::Approx(9.074245).epsilon(1e-3));
  CHECK(ksb_bound_is_usable(result) == 1);
  CHECK(std::string(ksb_bound_status(result)) == "optimal");

  double pres = 0, dres = 0, seconds = 0;
  long iters = 0;
  CHECK(ksb_bound_stats(result, &pres, &dres, &iters, &seconds) == KSB_OK);
  CHECK(pres <= 1e-6);
  CHECK(dres <= 1e-6);
  CHECK(iters > 0);

  int certified = 0;
  double residual = 0, min_eig = 0, sample_min = 0;
  CHECK(ksb_bound_certificate(result, &certified, &residual, &min_eig,
                              &sample_min) == KSB_OK);
  CHECK(certified == 1);
  CHECK(residual <= 1e-6);
  CHECK(min_eig >= -1e-7);
  CHECK(sample_min >= -1e-6);

  int n = ksb_bound_coeffs(result, nullptr, 0);
  REQUIRE(n > 0);
  std::vector<double> coeffs(static_cast<std::size_t>(n));
  CHECK(ksb_bound_coeffs(result, coeffs.data(), n) == n);

  const char* path = "capi_bound.json";
  REQUIRE(ksb_bound_write_json(result, path) == KSB_OK);
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json doc = nlohmann::json::parse(in);
  CHECK(doc["bound"].get<double>() == doctest::Approx(9.074245).epsilon(1e-3));
  CHECK(doc["status"].get<std::string>() == "optimal");
  std::remove(path);
  ksb_bound_result_destroy(result);
}

TEST_CASE("invalid bound arguments are rejected") {
  ksb_bound_result* result = nullptr;
  CHECK(ksb_bound(KSB_KIND_TRUNCATED, 0, 3.5, 2, nullptr, &result) ==
        KSB_EINVAL);
  CHECK(ksb_bound(KSB_KIND_TRUNCATED, 6, 3.5, 3, nullptr, &result) ==
        KSB_EINVAL);  // odd degree
  CHECK(ksb_bound(99, 6, 3.5, 2, nullptr, &result) == KSB_EINVAL);
  CHECK(ksb_bound(KSB_KIND_PDE, 3, 3.5, 2, nullptr, &result) ==
        KSB_EINVAL);  // pde needs N > L
  CHECK(std::strlen(ksb_last_error()) > 0);
}

TEST_CASE("equilibrium branch csv and envelope") {
  const char* path = "capi_branch.csv";
  REQUIRE(ksb_branch_csv(1, 1.05, 1.4, 10, path) == KSB_OK);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "n,L,N,energy,residual");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows > 3);
  std::remove(path);

  int branch = 0;
  double energy = 0;
  REQUIRE(ksb_envelope_max(2.4, 16, &branch, &energy) == KSB_OK);
  CHECK(branch == 2);
  CHECK(energy > 0.0);
}

TEST_CASE("simulation reports decay and blow-up") {
  double mean = 0, se = 0, final_norm = 0;
  int blew_up = 0;
  REQUIRE(ksb_simulate(8, 0.9, 120.0, 1, nullptr, &mean, &se, &final_norm,
                       &blew_up) == KSB_OK);
  CHECK(blew_up == 0);
  CHECK(final_norm <= 1e-8);

  const char* path = "capi_traj.csv";
  REQUIRE(ksb_simulate(3, 4.0, 200.0, 1, path, &mean, &se, &final_norm,
                       &blew_up) == KSB_OK);
  CHECK(blew_up == 1);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,energy");
  std::remove(path);
}

TEST_CASE("background recovery reports a monotone interior profile") {
  double alpha = 0, slope = 0;
  const char* csv = "capi_profile.csv";
  const char* json = "capi_profile.json";
  REQUIRE(ksb_background(8, 1.8, nullptr, csv, json, &alpha, &slope) == KSB_OK);
  CHECK(alpha > 0.0);
  std::ifstream jin(json);
  REQUIRE(jin.good());
  nlohmann::json doc = nlohmann::json::parse(jin);
  CHECK(doc["alpha"].get<double>() == doctest::Approx(alpha).epsilon(1e-9));
  std::ifstream cin_file(csv);
  REQUIRE(cin_file.good());
  std::string header;
  std::getline(cin_file, header);
  CHECK(header == "x,zeta");
  std::remove(csv);
  std::remove(json);
}

TEST_CASE("sdpa export through the c interface") {
  const char* path = "capi_export.dat-s";
  REQUIRE(ksb_export_sdpa(KSB_KIND_TRUNCATED, 4, 2.0, 2, path) == KSB_OK);
  std::ifstream in(path);
  REQUIRE(in.good());
  int m = 0;
  in >> m;
  CHECK(m > 0);
  std::remove(path);
}

TEST_CASE("convergence study through the c interface") {
  int converged = 0, n_used = 0;
  double bound = 0;
  REQUIRE(ksb_converge_in_n(KSB_KIND_TRUNCATED, 2.0, 2, 6, 12, 1e-4, nullptr,
                            nullptr, &converged, &n_used, &bound) == KSB_OK);
  CHECK(converged == 1);
  CHECK(n_used >= 6);
  CHECK(bound > 0.0);
}

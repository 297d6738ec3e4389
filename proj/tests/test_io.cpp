#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "recur/error.hpp"
#include "recur/io.hpp"

using namespace recur;

TEST_CASE("chain JSON") {
  SUBCASE("round trip") {
    const auto k = build_two_state(0.3);
    std::istringstream in(chain_to_json(k).dump());
    const auto back = read_chain_json(in);
    CHECK(back.states() == k.states());
    CHECK(back.prob(0, 0) == k.prob(0, 0));
    CHECK(back.prob(0, 1) == k.prob(0, 1));
    CHECK(back.prob(1, 0) == 1.0);
  }
  SUBCASE("3-cycle from text") {
    std::istringstream in(R"({"states": ["a", "b", "c"], "rows": [[["b", 1.0]], [["c", 1.0]], [["a", 1.0]]]})");
    const auto k = read_chain_json(in);
    CHECK(k.index_of("c") == 2);
    CHECK(k.prob(2, 0) == 1.0);
  }
  SUBCASE("invalid kernels name the violation") {
    std::istringstream short_row(R"({"states": ["0", "1"], "rows": [[["1", 0.9]], [["0", 1.0]]]})");
    try {
      read_chain_json(short_row);
      FAIL("expected InvalidArgument");
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find("sum") != std::string::npos);
    }
    std::istringstream unknown(R"({"states": ["0"], "rows": [[["7", 1.0]]]})");
    CHECK_THROWS_AS(read_chain_json(unknown), InvalidArgument);
    std::istringstream garbage("{not json");
    CHECK_THROWS_AS(read_chain_json(garbage), InvalidArgument);
    CHECK_THROWS_AS(read_chain_file("/nonexistent/chain.json"), InvalidArgument);
  }
}

TEST_CASE("petal JSON") {
  const auto doc = nlohmann::json::parse(
      R"({"p": 0.25, "max_petals": 3, "U1": {"atoms": [2, 5], "probs": [0.5, 0.5]}, "U2": {"atoms": [3], "probs": [1.0]}})");
  const auto spec = parse_petal_json(doc);
  CHECK(spec.p == 0.25);
  CHECK(spec.max_petals == 3);
  CHECK(spec.u1.atoms() == std::vector<std::uint64_t>{2, 5});
  CHECK(spec.u2.atoms() == std::vector<std::uint64_t>{3});
  auto bad = doc;
  bad["U1"]["probs"] = {0.5, 0.4};
  CHECK_THROWS_AS(parse_petal_json(bad), InvalidArgument);
}

TEST_CASE("law CSV") {
  SUBCASE("dense round trip keeps every bit") {
    const auto law = first_passage_law(build_two_state(0.37), 1, 1, 120);
    std::stringstream buf;
    write_law_csv(buf, law);
    const auto back = read_law_csv(buf);
    REQUIRE(back.is_dense());
    CHECK(back.log_pmf() == law.log_pmf());
    CHECK(back.log_tail_mass() == law.log_tail_mass());
    REQUIRE(back.tail_cert().has_value());
    CHECK(back.tail_cert()->rho == law.tail_cert()->rho);
    CHECK(back.tail_cert()->n0 == law.tail_cert()->n0);
    CHECK(back.tail_cert()->period == law.tail_cert()->period);
  }
  SUBCASE("layout") {
    std::stringstream buf;
    write_law_csv(buf, first_passage_law(build_two_state(0.5), 0, 0, 3));
    std::string line;
    std::getline(buf, line);
    CHECK(line == "n,prob,log_prob");
    std::getline(buf, line);
    CHECK(line == "1,0.5,-0.69314718055994529");
    std::getline(buf, line);
    std::getline(buf, line);
    CHECK(line == "3,0,-inf");
    std::getline(buf, line);
    CHECK(line == "tail_mass,0,-inf");
  }
  SUBCASE("sparse round trip") {
    const auto law = PassageLaw::sparse(AtomicDist::from_probs({3, 10, 400}, std::vector<double>{0.2, 0.3, 0.5}));
    std::stringstream buf;
    write_law_csv(buf, law);
    const auto back = read_law_csv(buf);
    REQUIRE_FALSE(back.is_dense());
    CHECK(back.atoms().atoms() == law.atoms().atoms());
    CHECK(back.atoms().log_probs() == law.atoms().log_probs());
  }
}

TEST_CASE("report JSON") {
  CHECK(log_value_json(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(log_value_json(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(log_value_json(1.5) == 1.5);
  CHECK(format_double(0.1) == "0.10000000000000001");

  const auto est = f_moment(first_passage_law(build_two_state(0.5), 0, 0, 10), MomentFunction::power(1));
  const auto j = estimate_to_json(est);
  CHECK(j["verdict"] == "converged");
  CHECK(j["log_tail_bound"] == "-inf");
  CHECK(j["N"] == 10);

  const auto demo = demo_exponential(0.1, 0.05);
  const auto dj = demo_to_json(demo);
  CHECK(dj["demo"] == "exponential");
  CHECK(dj["success"] == true);
  CHECK(demo_summary(demo).find("SUCCESS") != std::string::npos);
  std::stringstream trace;
  write_trace_csv(trace, demo.infinite_side);
  std::string header;
  std::getline(trace, header);
  CHECK(header == "k,log_term,log_partial_sum");
}

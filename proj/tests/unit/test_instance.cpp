#include <string>

#include "doctest.h"
#include "json.hpp"
#include "sbrsp/error.hpp"
#include "sbrsp/instance.hpp"

using namespace sbrsp;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "network": {
      "nodes": [{"id": 1, "x_m": 0, "y_m": 0}, {"id": 2, "x_m": 1000, "y_m": 0}],
      "edges": [{"from": 1, "to": 2, "length_m": 1000, "freeflow_mps": 10, "oneway": false}]
    },
    "schools": [{"id": 10, "x_m": 1000, "y_m": 0}],
    "students": [{"id": 100, "x_m": 100, "y_m": 5, "school": 10}],
    "stops": [{"id": 50, "x_m": 150, "y_m": 0}],
    "buses": [{"id": 1, "capacity": 20}]
  })");
}

ErrorKind kind_of(const json& j, std::string* subject = nullptr) {
  try {
    parse_instance(j.dump());
  } catch (const Error& e) {
    if (subject) *subject = e.subject();
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::usage;
}

}  // namespace

TEST_CASE("minimal instance parses with default parameters") {
  const Instance inst = parse_instance(minimal().dump());
  CHECK(inst.students.size() == 1);
  CHECK(inst.students[0].school == 0);
  CHECK(inst.school_counts({0}) == std::vector<int>{1});
  CHECK(inst.params == GlobalParams{});
  CHECK(inst.params.max_route_time_s == 4020.0);
  REQUIRE(inst.catchments[0].size() == 1);
  CHECK(inst.catchments[0][0].walk_m == doctest::Approx(50.0));
  CHECK(inst.total_capacity() == 20);
  CHECK(inst.status_quo_riders() == std::vector<int>{0});
}

TEST_CASE("parameter unit conversions") {
  json j = minimal();
  j["params"] = {{"max_walk_mi", 0.3}, {"cluster_eps_km2", 1e-4}};
  const Instance inst = parse_instance(j.dump());
  CHECK(inst.params.max_walk_m == doctest::Approx(482.8032));
  CHECK(inst.params.cluster_eps_m2 == doctest::Approx(100.0));
}

TEST_CASE("validation errors name the offending field") {
  std::string subject;
  json bad_school = minimal();
  bad_school["students"][0]["school"] = 99;
  CHECK(kind_of(bad_school, &subject) == ErrorKind::validation);
  CHECK(subject == "students[0].school");

  json far = minimal();
  far["stops"][0]["x_m"] = 900;
  CHECK(kind_of(far, &subject) == ErrorKind::stranded_student);
  CHECK(subject == "student 100");

  // Never-group students need no stop.
  far["students"][0]["mode_group"] = "never";
  CHECK_NOTHROW(parse_instance(far.dump()));

  json no_net = minimal();
  no_net["network"] = json::object();
  CHECK(kind_of(no_net) == ErrorKind::validation);

  CHECK_THROWS_AS(parse_instance("{not json"), Error);
  try {
    parse_instance("{not json");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
  }
}

TEST_CASE("instance JSON round trip") {
  GeneratorSpec spec;
  spec.students = 25;
  spec.schools = 2;
  spec.buses = 3;
  spec.network_nodes = 30;
  spec.area_km = 3.0;
  spec.sometimes_share = 0.3;
  spec.never_share = 0.1;
  const Instance a = generate_synthetic(spec, 4);
  const std::string text = instance_to_json(a);
  const Instance b = parse_instance(text);
  CHECK(instance_to_json(b) == text);
  REQUIRE(b.students.size() == a.students.size());
  for (std::size_t i = 0; i < a.students.size(); ++i) {
    CHECK(b.students[i].mode == a.students[i].mode);
    CHECK(b.catchments[i].size() == a.catchments[i].size());
  }
}

TEST_CASE("generator is deterministic and honours the requested sizes") {
  GeneratorSpec spec;
  spec.students = 100;
  spec.schools = 3;
  spec.buses = 9;
  const std::string a = instance_to_json(generate_synthetic(spec, 7));
  const std::string b = instance_to_json(generate_synthetic(spec, 7));
  CHECK(a == b);
  CHECK(a != instance_to_json(generate_synthetic(spec, 8)));

  const Instance inst = generate_synthetic(spec, 7);
  CHECK(inst.students.size() == 100);
  CHECK(inst.schools.size() == 3);
  CHECK(inst.buses.size() == 9);
  for (const auto& c : inst.catchments) CHECK_FALSE(c.empty());

  GeneratorSpec tree = spec;
  tree.network_style = "random-tree";
  tree.network_nodes = 60;
  const Instance t = generate_synthetic(tree, 3);
  CHECK(t.network.average_degree() == doctest::Approx(2.0).epsilon(0.1));
  GeneratorSpec grid = spec;
  grid.network_style = "grid";
  CHECK(generate_synthetic(grid, 3).network.average_degree() > t.network.average_degree());
}

TEST_CASE("generator spec parsing") {
  const GeneratorSpec g = parse_generator_spec(R"({"students": 12, "schools": 2, "network_style": "grid"})");
  CHECK(g.students == 12);
  CHECK(g.schools == 2);
  CHECK(g.network_style == "grid");
  CHECK(g.buses == GeneratorSpec{}.buses);
}

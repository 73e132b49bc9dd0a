#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sbrsp/network.hpp"

namespace sbrsp {

enum class ModeGroup { always, sometimes, never };

std::string_view mode_group_name(ModeGroup g);
ModeGroup parse_mode_group(std::string_view s);

struct School {
  Id id = 0;
  std::string name;
  Point position;
  NetworkLocation location;
};

struct Student {
  Id id = 0;
  Point position;
  Id school_id = 0;
  ModeGroup mode = ModeGroup::always;
  std::optional<double> car_time_s;
  bool rides_bus = true;  // status-quo rider

  // Derived on validation.
  int school = -1;
  NetworkLocation home;
};

struct CandidateStop {
  Id id = 0;
  Point position;
  NetworkLocation location;
};

struct Bus {
  Id id = 0;
  int capacity = 0;
  std::optional<int> cluster_capacity;
  int clustering_capacity() const { return cluster_capacity.value_or(capacity); }
};

struct GlobalParams {
  double max_route_time_s = 4020.0;
  double board_intercept_s = 10.0;
  double board_slope_s = 2.0;
  double deboard_intercept_s = 10.0;
  double deboard_slope_s = 2.0;
  double max_walk_m = 482.8032;
  double cluster_eps_m2 = 100.0;
  int kmeans_max_iterations = 100;
  double time_limit_cluster_s = 60.0;
  double time_limit_stopmin_s = 60.0;
  double time_limit_reduced_s = 60.0;
  double time_limit_full_s = 120.0;
  double bpr_alpha = 0.15;
  double bpr_beta = 4.0;
  double default_capacity_vph = 800.0;
  double peak_window_min = 25.0;
  double walk_speed_mps = 1.3;
  bool euclidean_walk = false;
  std::optional<int> status_quo_riders;

  friend bool operator==(const GlobalParams&, const GlobalParams&) = default;
};

struct Instance {
  std::string name;
  RoadNetwork network;
  std::vector<School> schools;
  std::vector<Student> students;
  std::vector<CandidateStop> stops;
  std::vector<Bus> buses;
  GlobalParams params;

  // Derived on validation: per student, stops within walking distance.
  std::vector<std::vector<StopReach>> catchments;

  std::vector<int> school_counts(const std::vector<int>& riders) const;
  // Indices of status-quo riders: rides_bus students outside the never group.
  std::vector<int> status_quo_riders() const;
  int total_capacity() const;
  double arc_capacity_vph(int arc) const;
};

// Snaps every location, resolves school references, computes catchments and
// checks every invariant. Throws Error with the offending field path.
void validate_instance(Instance& inst);

Instance parse_instance(std::string_view json_text);
Instance load_instance(const std::filesystem::path& path);
std::string instance_to_json(const Instance& inst);
void save_instance(const Instance& inst, const std::filesystem::path& path);

struct GeneratorSpec {
  int students = 60;
  int schools = 3;
  double stop_density = 4.0;  // candidate stops per km of road
  std::string network_style = "mixed";  // grid | random-tree | mixed
  int buses = 4;
  std::optional<int> bus_capacity;
  double area_km = 6.0;  // side length of the square service area
  int network_nodes = 80;
  double sometimes_share = 0.0;
  double never_share = 0.0;
  double rider_share = 1.0;  // status-quo riders among non-never students
  std::optional<double> max_route_time_s;
  std::optional<double> max_walk_m;
};

GeneratorSpec parse_generator_spec(std::string_view json_text);
Instance generate_synthetic(const GeneratorSpec& spec, std::uint64_t seed);

}  // namespace sbrsp

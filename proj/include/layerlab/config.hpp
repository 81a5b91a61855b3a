#pragma once

#include <map>
#include <string>
#include <vector>

#include "layerlab/asymptotics.hpp"
#include "layerlab/oned.hpp"
#include "layerlab/pde2d.hpp"
#include "layerlab/potential.hpp"
#include "layerlab/recovery.hpp"

namespace layerlab {

// Plain-text key-value configuration:
//   # comment
//   section.key = value
// Keys are dotted identifiers; values are scalars or comma-separated lists.
// parse(serialize(parse(text))) == parse(text).
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  std::string serialize() const;  // canonical: sorted keys
  std::string hash() const;       // FNV-1a 64 of the canonical form, hex

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double dflt) const;
  int get_int_or(const std::string& key, int dflt) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list_or(const std::string& key,
                                  std::vector<double> dflt) const;
  void set(const std::string& key, const std::string& value);

  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string> entries_;
};

// Bridges from the config grammar to the domain objects. Every numeric
// default in the modules is overridable here.
PotentialSpec potential_from_config(const Config& c);
BoundaryGeometry geometry_from_config(const Config& c);
DirichletData data_from_config(const Config& c);
EpsilonLadder ladder_from_config(const Config& c, bool two_d);
DeltaSchedule schedule_from_config(const Config& c);
GridSpec1D grid1d_from_config(const Config& c);
GridSpec2D grid2d_from_config(const Config& c);

// CSV with the config hash embedded as a leading comment.
void write_csv(const std::string& path, const std::string& config_hash,
               const std::string& header,
               const std::vector<std::vector<double>>& rows);

// Documented grid-dump format: hash, geometry, eps, sizes, axes, row-major
// nodal values.
void write_grid_dump(const std::string& path, const std::string& config_hash,
                     const Field2D& field);

}  // namespace layerlab

#include "synthhome/simulate.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>

#include "synthhome/error.hpp"
#include "synthhome/geometry.hpp"
#include "synthhome/util.hpp"

namespace fs = std::filesystem;

namespace synthhome {

namespace {

// EnergyPlus 9.6+ field layout (BuildingSurface:Detailed carries Space Name).
constexpr std::string_view kBuiltinTemplate = R"IDF(! synthhome single-zone residential model
! Conditioned floor area (ft2): ${FLOOR_AREA}

Version, 23.2;

SimulationControl,
  Yes,                     !- Do Zone Sizing Calculation
  Yes,                     !- Do System Sizing Calculation
  No,                      !- Do Plant Sizing Calculation
  No,                      !- Run Simulation for Sizing Periods
  Yes;                     !- Run Simulation for Weather File Run Periods

Building,
  Generated Home,          !- Name
  0,                       !- North Axis {deg}
  Suburbs,                 !- Terrain
  0.04,                    !- Loads Convergence Tolerance Value
  0.4,                     !- Temperature Convergence Tolerance Value {deltaC}
  FullExterior,            !- Solar Distribution
  25,                      !- Maximum Number of Warmup Days
  6;                       !- Minimum Number of Warmup Days

Timestep, 4;

RunPeriod,
  Annual,                  !- Name
  1, 1, ,                  !- Begin Month, Day, Year
  12, 31, ,                !- End Month, Day, Year
  ,                        !- Day of Week for Start Day
  Yes, Yes, No, Yes, Yes;  !- Holidays, DST, Weekend Holiday Rule, Rain, Snow

GlobalGeometryRules,
  UpperLeftCorner,         !- Starting Vertex Position
  Counterclockwise,        !- Vertex Entry Direction
  Relative;                !- Coordinate System

ScheduleTypeLimits, Fraction, 0, 1, Continuous;
Schedule:Constant, AlwaysOn, Fraction, 1;

Material:NoMass,
  WallInsulation,          !- Name
  MediumRough,             !- Roughness
  ${WALL_R_VALUE|si},      !- Thermal Resistance {m2-K/W}
  0.9, 0.7, 0.7;           !- Thermal, Solar, Visible Absorptance

Material:NoMass,
  RoofInsulation,          !- Name
  MediumRough,             !- Roughness
  ${ROOF_R_VALUE|si},      !- Thermal Resistance {m2-K/W}
  0.9, 0.7, 0.7;           !- Thermal, Solar, Visible Absorptance

Material:NoMass,
  FloorSlab,               !- Name
  Smooth,                  !- Roughness
  0.5,                     !- Thermal Resistance {m2-K/W}
  0.9, 0.7, 0.7;           !- Thermal, Solar, Visible Absorptance

WindowMaterial:SimpleGlazingSystem,
  Glazing,                 !- Name
  2.0,                     !- U-Factor {W/m2-K}
  0.4;                     !- Solar Heat Gain Coefficient

Construction, ExteriorWall, WallInsulation;
Construction, Roof, RoofInsulation;
Construction, Floor, FloorSlab;
Construction, Window, Glazing;

Zone,
  LivingZone,              !- Name
  0,                       !- Direction of Relative North {deg}
  0, 0, 0,                 !- Origin {m}
  1,                       !- Type
  1,                       !- Multiplier
  autocalculate,           !- Ceiling Height {m}
  autocalculate;           !- Volume {m3}

${VERTICES}

ZoneInfiltration:DesignFlowRate,
  LivingInfiltration,      !- Name
  LivingZone,              !- Zone or ZoneList or Space or SpaceList Name
  AlwaysOn,                !- Schedule Name
  AirChanges/Hour,         !- Design Flow Rate Calculation Method
  ,                        !- Design Flow Rate {m3/s}
  ,                        !- Flow per Floor Area {m3/s-m2}
  ,                        !- Flow per Exterior Surface Area {m3/s-m2}
  ${AIR_CHANGE_RATE},      !- Air Changes per Hour {1/hr}
  1, 0, 0, 0;              !- Constant, Temperature, Velocity, Velocity Squared Coefficients

HVACTemplate:Thermostat,
  Setpoints,               !- Name
  ,                        !- Heating Setpoint Schedule Name
  20,                      !- Constant Heating Setpoint {C}
  ,                        !- Cooling Setpoint Schedule Name
  24;                      !- Constant Cooling Setpoint {C}

HVACTemplate:Zone:Unitary,
  LivingZone,              !- Zone Name
  Furnace,                 !- Template Unitary System Name
  Setpoints;               !- Template Thermostat Name

HVACTemplate:System:Unitary,
  Furnace,                 !- Name
  ,                        !- System Availability Schedule Name
  LivingZone,              !- Control Zone or Thermostat Location Name
  autosize,                !- Supply Fan Maximum Flow Rate {m3/s}
  ,                        !- Supply Fan Operating Mode Schedule Name
  0.7,                     !- Supply Fan Total Efficiency
  600,                     !- Supply Fan Delta Pressure {Pa}
  0.9,                     !- Supply Fan Motor Efficiency
  1,                       !- Supply Fan Motor in Air Stream Fraction
  SingleSpeedDX,           !- Cooling Coil Type
  ,                        !- Cooling Coil Availability Schedule Name
  autosize,                !- Cooling Design Supply Air Temperature {C}
  autosize,                !- Cooling Coil Gross Rated Total Capacity {W}
  autosize,                !- Cooling Coil Gross Rated Sensible Heat Ratio
  ${HVAC_COOLING_COP},     !- Cooling Coil Gross Rated COP {W/W}
  Gas,                     !- Heating Coil Type
  ,                        !- Heating Coil Availability Schedule Name
  autosize,                !- Heating Design Supply Air Temperature {C}
  autosize,                !- Heating Coil Capacity {W}
  ${HVAC_HEATING_COP};     !- Gas Heating Coil Efficiency

OutputControl:Table:Style, Comma, JtoKWH;
Output:Table:SummaryReports, AllSummary;
)IDF";

double slot_value(const std::optional<double>& v, double fallback) { return v.value_or(fallback); }

struct Slot {
  std::size_t begin;
  std::size_t end;  // one past '}'
  std::string name;
  std::string filter;
};

std::vector<Slot> scan_slots(std::string_view text) {
  std::vector<Slot> slots;
  std::size_t pos = 0;
  while ((pos = text.find("${", pos)) != std::string_view::npos) {
    const auto close = text.find('}', pos + 2);
    if (close == std::string_view::npos) throw TemplateError("unterminated placeholder at offset " + std::to_string(pos));
    std::string body(text.substr(pos + 2, close - pos - 2));
    std::string filter;
    if (auto bar = body.find('|'); bar != std::string::npos) {
      filter = body.substr(bar + 1);
      body.resize(bar);
    }
    if (body.empty()) throw TemplateError("empty placeholder at offset " + std::to_string(pos));
    slots.push_back({pos, close + 1, std::move(body), std::move(filter)});
    pos = close + 1;
  }
  return slots;
}

std::string vertex_block(const std::vector<LonLat>& footprint, int stories, double story_height_m) {
  if (footprint.size() < 3) throw TemplateError("VERTICES needs a footprint with at least 3 vertices");
  const geometry::LocalProjection proj(footprint);
  auto pts = proj.forward(footprint);
  double twice = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % pts.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  if (twice == 0.0) throw TemplateError("VERTICES footprint has zero area");
  if (twice < 0) std::reverse(pts.begin(), pts.end());

  const double height = story_height_m * std::max(1, stories);
  auto xyz = [](const geometry::PointM& p, double z) {
    return format_fixed(p.x, 4) + ", " + format_fixed(p.y, 4) + ", " + format_fixed(z, 4);
  };
  auto surface = [](std::string_view name, std::string_view type, std::string_view construction,
                    std::string_view boundary, bool exposed, const std::vector<std::string>& verts) {
    std::string s = "BuildingSurface:Detailed,\n  " + std::string(name) + ", " + std::string(type) + ", " +
                    std::string(construction) + ", LivingZone, , " + std::string(boundary) + ", , " +
                    (exposed ? "SunExposed, WindExposed" : "NoSun, NoWind") + ", autocalculate, " +
                    std::to_string(verts.size()) + ",\n";
    for (std::size_t i = 0; i < verts.size(); ++i) {
      s += "  " + verts[i] + (i + 1 == verts.size() ? ";\n" : ",\n");
    }
    return s;
  };

  std::string out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % n];
    out += surface("Wall_" + std::to_string(i + 1), "Wall", "ExteriorWall", "Outdoors", true,
                   {xyz(a, height), xyz(a, 0), xyz(b, 0), xyz(b, height)});
    out += "\n";
  }
  std::vector<std::string> roof;
  std::vector<std::string> floor;
  for (std::size_t i = 0; i < n; ++i) {
    roof.push_back(xyz(pts[i], height));
    floor.push_back(xyz(pts[n - 1 - i], 0));
  }
  out += surface("Roof", "Roof", "Roof", "Outdoors", true, roof);
  out += "\n";
  out += surface("Floor", "Floor", "Floor", "Ground", false, floor);
  return out;
}

}  // namespace

IdfTemplate IdfTemplate::builtin() { return IdfTemplate{.text = std::string(kBuiltinTemplate)}; }

IdfTemplate IdfTemplate::from_file(const fs::path& path) {
  IdfTemplate t;
  t.text = read_text(path);
  check_template(t);
  return t;
}

std::vector<std::string> template_placeholders(std::string_view text) {
  std::vector<std::string> names;
  for (auto& slot : scan_slots(text)) names.push_back(std::move(slot.name));
  return names;
}

void check_template(const IdfTemplate& tmpl) {
  std::map<std::string, int> counts;
  for (const auto& slot : scan_slots(tmpl.text)) {
    if (std::find(kIdfPlaceholders.begin(), kIdfPlaceholders.end(), slot.name) == kIdfPlaceholders.end()) {
      throw TemplateError("unknown placeholder ${" + slot.name + "}");
    }
    if (!slot.filter.empty() && slot.filter != "si") {
      throw TemplateError("unknown filter \"" + slot.filter + "\" on ${" + slot.name + "}");
    }
    if (!slot.filter.empty() && slot.name != "WALL_R_VALUE" && slot.name != "ROOF_R_VALUE") {
      throw TemplateError("the si filter applies only to R-values, not ${" + slot.name + "}");
    }
    ++counts[slot.name];
  }
  for (auto name : kIdfPlaceholders) {
    const int c = counts[std::string(name)];
    if (c != 1) {
      throw TemplateError("placeholder ${" + std::string(name) + "} must appear exactly once, found " +
                          std::to_string(c));
    }
  }
  const auto problems = check_params(tmpl.defaults);
  if (!problems.empty()) throw TemplateError("template defaults invalid: " + problems.front());
}

int estimate_stories(const BuildingFeature& feature) {
  const double footprint_ft2 = geometry::footprint_area_m2(feature.footprint) * geometry::kSquareFeetPerSquareMeter;
  if (!(footprint_ft2 > 0)) return 1;
  return std::max(1, static_cast<int>(std::lround(feature.floor_area_ft2 / footprint_ft2)));
}

IdfValues idf_values(const BuildingFeature& feature, double story_height_m) {
  IdfValues v;
  v.floor_area_ft2 = feature.floor_area_ft2;
  v.hvac_heating_cop = feature.params.hvac_heating_cop;
  v.hvac_cooling_cop = feature.params.hvac_cooling_cop;
  v.wall_r_value = feature.params.wall_r_value;
  v.roof_r_value = feature.params.roof_r_value;
  v.air_change_rate = feature.params.air_change_rate;
  v.footprint = feature.footprint;
  v.stories = estimate_stories(feature);
  v.story_height_m = story_height_m;
  return v;
}

std::string render_idf(const IdfValues& values, const IdfTemplate& tmpl) {
  check_template(tmpl);
  const PerformanceParams& d = tmpl.defaults;
  const double wall_r = slot_value(values.wall_r_value, d.wall_r_value);
  const double roof_r = slot_value(values.roof_r_value, d.roof_r_value);
  const std::map<std::string, double, std::less<>> numbers{
      {"HVAC_HEATING_COP", slot_value(values.hvac_heating_cop, d.hvac_heating_cop)},
      {"HVAC_COOLING_COP", slot_value(values.hvac_cooling_cop, d.hvac_cooling_cop)},
      {"WALL_R_VALUE", wall_r},
      {"ROOF_R_VALUE", roof_r},
      {"AIR_CHANGE_RATE", slot_value(values.air_change_rate, d.air_change_rate)},
  };

  std::string out;
  std::size_t cursor = 0;
  for (const auto& slot : scan_slots(tmpl.text)) {
    out.append(tmpl.text, cursor, slot.begin - cursor);
    cursor = slot.end;
    if (slot.name == "VERTICES") {
      out += vertex_block(values.footprint, values.stories, values.story_height_m);
    } else if (slot.name == "FLOOR_AREA") {
      out += values.floor_area_ft2 ? format_number(*values.floor_area_ft2) : "autocalculate";
    } else {
      const double v = numbers.at(slot.name);
      out += slot.filter == "si" ? format_number(v * kRsiPerImperialR) : format_number(v);
    }
  }
  out.append(tmpl.text, cursor, std::string::npos);
  return out;
}

std::string render_idf(const BuildingFeature& feature, const IdfTemplate& tmpl) {
  return render_idf(idf_values(feature), tmpl);
}

// ---------------------------------------------------------------------------

namespace {

struct ProcessResult {
  int exit_code = -1;
  std::string stderr_tail;
};

std::string tail(const std::string& text, std::size_t max_chars) {
  if (text.size() <= max_chars) return text;
  return text.substr(text.size() - max_chars);
}

ProcessResult run_process(const std::vector<std::string>& argv, const fs::path& cwd) {
  const fs::path out_log = cwd / "stdout.log";
  const fs::path err_log = cwd / "stderr.log";
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  const pid_t pid = fork();
  if (pid < 0) throw EngineError(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    if (chdir(cwd.c_str()) != 0) _exit(126);
    const int out_fd = open(out_log.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    const int err_fd = open(err_log.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (out_fd < 0 || err_fd < 0) _exit(126);
    dup2(out_fd, STDOUT_FILENO);
    dup2(err_fd, STDERR_FILENO);
    execv(args[0], args.data());
    _exit(127);
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) throw EngineError(std::string("waitpid failed: ") + std::strerror(errno));
  }
  ProcessResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  if (fs::exists(err_log)) r.stderr_tail = tail(read_text(err_log), 2000);
  return r;
}

fs::path find_binary(const fs::path& home, std::initializer_list<std::string_view> names) {
  for (auto name : names) {
    fs::path p = home / name;
    if (fs::is_regular_file(p) && access(p.c_str(), X_OK) == 0) return p;
  }
  throw EngineError("binary not found: " + std::string(*names.begin()) + " under " + home.string());
}

fs::path make_scratch(const fs::path& root) {
  fs::create_directories(root);
  std::string templ = (root / "synthhome-run-XXXXXX").string();
  if (mkdtemp(templ.data()) == nullptr) {
    throw EngineError("cannot create scratch directory under " + root.string());
  }
  return templ;
}

}  // namespace

SimulationResult run_external(std::string_view idf, const ExternalEngineOptions& options) {
  if (idf.find("${") != std::string_view::npos) {
    throw InputError("engine input still contains an unrendered ${...} placeholder");
  }
  const fs::path expand = find_binary(options.engine_home, {"ExpandObjects", "ExpandObjects.exe"});
  const fs::path engine = find_binary(options.engine_home, {"energyplus", "EnergyPlus", "energyplus.exe"});
  if (!fs::is_regular_file(options.weather)) {
    throw InputError("weather file not found: " + options.weather.string());
  }

  const fs::path scratch = make_scratch(options.scratch_root);
  struct Cleanup {
    fs::path dir;
    bool keep;
    ~Cleanup() {
      std::error_code ec;
      if (!keep) fs::remove_all(dir, ec);
    }
  } cleanup{scratch, options.keep_scratch};

  write_text(scratch / "in.idf", idf);
  const fs::path idd = options.engine_home / "Energy+.idd";
  if (fs::is_regular_file(idd)) fs::copy_file(idd, scratch / "Energy+.idd");

  auto expanded = run_process({fs::absolute(expand).string()}, scratch);
  if (expanded.exit_code != 0) {
    throw EngineError("ExpandObjects exited with " + std::to_string(expanded.exit_code) + ": " +
                      expanded.stderr_tail);
  }
  const fs::path input = fs::is_regular_file(scratch / "expanded.idf") ? scratch / "expanded.idf" : scratch / "in.idf";

  std::vector<std::string> argv{fs::absolute(engine).string(), "--weather", fs::absolute(options.weather).string(),
                                "--output-directory", scratch.string()};
  if (fs::is_regular_file(idd)) {
    argv.push_back("--idd");
    argv.push_back((scratch / "Energy+.idd").string());
  }
  argv.push_back(input.string());
  auto run = run_process(argv, scratch);
  if (run.exit_code != 0) {
    throw EngineError("engine exited with " + std::to_string(run.exit_code) + ": " + run.stderr_tail);
  }
  const fs::path table = scratch / "eplustbl.csv";
  if (!fs::is_regular_file(table)) throw ParseError("engine produced no eplustbl.csv");
  SimulationResult result = parse_engine_table(read_text(table));
  result.engine = EngineKind::external;
  return result;
}

// ---------------------------------------------------------------------------

SimulationResult run_surrogate(const BuildingFeature& feature, const Climate& climate, std::optional<int> stories) {
  if (!(climate.hdd >= 0) || !(climate.cdd >= 0)) throw InputError("degree-days must be >= 0");
  if (!(climate.story_height_m > 0)) throw InputError("story height must be > 0");
  const auto& p = feature.params;
  for (double v : {p.hvac_heating_cop, p.hvac_cooling_cop, p.wall_r_value, p.roof_r_value}) {
    if (!std::isfinite(v) || v <= 0) throw InputError("surrogate needs positive, finite COPs and R-values");
  }
  if (!std::isfinite(p.air_change_rate) || p.air_change_rate < 0) {
    throw InputError("surrogate needs a non-negative air change rate");
  }
  const geometry::LocalProjection proj(feature.footprint);
  const auto pts = proj.forward(feature.footprint);
  const double roof_area = geometry::polygon_area(pts);
  if (!(roof_area > 0)) throw InputError("degenerate footprint: zero area");
  const int n_stories = stories.value_or(estimate_stories(feature));
  if (n_stories < 1) throw InputError("stories must be >= 1");

  const double height = climate.story_height_m * n_stories;
  const double wall_area = geometry::polygon_perimeter(pts) * height;
  const double volume = roof_area * height;
  const double u_wall = 1.0 / (p.wall_r_value * kRsiPerImperialR);
  const double u_roof = 1.0 / (p.roof_r_value * kRsiPerImperialR);
  const double ua_env = u_wall * wall_area + u_roof * roof_area;
  const double ua_inf = p.air_change_rate * volume * kInfiltrationFactor;
  const double ua = ua_env + ua_inf;

  const double heating_load = ua * climate.hdd * 24.0 / 1000.0;
  const double cooling_load = ua * climate.cdd * 24.0 / 1000.0;

  SimulationResult r;
  r.engine = EngineKind::surrogate;
  r.envelope_load_kwh = ua * (climate.hdd + climate.cdd) * 24.0 / 1000.0;
  r.hvac_energy_kwh = heating_load / p.hvac_heating_cop + cooling_load / p.hvac_cooling_cop;
  r.raw_outputs = {
      {"stories", static_cast<double>(n_stories)},
      {"wall_area_m2", wall_area},
      {"roof_area_m2", roof_area},
      {"volume_m3", volume},
      {"ua_envelope_w_per_k", ua_env},
      {"ua_infiltration_w_per_k", ua_inf},
      {"heating_load_kwh", heating_load},
      {"cooling_load_kwh", cooling_load},
  };
  return r;
}

}  // namespace synthhome

// Copyright 2026 The nrhc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nrhc/scenario.h"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "nrhc/errors.h"
#include "nrhc/format.h"

namespace nrhc {
namespace {

constexpr int kJoints = 2;
constexpr char kBegin[] = "# config-begin";
constexpr char kEnd[] = "# config-end";

std::string Join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

std::vector<std::string> SplitPath(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ValidationError("malformed key path '" + path + "'");
    parts.push_back(part);
  }
  if (parts.empty()) throw ValidationError("empty key path");
  return parts;
}

// Builds missing intermediate maps, then assigns the leaf.
void SetPath(YAML::Node node, const std::vector<std::string>& parts,
             std::size_t i, const YAML::Node& value) {
  if (i + 1 == parts.size()) {
    node[parts[i]] = value;
    return;
  }
  YAML::Node child = node[parts[i]];
  if (child && !child.IsMap()) {
    throw ValidationError("override path crosses non-mapping key '" +
                          parts[i] + "'");
  }
  SetPath(child, parts, i + 1, value);
}

class Reader {
 public:
  Reader(const std::string& source, std::set<std::string>* keys)
      : source_(source), keys_(keys) {}

  [[noreturn]] void Fail(const YAML::Mark& mark, const std::string& path,
                         const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (!mark.is_null()) msg << ":" << mark.line + 1 << ":" << mark.column + 1;
    msg << ": " << path << ": " << what;
    throw ValidationError(msg.str());
  }

  // Returns the sub-mapping `key` of `parent` (null node if absent) after
  // rejecting keys outside `allowed`.
  YAML::Node Section(const YAML::Node& parent, const std::string& prefix,
                     const std::string& key,
                     const std::set<std::string>& allowed) const {
    YAML::Node node = parent[key];
    const std::string path = Join(prefix, key);
    if (!node || node.IsNull()) return YAML::Node();
    if (!node.IsMap()) Fail(node.Mark(), path, "expected a mapping");
    CheckKeys(node, path, allowed);
    return node;
  }

  void CheckKeys(const YAML::Node& map, const std::string& path,
                 const std::set<std::string>& allowed) const {
    for (const auto& kv : map) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        Fail(kv.first.Mark(), Join(path, key), "unknown key");
      }
    }
  }

  template <typename T>
  void Get(const YAML::Node& map, const std::string& prefix,
           const std::string& key, T* out, const char* type) const {
    if (!map) return;
    const YAML::Node node = map[key];
    if (!node) return;
    const std::string path = Join(prefix, key);
    if (!node.IsScalar()) Fail(node.Mark(), path, std::string("expected ") + type);
    try {
      *out = node.as<T>();
    } catch (const YAML::BadConversion&) {
      Fail(node.Mark(), path, std::string("expected ") + type);
    }
    keys_->insert(path);
  }

  void GetDouble(const YAML::Node& map, const std::string& prefix,
                 const std::string& key, double* out) const {
    Get(map, prefix, key, out, "a number");
    if (map && map[key] && !std::isfinite(*out)) {
      Fail(map[key].Mark(), Join(prefix, key), "must be finite");
    }
  }

  void GetBool(const YAML::Node& map, const std::string& prefix,
               const std::string& key, bool* out) const {
    Get(map, prefix, key, out, "true or false");
  }

  void GetString(const YAML::Node& map, const std::string& prefix,
                 const std::string& key, std::string* out) const {
    Get(map, prefix, key, out, "a string");
  }

  // Sequence of finite numbers; `size` < 0 accepts any nonzero length.
  template <typename Vec>
  void GetVector(const YAML::Node& map, const std::string& prefix,
                 const std::string& key, int size, Vec* out) const {
    if (!map) return;
    const YAML::Node node = map[key];
    if (!node) return;
    const std::string path = Join(prefix, key);
    if (!node.IsSequence()) Fail(node.Mark(), path, "expected a list");
    const int n = static_cast<int>(node.size());
    if ((size >= 0 && n != size) || (size < 0 && n == 0)) {
      Fail(node.Mark(), path,
           size >= 0 ? "expected " + std::to_string(size) + " entries"
                     : std::string("expected a nonempty list"));
    }
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      try {
        v(i) = node[i].as<double>();
      } catch (const YAML::BadConversion&) {
        Fail(node[i].Mark(), path, "expected numbers");
      }
      if (!std::isfinite(v(i))) Fail(node[i].Mark(), path, "must be finite");
    }
    *out = v;
    keys_->insert(path);
  }

  // Runs `check`, prefixing any ValidationError with source and path.
  void Check(const YAML::Node& near, const std::string& path,
             const std::function<void()>& check) const {
    try {
      check();
    } catch (const ValidationError& e) {
      Fail(near ? near.Mark() : YAML::Mark::null_mark(), path, e.what());
    }
  }

 private:
  const std::string& source_;
  std::set<std::string>* keys_;
};

const std::set<std::string> kLinkKeys = {"mass", "length", "com", "inertia"};

void ReadRobot(const Reader& r, const YAML::Node& node,
               const std::string& path, RobotParams* p) {
  if (!node) return;
  r.GetDouble(node, path, "gravity", &p->gravity);
  for (int i = 0; i < kJoints; ++i) {
    const std::string key = "link" + std::to_string(i + 1);
    const YAML::Node link = r.Section(node, path, key, kLinkKeys);
    const std::string lp = Join(path, key);
    Link& l = p->links[i];
    r.GetDouble(link, lp, "mass", &l.mass);
    r.GetDouble(link, lp, "length", &l.length);
    r.GetDouble(link, lp, "com", &l.com);
    r.GetDouble(link, lp, "inertia", &l.inertia);
  }
  r.GetVector(node, path, "motor_inertia", kJoints, &p->motor_inertia);
}

void ValidateRobot(const Reader& r, const YAML::Node& node,
                   const std::string& path, const RobotParams& p) {
  try {
    p.Validate();
  } catch (const ValidationError& e) {
    // Messages start with the field, e.g. "link1.mass must be > 0".
    const std::string msg = e.what();
    const std::size_t space = msg.find(' ');
    const std::string field = msg.substr(0, space);
    // Point at the deepest node present along the field path.
    YAML::Mark mark = node ? node.Mark() : YAML::Mark::null_mark();
    std::vector<YAML::Node> chain = {node};
    std::istringstream parts(field);
    for (std::string part; std::getline(parts, part, '.');) {
      const YAML::Node& cur = chain.back();
      if (!cur || !cur.IsMap() || !cur[part]) break;
      chain.push_back(cur[part]);
      mark = chain.back().Mark();
    }
    r.Fail(mark, path + "." + field,
           space == std::string::npos ? msg : msg.substr(space + 1));
  }
}

bool ValidName(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                    c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

ScenarioConfig Resolve(const YAML::Node& root, const std::string& source) {
  ScenarioConfig cfg;
  cfg.source = source;
  Reader r(source, &cfg.explicit_keys);
  if (root && !root.IsNull() && !root.IsMap()) {
    r.Fail(root.Mark(), "<root>", "expected a mapping");
  }
  const YAML::Node top = root && root.IsMap() ? root : YAML::Node();
  if (top) {
    r.CheckKeys(top, "", {"name", "sim", "controller", "observer", "nominal",
                          "plant", "friction", "reference", "initial",
                          "sweep"});
  }
  SimConfig& sim = cfg.sim;

  r.GetString(top, "", "name", &cfg.name);
  if (!ValidName(cfg.name)) {
    r.Fail(top ? top["name"].Mark() : YAML::Mark::null_mark(), "name",
           "must be nonempty and use only letters, digits, '_', '-', '.'");
  }

  const YAML::Node s = r.Section(
      top, "", "sim",
      {"dt", "t_end", "log_stride", "use_observer", "controller_enabled",
       "divergence_velocity", "settling_band", "torque_limit"});
  r.GetDouble(s, "sim", "dt", &sim.dt);
  r.GetDouble(s, "sim", "t_end", &sim.t_end);
  r.Get(s, "sim", "log_stride", &sim.log_stride, "an integer");
  r.GetBool(s, "sim", "use_observer", &sim.use_observer);
  r.GetBool(s, "sim", "controller_enabled", &sim.controller_enabled);
  r.GetDouble(s, "sim", "divergence_velocity", &sim.divergence_velocity);
  r.GetDouble(s, "sim", "settling_band", &cfg.settling_band);
  r.GetDouble(s, "sim", "torque_limit", &cfg.torque_limit);
  auto sim_mark = [&](const char* key) {
    return s && s[key] ? s[key].Mark() : YAML::Mark::null_mark();
  };
  if (!(sim.dt > 0.0)) r.Fail(sim_mark("dt"), "sim.dt", "must be > 0");
  if (!(sim.t_end >= 10.0 * sim.dt)) {
    r.Fail(sim_mark("t_end"), "sim.t_end", "must be at least 10 * sim.dt");
  }
  if (sim.log_stride < 1) {
    r.Fail(sim_mark("log_stride"), "sim.log_stride", "must be >= 1");
  }
  if (!(sim.divergence_velocity > 0.0)) {
    r.Fail(sim_mark("divergence_velocity"), "sim.divergence_velocity",
           "must be > 0");
  }
  if (!(cfg.settling_band > 0.0)) {
    r.Fail(sim_mark("settling_band"), "sim.settling_band", "must be > 0");
  }
  if (!(cfg.torque_limit >= 0.0)) {
    r.Fail(sim_mark("torque_limit"), "sim.torque_limit", "must be >= 0");
  }

  const YAML::Node c = r.Section(
      top, "", "controller",
      {"variant", "q_w", "r_w", "h", "sample_period", "integral_clamp"});
  std::string variant(ToString(sim.controller.variant));
  r.GetString(c, "controller", "variant", &variant);
  r.Check(c, "controller.variant",
          [&] { sim.controller.variant = ParseControlVariant(variant); });
  r.GetDouble(c, "controller", "q_w", &sim.controller.q_w);
  r.GetDouble(c, "controller", "r_w", &sim.controller.r_w);
  r.GetDouble(c, "controller", "h", &sim.controller.h);
  r.GetDouble(c, "controller", "sample_period", &sim.controller.sample_period);
  r.GetDouble(c, "controller", "integral_clamp",
              &sim.controller.integral_clamp);
  r.Check(c, "controller", [&] { sim.controller.Validate(); });

  const YAML::Node o = r.Section(
      top, "", "observer",
      {"alpha", "poles", "pole_scaling", "p_on_estimate", "position_source",
       "clamp", "initial_qhat", "initial_qdhat"});
  ObserverParams& op = sim.observer;
  r.GetDouble(o, "observer", "alpha", &op.alpha);
  r.GetVector(o, "observer", "poles", 2, &op.poles);
  std::string scaling(ToString(op.scaling));
  r.GetString(o, "observer", "pole_scaling", &scaling);
  r.Check(o, "observer.pole_scaling",
          [&] { op.scaling = ParsePoleScaling(scaling); });
  r.GetBool(o, "observer", "p_on_estimate", &op.p_on_estimate);
  std::string position(ToString(op.position_source));
  r.GetString(o, "observer", "position_source", &position);
  r.Check(o, "observer.position_source",
          [&] { op.position_source = ParsePositionSource(position); });
  r.GetDouble(o, "observer", "clamp", &op.clamp);
  Eigen::VectorXd qhat0 = Eigen::VectorXd::Constant(kJoints, 0.01);
  Eigen::VectorXd qdhat0 = Eigen::VectorXd::Zero(kJoints);
  r.GetVector(o, "observer", "initial_qhat", kJoints, &qhat0);
  r.GetVector(o, "observer", "initial_qdhat", kJoints, &qdhat0);
  r.Check(o, "observer", [&] { op.Validate(); });

  const std::set<std::string> robot_keys = {"gravity", "link1", "link2",
                                            "motor_inertia"};
  const YAML::Node nom = r.Section(top, "", "nominal", robot_keys);
  ReadRobot(r, nom, "nominal", &sim.nominal);
  ValidateRobot(r, nom, "nominal", sim.nominal);

  std::set<std::string> plant_keys = robot_keys;
  plant_keys.insert("payload");
  const YAML::Node pl = r.Section(top, "", "plant", plant_keys);
  cfg.plant_base = sim.nominal;
  ReadRobot(r, pl, "plant", &cfg.plant_base);
  ValidateRobot(r, pl, "plant", cfg.plant_base);
  const YAML::Node pay =
      r.Section(pl, "plant", "payload", {"dm2", "dlc2", "dI2"});
  if (pay.IsMap()) {
    PayloadPerturbation d;
    r.GetDouble(pay, "plant.payload", "dm2", &d.dm2);
    r.GetDouble(pay, "plant.payload", "dlc2", &d.dlc2);
    r.GetDouble(pay, "plant.payload", "dI2", &d.dI2);
    cfg.payload = d;
  }
  sim.plant = cfg.plant_base;
  if (cfg.payload) {
    r.Check(pay, "plant.payload", [&] {
      sim.plant = ApplyPayload(cfg.plant_base, *cfg.payload);
      sim.plant.Validate();
    });
  }

  const YAML::Node f = r.Section(
      top, "", "friction",
      {"enabled", "viscous", "coulomb", "eps", "on_position"});
  bool friction_on = f.IsMap();
  FrictionParams fp;
  fp.viscous = Eigen::VectorXd::Zero(kJoints);
  fp.coulomb = Eigen::VectorXd::Zero(kJoints);
  r.GetBool(f, "friction", "enabled", &friction_on);
  r.GetVector(f, "friction", "viscous", kJoints, &fp.viscous);
  r.GetVector(f, "friction", "coulomb", kJoints, &fp.coulomb);
  r.GetDouble(f, "friction", "eps", &fp.eps);
  r.GetBool(f, "friction", "on_position", &fp.on_position);
  r.Check(f, "friction", [&] { fp.Validate(kJoints); });
  if (friction_on) sim.friction = fp;

  const YAML::Node ref = r.Section(
      top, "", "reference", {"omega", "xi", "amplitude", "rate", "literal_form"});
  r.GetVector(ref, "reference", "omega", kJoints, &sim.reference.omega);
  r.GetVector(ref, "reference", "xi", kJoints, &sim.reference.xi);
  r.GetDouble(ref, "reference", "amplitude", &sim.reference.amplitude);
  r.GetDouble(ref, "reference", "rate", &sim.reference.rate);
  r.GetBool(ref, "reference", "literal_form", &sim.reference.literal_form);
  r.Check(ref, "reference", [&] { sim.reference.Validate(); });

  const YAML::Node ini = r.Section(top, "", "initial", {"q", "qd"});
  r.GetVector(ini, "initial", "q", kJoints, &sim.initial.q);
  r.GetVector(ini, "initial", "qd", kJoints, &sim.initial.qd);
  sim.initial_zhat = Interleave(qhat0, qdhat0);

  const YAML::Node sw = r.Section(top, "", "sweep", {"param", "values"});
  if (sw.IsMap()) {
    SweepSpec spec;
    r.GetString(sw, "sweep", "param", &spec.param);
    Eigen::VectorXd values;
    r.GetVector(sw, "sweep", "values", -1, &values);
    if (spec.param.empty() || values.size() == 0) {
      r.Fail(sw.Mark(), "sweep", "needs both param and values");
    }
    spec.values.assign(values.data(), values.data() + values.size());
    cfg.sweep = spec;
  }

  r.Check(top, "sim", [&] { cfg.warnings = sim.Validate(); });
  return cfg;
}

// YAML emitter that tags leaves missing from the source.
class Writer {
 public:
  explicit Writer(const std::set<std::string>& keys) : keys_(keys) {}

  void Section(const std::string& key) {
    out_ << key << ":\n";
    prefix_ = key;
  }
  void Sub(const std::string& key) {
    out_ << "  " << key << ":\n";
    sub_ = key;
  }
  void EndSub() { sub_.clear(); }

  void Leaf(const std::string& key, const std::string& value) {
    std::string path = prefix_;
    if (!sub_.empty()) path = Join(path, sub_);
    path = Join(path, key);
    out_ << (prefix_.empty() ? "" : "  ") << (sub_.empty() ? "" : "  ") << key
         << ": " << value;
    if (!keys_.count(path)) out_ << "  # default";
    out_ << "\n";
  }
  void Leaf(const std::string& key, double v) { Leaf(key, FormatDouble(v)); }
  void Leaf(const std::string& key, bool v) {
    Leaf(key, std::string(v ? "true" : "false"));
  }
  void Leaf(const std::string& key, int v) { Leaf(key, std::to_string(v)); }
  void Leaf(const std::string& key, const Eigen::VectorXd& v) {
    Leaf(key, FormatList(v));
  }
  void Top() { prefix_.clear(); }

  std::string str() const { return out_.str(); }

 private:
  const std::set<std::string>& keys_;
  std::ostringstream out_;
  std::string prefix_;
  std::string sub_;
};

void WriteRobot(Writer& w, const RobotParams& p) {
  w.Leaf("gravity", p.gravity);
  for (int i = 0; i < p.dof(); ++i) {
    w.Sub("link" + std::to_string(i + 1));
    w.Leaf("mass", p.links[i].mass);
    w.Leaf("length", p.links[i].length);
    w.Leaf("com", p.links[i].com);
    w.Leaf("inertia", p.links[i].inertia);
    w.EndSub();
  }
  w.Leaf("motor_inertia", p.motor_inertia.size() == 0
                              ? Eigen::VectorXd::Zero(p.dof()).eval()
                              : p.motor_inertia);
}

}  // namespace

ScenarioConfig ParseConfigText(const std::string& text,
                               const std::string& source,
                               const std::vector<Override>& overrides) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
    if (!overrides.empty()) {
      if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
      if (!root.IsMap()) throw ValidationError(source + ": expected a mapping");
      for (const auto& [path, value] : overrides) {
        SetPath(root, SplitPath(path), 0, YAML::Load(value));
      }
    }
  } catch (const YAML::Exception& e) {
    std::ostringstream msg;
    msg << source;
    if (!e.mark.is_null()) msg << ":" << e.mark.line + 1 << ":" << e.mark.column + 1;
    msg << ": " << e.msg;
    throw ValidationError(msg.str());
  }
  try {
    return Resolve(root, source);
  } catch (const YAML::Exception& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

ScenarioConfig ParseConfigFile(const std::string& path,
                               const std::vector<Override>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("error reading config '" + path + "'");
  return ParseConfigText(text.str(), path, overrides);
}

std::string EmitConfig(const ScenarioConfig& cfg) {
  const SimConfig& s = cfg.sim;
  Writer w(cfg.explicit_keys);
  w.Leaf("name", cfg.name);

  w.Section("sim");
  w.Leaf("dt", s.dt);
  w.Leaf("t_end", s.t_end);
  w.Leaf("log_stride", s.log_stride);
  w.Leaf("use_observer", s.use_observer);
  w.Leaf("controller_enabled", s.controller_enabled);
  w.Leaf("divergence_velocity", s.divergence_velocity);
  w.Leaf("settling_band", cfg.settling_band);
  w.Leaf("torque_limit", cfg.torque_limit);

  w.Section("controller");
  w.Leaf("variant", std::string(ToString(s.controller.variant)));
  w.Leaf("q_w", s.controller.q_w);
  w.Leaf("r_w", s.controller.r_w);
  w.Leaf("h", s.controller.h);
  w.Leaf("sample_period", s.controller.sample_period);
  w.Leaf("integral_clamp", s.controller.integral_clamp);

  w.Section("observer");
  w.Leaf("alpha", s.observer.alpha);
  w.Leaf("poles", Eigen::VectorXd(s.observer.poles));
  w.Leaf("pole_scaling", std::string(ToString(s.observer.scaling)));
  w.Leaf("p_on_estimate", s.observer.p_on_estimate);
  w.Leaf("position_source",
         std::string(ToString(s.observer.position_source)));
  w.Leaf("clamp", s.observer.clamp);
  w.Leaf("initial_qhat", EstimatedPositions(s.initial_zhat));
  Eigen::VectorXd qdhat(s.initial_zhat.size() / 2);
  for (Eigen::Index i = 0; i < qdhat.size(); ++i) qdhat(i) = s.initial_zhat(2 * i + 1);
  w.Leaf("initial_qdhat", qdhat);

  w.Section("nominal");
  WriteRobot(w, s.nominal);
  w.Section("plant");
  WriteRobot(w, cfg.plant_base);
  if (cfg.payload) {
    w.Sub("payload");
    w.Leaf("dm2", cfg.payload->dm2);
    w.Leaf("dlc2", cfg.payload->dlc2);
    w.Leaf("dI2", cfg.payload->dI2);
    w.EndSub();
  }

  w.Section("friction");
  const FrictionParams fp = s.friction.value_or(
      FrictionParams{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)});
  w.Leaf("enabled", s.friction.has_value());
  w.Leaf("viscous", fp.viscous);
  w.Leaf("coulomb", fp.coulomb);
  w.Leaf("eps", fp.eps);
  w.Leaf("on_position", fp.on_position);

  w.Section("reference");
  w.Leaf("omega", s.reference.omega);
  w.Leaf("xi", s.reference.xi);
  w.Leaf("amplitude", s.reference.amplitude);
  w.Leaf("rate", s.reference.rate);
  w.Leaf("literal_form", s.reference.literal_form);

  w.Section("initial");
  w.Leaf("q", s.initial.q);
  w.Leaf("qd", s.initial.qd);

  if (cfg.sweep) {
    w.Section("sweep");
    w.Leaf("param", cfg.sweep->param);
    w.Leaf("values", Eigen::Map<const Eigen::VectorXd>(
                         cfg.sweep->values.data(),
                         static_cast<Eigen::Index>(cfg.sweep->values.size()))
                         .eval());
  }
  return w.str();
}

std::string HeaderBlock(const ScenarioConfig& cfg, const std::string& title,
                        const std::vector<std::string>& notes) {
  std::ostringstream out;
  out << "# " << title << "\n";
  for (const std::string& n : notes) out << "# " << n << "\n";
  for (const std::string& wmsg : cfg.warnings) out << "# warning: " << wmsg << "\n";
  out << kBegin << "\n";
  std::istringstream lines(EmitConfig(cfg));
  std::string line;
  while (std::getline(lines, line)) out << "# " << line << "\n";
  out << kEnd << "\n";
  return out.str();
}

std::string ExtractHeaderConfig(const std::string& file_text) {
  std::istringstream in(file_text);
  std::string line;
  bool inside = false;
  std::ostringstream out;
  while (std::getline(in, line)) {
    if (!inside) {
      if (line == kBegin) inside = true;
      continue;
    }
    if (line == kEnd) return out.str();
    if (line.rfind("# ", 0) == 0) {
      out << line.substr(2) << "\n";
    } else if (line == "#") {
      out << "\n";
    } else {
      break;
    }
  }
  throw ValidationError("no embedded config block found");
}

}  // namespace nrhc

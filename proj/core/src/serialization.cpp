#include "cptdp/serialization.hpp"

#include "cptdp/format.hpp"

#include "overloaded.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace cptdp {

namespace {

using json = nlohmann::json;
using detail::Overloaded;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError("", std::string("not valid JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void require_object(const json& j, const std::string& field) {
  if (!j.is_object()) throw FormatError(field, "expected an object");
}

void reject_unknown_keys(const json& j, const std::string& field, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!keys.count(it.key())) throw FormatError(join(field, it.key()), "unknown key");
  }
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw FormatError(field, "expected a number");
  return j.get<double>();
}

double number_at(const json& j, const char* key, const std::string& field) {
  if (!j.contains(key)) throw FormatError(join(field, key), "missing");
  return number(j.at(key), join(field, key));
}

std::string string_at(const json& j, const char* key, const std::string& field) {
  if (!j.contains(key)) throw FormatError(join(field, key), "missing");
  if (!j.at(key).is_string()) throw FormatError(join(field, key), "expected a string");
  return j.at(key).get<std::string>();
}

// Re-raise library validation errors with the field they came from.
template <class Fn>
auto with_field(const std::string& field, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const FormatError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw FormatError(field, e.what());
  } catch (const std::domain_error& e) {
    throw FormatError(field, e.what());
  }
}

UtilityFunction utility_from_json(const json& j, const std::string& field) {
  require_object(j, field);
  const std::string family = string_at(j, "family", field);
  if (family == "identity") {
    reject_unknown_keys(j, field, {"family"});
    return UtilityFunction::identity();
  }
  if (family == "power") {
    reject_unknown_keys(j, field, {"family", "exponent"});
    const double e = number_at(j, "exponent", field);
    return with_field(join(field, "exponent"), [&] { return UtilityFunction::power(e); });
  }
  if (family == "scaled") {
    reject_unknown_keys(j, field, {"family", "factor", "base"});
    const double f = number_at(j, "factor", field);
    if (!j.contains("base")) throw FormatError(join(field, "base"), "missing");
    auto base = utility_from_json(j.at("base"), join(field, "base"));
    return with_field(join(field, "factor"), [&] { return UtilityFunction::scaled(std::move(base), f); });
  }
  throw FormatError(join(field, "family"), "unknown utility family '" + family + "'");
}

json utility_to_json(const UtilityFunction& u) {
  return std::visit(Overloaded{
                        [](const UtilityFunction::Identity&) { return json{{"family", "identity"}}; },
                        [](const UtilityFunction::Power& p) {
                          return json{{"family", "power"}, {"exponent", p.exponent}};
                        },
                        [](const UtilityFunction::Scaled& s) {
                          return json{{"family", "scaled"}, {"factor", s.factor}, {"base", utility_to_json(*s.base)}};
                        },
                    },
                    u.family());
}

WeightingFunction weighting_from_json(const json& j, const std::string& field) {
  require_object(j, field);
  const std::string family = string_at(j, "family", field);
  if (family == "identity") {
    reject_unknown_keys(j, field, {"family"});
    return WeightingFunction::identity();
  }
  if (family == "tversky_kahneman") {
    reject_unknown_keys(j, field, {"family", "delta"});
    const double d = number_at(j, "delta", field);
    return with_field(join(field, "delta"), [&] { return WeightingFunction::tversky_kahneman(d); });
  }
  if (family == "tabulated") {
    reject_unknown_keys(j, field, {"family", "knots"});
    const std::string kf = join(field, "knots");
    if (!j.contains("knots") || !j.at("knots").is_array()) throw FormatError(kf, "expected an array of [p, w]");
    std::vector<WeightingFunction::Knot> knots;
    for (std::size_t i = 0; i < j.at("knots").size(); ++i) {
      const json& k = j.at("knots")[i];
      const std::string f = kf + "[" + std::to_string(i) + "]";
      if (!k.is_array() || k.size() != 2) throw FormatError(f, "expected [p, w]");
      knots.push_back({number(k[0], f), number(k[1], f)});
    }
    return with_field(kf, [&] { return WeightingFunction::tabulated(std::move(knots)); });
  }
  throw FormatError(join(field, "family"), "unknown weighting family '" + family + "'");
}

json weighting_to_json(const WeightingFunction& w) {
  return std::visit(Overloaded{
                        [](const WeightingFunction::Identity&) { return json{{"family", "identity"}}; },
                        [](const WeightingFunction::TverskyKahneman& tk) {
                          return json{{"family", "tversky_kahneman"}, {"delta", tk.delta}};
                        },
                        [](const WeightingFunction::Tabulated& t) {
                          json knots = json::array();
                          for (const auto& k : t.knots) knots.push_back({k.p, k.w});
                          return json{{"family", "tabulated"}, {"knots", knots}};
                        },
                    },
                    w.family());
}

StateIndex state_ref(const json& j, const std::vector<std::string>& names, const std::string& field) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    for (StateIndex x = 0; x < names.size(); ++x) {
      if (names[x] == name) return x;
    }
    throw FormatError(field, "unknown state '" + name + "'");
  }
  if (j.is_number_unsigned()) {
    const auto idx = j.get<std::size_t>();
    if (idx >= names.size()) throw FormatError(field, "state index out of range");
    return idx;
  }
  throw FormatError(field, "expected a state name or index");
}

}  // namespace

CptSpec parse_spec(std::string_view json_text) {
  const json j = parse_text(json_text);
  require_object(j, "");
  reject_unknown_keys(j, "", {"reference_point", "u_plus", "u_minus", "w_plus", "w_minus"});
  CptSpec spec;
  if (j.contains("reference_point")) spec.reference_point = number(j.at("reference_point"), "reference_point");
  if (!std::isfinite(spec.reference_point)) throw FormatError("reference_point", "must be finite");
  if (j.contains("u_plus")) spec.u_plus = utility_from_json(j.at("u_plus"), "u_plus");
  if (j.contains("u_minus")) spec.u_minus = utility_from_json(j.at("u_minus"), "u_minus");
  if (j.contains("w_plus")) spec.w_plus = weighting_from_json(j.at("w_plus"), "w_plus");
  if (j.contains("w_minus")) spec.w_minus = weighting_from_json(j.at("w_minus"), "w_minus");
  return spec;
}

CptSpec load_spec(const std::filesystem::path& path) { return parse_spec(read_file(path)); }

std::string spec_to_json(const CptSpec& spec) {
  const json j{{"reference_point", spec.reference_point},
               {"u_plus", utility_to_json(spec.u_plus)},
               {"u_minus", utility_to_json(spec.u_minus)},
               {"w_plus", weighting_to_json(spec.w_plus)},
               {"w_minus", weighting_to_json(spec.w_minus)}};
  return j.dump(2);
}

DiscreteDistribution parse_distribution(std::string_view json_text) {
  const json j = parse_text(json_text);
  require_object(j, "");
  reject_unknown_keys(j, "", {"atoms"});
  if (!j.contains("atoms") || !j.at("atoms").is_array()) throw FormatError("atoms", "expected an array of [value, mass]");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < j.at("atoms").size(); ++i) {
    const json& a = j.at("atoms")[i];
    const std::string f = "atoms[" + std::to_string(i) + "]";
    if (!a.is_array() || a.size() != 2) throw FormatError(f, "expected [value, mass]");
    atoms.push_back({number(a[0], f), number(a[1], f)});
  }
  if (atoms.empty()) throw FormatError("atoms", "at least one atom is required");
  return with_field("atoms", [&] { return DiscreteDistribution::proper(std::move(atoms)); });
}

DiscreteDistribution load_distribution(const std::filesystem::path& path) {
  return parse_distribution(read_file(path));
}

std::string distribution_to_json(const DiscreteDistribution& dist) {
  json atoms = json::array();
  for (const Atom& a : dist.atoms()) atoms.push_back({a.value, a.mass});
  return json{{"atoms", atoms}}.dump(2);
}

MarkovModel parse_model(std::string_view json_text, ModelLoadOptions options) {
  const json j = parse_text(json_text);
  require_object(j, "");
  reject_unknown_keys(j, "", {"states", "mode", "cost_bound", "terminal_value", "actions"});

  if (!j.contains("states") || !j.at("states").is_array()) throw FormatError("states", "expected an array of names");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < j.at("states").size(); ++i) {
    const json& s = j.at("states")[i];
    if (!s.is_string()) throw FormatError("states[" + std::to_string(i) + "]", "expected a string");
    names.push_back(s.get<std::string>());
  }
  if (std::set<std::string>(names.begin(), names.end()).size() != names.size()) {
    throw FormatError("states", "duplicate state name");
  }

  if (!j.contains("mode")) throw FormatError("mode", "missing");
  const json& jm = j.at("mode");
  require_object(jm, "mode");
  const std::string type = string_at(jm, "type", "mode");
  ModelMode mode;
  if (type == "discounted") {
    reject_unknown_keys(jm, "mode", {"type", "alpha"});
    mode = Discounted{number_at(jm, "alpha", "mode")};
  } else if (type == "transient") {
    reject_unknown_keys(jm, "mode", {"type", "absorbing"});
    if (!jm.contains("absorbing")) throw FormatError("mode.absorbing", "missing");
    mode = Transient{state_ref(jm.at("absorbing"), names, "mode.absorbing")};
  } else {
    throw FormatError("mode.type", "expected 'discounted' or 'transient'");
  }

  const double cost_bound = number_at(j, "cost_bound", "");

  std::vector<std::vector<Action>> actions(names.size());
  if (!j.contains("actions")) throw FormatError("actions", "missing");
  const json& ja = j.at("actions");
  require_object(ja, "actions");
  for (auto it = ja.begin(); it != ja.end(); ++it) {
    const std::string sf = "actions." + it.key();
    const StateIndex x = state_ref(json(it.key()), names, sf);
    if (!it.value().is_array()) throw FormatError(sf, "expected an array of actions");
    for (std::size_t a = 0; a < it.value().size(); ++a) {
      const json& act = it.value()[a];
      const std::string af = sf + "[" + std::to_string(a) + "]";
      require_object(act, af);
      reject_unknown_keys(act, af, {"name", "disturbances"});
      Action action;
      action.name = act.contains("name") ? string_at(act, "name", af) : "a" + std::to_string(a);
      if (!act.contains("disturbances") || !act.at("disturbances").is_array()) {
        throw FormatError(join(af, "disturbances"), "expected an array");
      }
      for (std::size_t d = 0; d < act.at("disturbances").size(); ++d) {
        const json& o = act.at("disturbances")[d];
        const std::string of = af + ".disturbances[" + std::to_string(d) + "]";
        require_object(o, of);
        reject_unknown_keys(o, of, {"label", "mass", "next", "cost"});
        Outcome out;
        out.label = o.contains("label") ? string_at(o, "label", of) : "d" + std::to_string(d);
        out.mass = number_at(o, "mass", of);
        if (!o.contains("next")) throw FormatError(join(of, "next"), "missing");
        out.next = state_ref(o.at("next"), names, join(of, "next"));
        out.cost = number_at(o, "cost", of);
        action.outcomes.push_back(std::move(out));
      }
      actions[x].push_back(std::move(action));
    }
  }
  // An absorbing state without listed actions gets the trivial self-loop.
  if (const auto* t = std::get_if<Transient>(&mode)) {
    if (actions[t->absorbing].empty()) {
      actions[t->absorbing].push_back({"stay", {{1.0, t->absorbing, 0.0, "absorb"}}});
    }
  }

  std::optional<ValueFunction> terminal;
  if (j.contains("terminal_value")) {
    const json& jt = j.at("terminal_value");
    std::vector<double> v(names.size(), 0.0);
    if (jt.is_array()) {
      if (jt.size() != names.size()) throw FormatError("terminal_value", "expected one entry per state");
      for (std::size_t i = 0; i < jt.size(); ++i) v[i] = number(jt[i], "terminal_value[" + std::to_string(i) + "]");
    } else if (jt.is_object()) {
      for (auto it = jt.begin(); it != jt.end(); ++it) {
        v[state_ref(json(it.key()), names, "terminal_value")] = number(it.value(), "terminal_value." + it.key());
      }
    } else {
      throw FormatError("terminal_value", "expected an array or an object keyed by state");
    }
    terminal = with_field("terminal_value", [&] { return ValueFunction(std::move(v)); });
  }

  MarkovModel model(std::move(names), std::move(actions), cost_bound, mode, std::move(terminal));
  if (!options.allow_invalid) {
    const auto report = validate_model(model);
    if (!report.ok()) {
      const auto& v = report.violations.front();
      std::string field = "model";
      if (v.state) field = "actions." + model.state_name(*v.state);
      if (v.state && v.action) field += "[" + std::to_string(*v.action) + "]";
      if (v.state && v.action && v.outcome) field += ".disturbances[" + std::to_string(*v.outcome) + "]";
      throw FormatError(field, std::string(to_string(v.kind)) + ": " + v.message);
    }
  }
  return model;
}

MarkovModel load_model(const std::filesystem::path& path, ModelLoadOptions options) {
  return parse_model(read_file(path), options);
}

std::string model_to_json(const MarkovModel& model) {
  json states = json::array();
  for (StateIndex x = 0; x < model.num_states(); ++x) states.push_back(model.state_name(x));
  json mode = std::visit(Overloaded{
                             [](const Discounted& d) { return json{{"type", "discounted"}, {"alpha", d.alpha}}; },
                             [&](const Transient& t) {
                               return json{{"type", "transient"}, {"absorbing", model.state_name(t.absorbing)}};
                             },
                         },
                         model.mode());
  json actions = json::object();
  for (StateIndex x = 0; x < model.num_states(); ++x) {
    json list = json::array();
    for (const Action& a : model.actions(x)) {
      json outs = json::array();
      for (const Outcome& o : a.outcomes) {
        outs.push_back({{"label", o.label}, {"mass", o.mass}, {"next", model.state_name(o.next)}, {"cost", o.cost}});
      }
      list.push_back({{"name", a.name}, {"disturbances", outs}});
    }
    actions[model.state_name(x)] = list;
  }
  json terminal = json::array();
  for (double v : model.terminal_value().values()) terminal.push_back(v);
  return json{{"states", states},
              {"mode", mode},
              {"cost_bound", model.cost_bound()},
              {"terminal_value", terminal},
              {"actions", actions}}
      .dump(2);
}

void write_solve_report(std::ostream& out, const MarkovModel& model, const SolveResult& result,
                        const ReportHeader& header) {
  json h = json::object();
  for (const auto& [k, v] : header) h[k] = v;
  json value = json::object();
  json policy = json::object();
  for (StateIndex x = 0; x < model.num_states(); ++x) {
    value[model.state_name(x)] = result.value[x];
    json mix = json::array();
    const auto acts = model.actions(x);
    const auto m = result.policy.at(x);
    for (std::size_t a = 0; a < acts.size(); ++a) mix.push_back({{"action", acts[a].name}, {"probability", m[a]}});
    policy[model.state_name(x)] = mix;
  }
  const json report{{"header", h},
                    {"converged", result.converged},
                    {"iterations", result.iterations},
                    {"final_residual", result.trace.empty() ? 0.0 : result.trace.back()},
                    {"value", value},
                    {"policy", policy}};
  out << report.dump(2) << '\n';
}

void write_residual_csv(std::ostream& out, const SolveResult& result) {
  out << "iteration,residual\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    out << (i + 1) << ',' << format_double(result.trace[i]) << '\n';
  }
}

}  // namespace cptdp

// Instance documents: JSON with a `domain` block and one `instance` or a list of
// `instances`. Atoms are bracketed arrays, predicate first: ["q","a","b"].

#include "json.hpp"

#include "c2lab/error.hpp"
#include "c2lab/model.hpp"

namespace c2lab {

using json = nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

[[noreturn]] void shape_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::InvalidInput, path + ": " + what);
}

void allow_keys(const json& object, const std::string& path, std::initializer_list<const char*> keys) {
  for (const auto& [key, _] : object.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end()) {
      shape_error(path, "unexpected field '" + key + "'");
    }
  }
}

const json& field(const json& object, const std::string& path, const char* key) {
  auto it = object.find(key);
  if (it == object.end()) shape_error(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string as_string(const json& value, const std::string& path) {
  if (!value.is_string()) shape_error(path, "expected a string");
  return value.get<std::string>();
}

const json& as_array(const json& value, const std::string& path) {
  if (!value.is_array()) shape_error(path, "expected a list");
  return value;
}

Atom parse_atom(const json& value, const std::string& path) {
  as_array(value, path);
  if (value.empty()) shape_error(path, "atom must start with a predicate name");
  Atom atom{as_string(value[0], path + "[0]"), {}};
  for (std::size_t i = 1; i < value.size(); ++i) {
    atom.args.push_back(as_string(value[i], path + "[" + std::to_string(i) + "]"));
  }
  return atom;
}

AtomSet parse_atoms(const json& object, const std::string& path, const char* key, bool optional = false) {
  AtomSet atoms;
  if (optional && !object.contains(key)) return atoms;
  const std::string sub = path + "." + key;
  const json& list = as_array(field(object, path, key), sub);
  for (std::size_t i = 0; i < list.size(); ++i) {
    atoms.insert(parse_atom(list[i], sub + "[" + std::to_string(i) + "]"));
  }
  return atoms;
}

std::vector<std::string> parse_names(const json& object, const std::string& path, const char* key) {
  std::vector<std::string> names;
  const std::string sub = path + "." + key;
  const json& list = as_array(field(object, path, key), sub);
  for (std::size_t i = 0; i < list.size(); ++i) {
    names.push_back(as_string(list[i], sub + "[" + std::to_string(i) + "]"));
  }
  return names;
}

std::shared_ptr<const Domain> parse_domain(const json& value) {
  const std::string path = "domain";
  if (!value.is_object()) shape_error(path, "expected an object");
  allow_keys(value, path, {"predicates", "schemata"});

  std::vector<Predicate> predicates;
  const json& preds = as_array(field(value, path, "predicates"), path + ".predicates");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::string sub = path + ".predicates[" + std::to_string(i) + "]";
    if (!preds[i].is_object()) shape_error(sub, "expected an object");
    allow_keys(preds[i], sub, {"name", "arity"});
    const json& arity = field(preds[i], sub, "arity");
    if (!arity.is_number_unsigned()) shape_error(sub + ".arity", "expected a nonnegative integer");
    predicates.push_back(Predicate{as_string(field(preds[i], sub, "name"), sub + ".name"),
                                   arity.get<std::size_t>()});
  }

  std::vector<ActionSchema> schemata;
  if (value.contains("schemata")) {
    const json& list = as_array(value["schemata"], path + ".schemata");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string sub = path + ".schemata[" + std::to_string(i) + "]";
      if (!list[i].is_object()) shape_error(sub, "expected an object");
      allow_keys(list[i], sub, {"name", "params", "pre", "add", "del"});
      schemata.push_back(ActionSchema{as_string(field(list[i], sub, "name"), sub + ".name"),
                                      parse_names(list[i], sub, "params"), parse_atoms(list[i], sub, "pre", true),
                                      parse_atoms(list[i], sub, "add", true),
                                      parse_atoms(list[i], sub, "del", true)});
    }
  }
  return std::make_shared<const Domain>(std::move(predicates), std::move(schemata));
}

NamedInstance parse_instance(const json& value, const std::string& path,
                             const std::shared_ptr<const Domain>& domain, const std::string& default_name) {
  if (!value.is_object()) shape_error(path, "expected an object");
  allow_keys(value, path, {"name", "objects", "init", "goal"});
  std::string name = value.contains("name") ? as_string(value["name"], path + ".name") : default_name;
  if (!is_identifier(name)) shape_error(path + ".name", "'" + name + "' is not a valid identifier");
  try {
    return NamedInstance{name, PlanningInstance(domain, parse_names(value, path, "objects"),
                                                parse_atoms(value, path, "init"), parse_atoms(value, path, "goal"))};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Syntax) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

json atom_json(const Atom& atom) {
  json out = json::array({atom.predicate});
  for (const auto& arg : atom.args) out.push_back(arg);
  return out;
}

json atoms_json(const AtomSet& atoms) {
  json out = json::array();
  for (const auto& atom : atoms) out.push_back(atom_json(atom));
  return out;
}

}  // namespace

Document parse_document(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending token
    auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string message = e.what();
    if (auto pos = message.find(": syntax error"); pos != std::string::npos) message = message.substr(pos + 2);
    throw SyntaxError(message, line, column);
  }
  if (!root.is_object()) shape_error("document", "expected a top-level object");
  allow_keys(root, "document", {"domain", "instance", "instances"});

  Document doc;
  doc.domain = parse_domain(field(root, "document", "domain"));
  if (root.contains("instance") == root.contains("instances")) {
    shape_error("document", "expected exactly one of 'instance' or 'instances'");
  }
  if (root.contains("instance")) {
    doc.instances.push_back(parse_instance(root["instance"], "instance", doc.domain, "main"));
  } else {
    const json& list = as_array(root["instances"], "instances");
    if (list.empty()) shape_error("instances", "expected at least one instance");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "instances[" + std::to_string(i) + "]";
      auto named = parse_instance(list[i], path, doc.domain, "instance" + std::to_string(i));
      for (const auto& other : doc.instances) {
        if (other.name == named.name) shape_error(path, "duplicate instance name '" + named.name + "'");
      }
      doc.instances.push_back(std::move(named));
    }
  }
  return doc;
}

std::string serialize_document(const Document& document) {
  json domain = json::object();
  domain["predicates"] = json::array();
  for (const auto& p : document.domain->predicates()) {
    domain["predicates"].push_back({{"name", p.name}, {"arity", p.arity}});
  }
  domain["schemata"] = json::array();
  for (const auto& a : document.domain->schemata()) {
    domain["schemata"].push_back({{"name", a.name},
                                  {"params", a.params},
                                  {"pre", atoms_json(a.preconditions)},
                                  {"add", atoms_json(a.add_effects)},
                                  {"del", atoms_json(a.delete_effects)}});
  }

  json instances = json::array();
  for (const auto& [name, inst] : document.instances) {
    instances.push_back({{"name", name},
                         {"objects", inst.objects()},
                         {"init", atoms_json(inst.init())},
                         {"goal", atoms_json(inst.goal())}});
  }

  json root = json::object();
  root["domain"] = std::move(domain);
  if (instances.size() == 1) {
    root["instance"] = std::move(instances[0]);
  } else {
    root["instances"] = std::move(instances);
  }
  return root.dump(2) + "\n";
}

}  // namespace c2lab

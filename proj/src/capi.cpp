#include "c2lab/c2lab.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "c2lab/c2.hpp"
#include "c2lab/encode.hpp"
#include "c2lab/error.hpp"
#include "c2lab/model.hpp"
#include "c2lab/nnet.hpp"
#include "c2lab/refine.hpp"
#include "json.hpp"

struct c2lab_document {
  c2lab::Document doc;
};

namespace {

using nlohmann::json;

thread_local std::string last_error;

c2lab_status status_of(c2lab::ErrorKind kind) {
  using c2lab::ErrorKind;
  switch (kind) {
    case ErrorKind::Syntax: return C2LAB_ERROR_SYNTAX;
    case ErrorKind::UnknownPredicate: return C2LAB_ERROR_UNKNOWN_PREDICATE;
    case ErrorKind::ArityMismatch: return C2LAB_ERROR_ARITY_MISMATCH;
    case ErrorKind::UnknownObject: return C2LAB_ERROR_UNKNOWN_OBJECT;
    case ErrorKind::InvalidInput: return C2LAB_ERROR_INVALID_INPUT;
    case ErrorKind::UnsupportedArity: return C2LAB_ERROR_UNSUPPORTED_ARITY;
    case ErrorKind::TwoVariableViolation: return C2LAB_ERROR_TWO_VARIABLE;
    case ErrorKind::UnboundVariable: return C2LAB_ERROR_UNBOUND_VARIABLE;
    case ErrorKind::MixedInputs: return C2LAB_ERROR_MIXED_INPUTS;
    case ErrorKind::NotFound: return C2LAB_ERROR_NOT_FOUND;
    case ErrorKind::ResourceCap: return C2LAB_ERROR_RESOURCE_CAP;
    case ErrorKind::Divergence: return C2LAB_ERROR_DIVERGENCE;
    case ErrorKind::ShapeMismatch: return C2LAB_ERROR_SHAPE_MISMATCH;
  }
  return C2LAB_ERROR_INTERNAL;
}

struct NullArgument {
  const char* name;
};

template <typename F>
c2lab_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return C2LAB_OK;
  } catch (const NullArgument& e) {
    last_error = std::string("argument '") + e.name + "' must not be null";
    return C2LAB_ERROR_NULL_ARGUMENT;
  } catch (const c2lab::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return C2LAB_ERROR_OUT_OF_MEMORY;
  } catch (const std::exception& e) {
    last_error = e.what();
    return C2LAB_ERROR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return C2LAB_ERROR_INTERNAL;
  }
}

template <typename T>
T* require(T* p, const char* name) {
  if (!p) throw NullArgument{name};
  return p;
}

char* copy_out(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

const c2lab::PlanningInstance& pick(const c2lab_document* document, const char* instance) {
  require(document, "document");
  if (instance) return document->doc.instance(instance);
  if (document->doc.instances.size() != 1) {
    throw c2lab::Error(c2lab::ErrorKind::InvalidInput,
                       "document holds " + std::to_string(document->doc.instances.size()) +
                           " instances; name one");
  }
  return document->doc.instances.front().instance;
}

c2lab::RelationalStructure structure_for(const c2lab::PlanningInstance& inst, c2lab_encoding encoding) {
  const c2lab::State s = inst.initial_state();
  switch (encoding) {
    case C2LAB_ENCODING_DEFAULT:
    case C2LAB_ENCODING_EQ1: return c2lab::state_structure(inst, s);
    case C2LAB_ENCODING_PLOI: return c2lab::ploi_structure(inst, s);
    case C2LAB_ENCODING_LABELED_GRAPH: break;
  }
  throw c2lab::Error(c2lab::ErrorKind::MixedInputs, "this operation needs a relational structure, not a labeled graph");
}

c2lab::RefinementInput refinement_input(const c2lab_input* in, c2lab::Regime regime) {
  require(in, "input");
  const auto& inst = pick(in->document, in->instance);
  c2lab_encoding enc = in->encoding;
  if (enc == C2LAB_ENCODING_DEFAULT) {
    enc = regime == c2lab::Regime::PloiSparse ? C2LAB_ENCODING_LABELED_GRAPH : C2LAB_ENCODING_EQ1;
  }
  if (enc == C2LAB_ENCODING_LABELED_GRAPH) {
    return c2lab::to_labeled_graph(c2lab::ploi_structure(inst, inst.initial_state()));
  }
  return structure_for(inst, enc);
}

c2lab::RelationalStructure network_input(const c2lab_input* in) {
  require(in, "input");
  return structure_for(pick(in->document, in->instance), in->encoding);
}

c2lab::HyperParams hyper_of(const c2lab_net_shape& shape) {
  c2lab::HyperParams h;
  h.embedding = shape.embedding;
  h.layers = shape.layers;
  h.hidden = shape.hidden;
  h.residual = shape.residual != 0;
  h.validate();
  return h;
}

json optional_round(const std::optional<std::size_t>& r) {
  return r ? json(*r) : json(nullptr);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Non-finite values have no JSON spelling.
json number(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

extern "C" {

const char* c2lab_version(void) { return "0.1.0"; }

const char* c2lab_status_name(c2lab_status status) {
  switch (status) {
    case C2LAB_OK: return "ok";
    case C2LAB_ERROR_SYNTAX: return "syntax";
    case C2LAB_ERROR_UNKNOWN_PREDICATE: return "unknown-predicate";
    case C2LAB_ERROR_ARITY_MISMATCH: return "arity-mismatch";
    case C2LAB_ERROR_UNKNOWN_OBJECT: return "unknown-object";
    case C2LAB_ERROR_INVALID_INPUT: return "invalid-input";
    case C2LAB_ERROR_UNSUPPORTED_ARITY: return "unsupported-arity";
    case C2LAB_ERROR_TWO_VARIABLE: return "two-variable-violation";
    case C2LAB_ERROR_UNBOUND_VARIABLE: return "unbound-variable";
    case C2LAB_ERROR_MIXED_INPUTS: return "mixed-inputs";
    case C2LAB_ERROR_NOT_FOUND: return "not-found";
    case C2LAB_ERROR_RESOURCE_CAP: return "resource-cap";
    case C2LAB_ERROR_DIVERGENCE: return "divergence";
    case C2LAB_ERROR_SHAPE_MISMATCH: return "shape-mismatch";
    case C2LAB_ERROR_NULL_ARGUMENT: return "null-argument";
    case C2LAB_ERROR_OUT_OF_MEMORY: return "out-of-memory";
    case C2LAB_ERROR_INTERNAL: return "internal";
  }
  return "unknown-status";
}

const char* c2lab_last_error(void) { return last_error.c_str(); }

void c2lab_string_free(char* text) { std::free(text); }

c2lab_status c2lab_document_parse(const char* text, c2lab_document** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = nullptr;
    *out = new c2lab_document{c2lab::parse_document(text)};
  });
}

c2lab_status c2lab_document_builtin(const char* name, c2lab_document** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = nullptr;
    *out = new c2lab_document{c2lab::builtin_document(name)};
  });
}

void c2lab_document_free(c2lab_document* document) { delete document; }

c2lab_status c2lab_document_instance_count(const c2lab_document* document, size_t* out) {
  return guarded([&] {
    require(document, "document");
    *require(out, "out") = document->doc.instances.size();
  });
}

c2lab_status c2lab_document_instance_name(const c2lab_document* document, size_t index, const char** out) {
  return guarded([&] {
    require(document, "document");
    require(out, "out");
    if (index >= document->doc.instances.size()) {
      throw c2lab::Error(c2lab::ErrorKind::NotFound, "instance index " + std::to_string(index) + " out of range");
    }
    *out = document->doc.instances[index].name.c_str();
  });
}

c2lab_status c2lab_document_serialize(const c2lab_document* document, char** out) {
  return guarded([&] {
    require(document, "document");
    *require(out, "out") = copy_out(c2lab::serialize_document(document->doc));
  });
}

c2lab_status c2lab_encode(const c2lab_document* document, const char* instance, c2lab_encoding encoding,
                          char** dump) {
  return guarded([&] {
    require(dump, "dump");
    const auto& inst = pick(document, instance);
    std::string text;
    if (encoding == C2LAB_ENCODING_LABELED_GRAPH) {
      text = c2lab::dump_graph(c2lab::to_labeled_graph(c2lab::ploi_structure(inst, inst.initial_state())));
    } else {
      text = c2lab::dump_structure(structure_for(inst, encoding));
    }
    *dump = copy_out(text);
  });
}

c2lab_status c2lab_is_goal_state(const c2lab_document* document, const char* instance, int* out) {
  return guarded([&] {
    require(out, "out");
    const auto& inst = pick(document, instance);
    *out = c2lab::is_goal_state(inst.initial_state(), inst) ? 1 : 0;
  });
}

c2lab_status c2lab_plan_length(const c2lab_document* document, const char* instance, size_t bound,
                               uint64_t action_cap, int64_t* length) {
  return guarded([&] {
    require(length, "length");
    const auto r = c2lab::optimal_plan_length(pick(document, instance), bound, action_cap);
    *length = r ? static_cast<int64_t>(*r) : -1;
  });
}

c2lab_status c2lab_eval(const c2lab_document* document, const char* instance, const char* formula, int* out) {
  return guarded([&] {
    require(out, "out");
    const auto& inst = pick(document, instance);
    const auto structure = c2lab::state_structure(inst, inst.initial_state());
    const c2lab::Formula f = formula ? c2lab::parse_formula(formula, structure.language())
                                     : c2lab::goal_not_achieved_formula(structure.language());
    if (!f.free_variables().empty()) {
      throw c2lab::Error(c2lab::ErrorKind::UnboundVariable,
                         "formula has free variable '" + f.free_variables().front() + "'; only sentences can be evaluated");
    }
    *out = c2lab::evaluate_cached(f, structure) ? 1 : 0;
  });
}

c2lab_status c2lab_distinguish(const c2lab_input* a, const c2lab_input* b, const char* regime,
                               size_t max_rounds, char** report) {
  return guarded([&] {
    require(regime, "regime");
    require(report, "report");
    const c2lab::Regime r = c2lab::parse_regime(regime);
    const auto v = c2lab::distinguishable(refinement_input(a, r), refinement_input(b, r), r, max_rounds);
    json j{{"regime", c2lab::to_string(v.regime)},
           {"distinguishable", v.distinguishable},
           {"separating_round", optional_round(v.separating_round)},
           {"stable_round", optional_round(v.stable_round)},
           {"class_counts_a", v.class_counts_a},
           {"class_counts_b", v.class_counts_b}};
    *report = copy_out(j.dump());
  });
}

void c2lab_random_config_init(c2lab_random_config* config) {
  if (!config) return;
  const c2lab::RandomTestConfig d;
  *config = c2lab_random_config{d.trials, d.epsilon,
                                {d.hyper.embedding, d.hyper.layers, d.hyper.hidden, d.hyper.residual ? 1 : 0},
                                d.master_seed, d.threads};
}

c2lab_status c2lab_random_test(const c2lab_input* a, const c2lab_input* b, const c2lab_random_config* config,
                               char** trials_csv, char** summary) {
  return guarded([&] {
    require(config, "config");
    c2lab::RandomTestConfig cfg;
    cfg.trials = config->trials;
    cfg.epsilon = config->epsilon;
    cfg.hyper = hyper_of(config->shape);
    cfg.master_seed = config->seed;
    cfg.threads = config->threads;
    const auto result = c2lab::random_init_test(network_input(a), network_input(b), cfg);

    std::string csv;
    if (trials_csv) {
      csv.reserve(result.trials.size() * 96);
      csv += "trial_id,seed,out1,out2,rel_diff\n";
      for (const auto& t : result.trials) {
        csv += std::to_string(t.trial_id) + ',' + std::to_string(t.seed) + ',' + fmt17(t.out1) + ',' +
               fmt17(t.out2) + ',' + fmt17(t.rel_diff) + '\n';
      }
    }
    std::string sum;
    if (summary) {
      json j{{"trials", result.trials.size()},
             {"seed", cfg.master_seed},
             {"epsilon", result.epsilon},
             {"max_rel_diff", result.max_rel_diff},
             {"verdict", result.likely_indistinguishable ? "likely-indistinguishable" : "distinguishable"}};
      sum = j.dump();
    }
    char* csv_out = trials_csv ? copy_out(csv) : nullptr;
    if (summary) {
      try {
        *summary = copy_out(sum);
      } catch (...) {
        std::free(csv_out);
        throw;
      }
    }
    if (trials_csv) *trials_csv = csv_out;
  });
}

void c2lab_train_config_init(c2lab_train_config* config) {
  if (!config) return;
  const c2lab::TrainConfig d;
  *config = c2lab_train_config{d.steps, d.learning_rate,
                               {d.hyper.embedding, d.hyper.layers, d.hyper.hidden, d.hyper.residual ? 1 : 0},
                               d.seed, d.slack};
}

c2lab_status c2lab_train_test(const c2lab_example* examples, size_t count, const c2lab_train_config* config,
                              char** curve_csv, char** summary) {
  return guarded([&] {
    require(config, "config");
    if (count) require(examples, "examples");
    std::vector<c2lab::TrainingExample> dataset;
    for (size_t i = 0; i < count; ++i) dataset.push_back({network_input(&examples[i].input), examples[i].target});
    c2lab::TrainConfig cfg;
    cfg.steps = config->steps;
    cfg.learning_rate = config->learning_rate;
    cfg.hyper = hyper_of(config->shape);
    cfg.seed = config->seed;
    cfg.slack = config->slack;
    const auto curve = c2lab::training_test(dataset, cfg);

    std::string csv;
    if (curve_csv) {
      csv = "step,loss\n";
      for (std::size_t s = 0; s < curve.losses.size(); ++s) csv += std::to_string(s) + ',' + fmt17(curve.losses[s]) + '\n';
    }
    std::string sum;
    if (summary) {
      json j{{"steps", curve.steps},
             {"learning_rate", cfg.learning_rate},
             {"seed", cfg.seed},
             {"floor", curve.floor},
             {"slack", cfg.slack},
             {"min_loss", curve.min_loss},
             {"final_loss", curve.losses.back()},
             {"verdict", curve.floor_reached ? "floor-reached" : "learned"}};
      sum = j.dump();
    }
    char* csv_out = curve_csv ? copy_out(csv) : nullptr;
    if (summary) {
      try {
        *summary = copy_out(sum);
      } catch (...) {
        std::free(csv_out);
        throw;
      }
    }
    if (curve_csv) *curve_csv = csv_out;
  });
}

c2lab_status c2lab_grad_check(const c2lab_example* example, const c2lab_net_shape* shape, uint64_t seed,
                              double tolerance, char** report) {
  return guarded([&] {
    require(example, "example");
    require(shape, "shape");
    require(report, "report");
    const auto structure = network_input(&example->input);
    const auto params = c2lab::init_params(hyper_of(*shape), structure.language(), seed);
    c2lab::GradCheckConfig cfg;
    cfg.tolerance = tolerance;
    cfg.sample_seed = seed;
    const auto r = c2lab::grad_check(params, structure, example->target, cfg);
    json j{{"checked", r.checked},
           {"parameters", params.values.size()},
           {"tolerance", tolerance},
           {"max_rel_error", number(r.max_rel_error)},
           {"worst_index", r.worst_index},
           {"worst_analytic", number(r.worst_analytic)},
           {"worst_numeric", number(r.worst_numeric)},
           {"passed", r.passed}};
    *report = copy_out(j.dump());
  });
}

}  // extern "C"

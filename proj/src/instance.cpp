// Copyright 2026 The hyperqcqp Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include "hyperqcqp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "hyperqcqp/error.hpp"
#include "json.hpp"

namespace hyperqcqp {

using ordered_json = nlohmann::ordered_json;

double TermList::value(const std::vector<double>& x) const noexcept {
    double total = 0.0;
    for (const auto& t : linear) total += t.coef * x[t.var];
    for (const auto& t : quadratic) total += t.coef * x[t.i] * x[t.j];
    return total;
}

TermList TermList::scaled(double factor) const {
    TermList out = *this;
    for (auto& t : out.linear) t.coef *= factor;
    for (auto& t : out.quadratic) t.coef *= factor;
    return out;
}

bool QcqpInstance::is_normalized() const noexcept {
    return std::all_of(constraints.begin(), constraints.end(),
                       [](const Constraint& c) { return c.sense == ConstraintSense::le; });
}

bool QcqpInstance::all_binary() const noexcept {
    return std::all_of(vars.begin(), vars.end(),
                       [](const VarInfo& v) { return v.type == VarType::binary; });
}

int EvalReport::violated_count() const noexcept {
    return static_cast<int>(std::count_if(violations.begin(), violations.end(),
                                          [](double v) { return v > kFeasibilityTol; }));
}

namespace {

void validate_terms(const TermList& terms, int n, const std::string& path) {
    std::set<int> seen_linear;
    for (std::size_t k = 0; k < terms.linear.size(); ++k) {
        const auto& t = terms.linear[k];
        const std::string here = path + ".linear[" + std::to_string(k) + "]";
        if (t.var < 0 || t.var >= n) throw SchemaError(here, "variable index out of range");
        if (!std::isfinite(t.coef) || t.coef == 0.0)
            throw SchemaError(here, "coefficient must be finite and nonzero");
        if (!seen_linear.insert(t.var).second) throw SchemaError(here, "duplicate linear term");
    }
    std::set<std::pair<int, int>> seen_quad;
    for (std::size_t k = 0; k < terms.quadratic.size(); ++k) {
        const auto& t = terms.quadratic[k];
        const std::string here = path + ".quadratic[" + std::to_string(k) + "]";
        if (t.i < 0 || t.i >= n || t.j < 0 || t.j >= n)
            throw SchemaError(here, "variable index out of range");
        if (t.i > t.j) throw SchemaError(here, "quadratic entry requires i <= j");
        if (!std::isfinite(t.coef) || t.coef == 0.0)
            throw SchemaError(here, "coefficient must be finite and nonzero");
        if (!seen_quad.insert({t.i, t.j}).second)
            throw SchemaError(here, "duplicate quadratic term");
    }
}

}  // namespace

void validate(const QcqpInstance& instance) {
    const int n = instance.num_vars();
    for (int i = 0; i < n; ++i) {
        const auto& v = instance.vars[i];
        const std::string here = "vars[" + std::to_string(i) + "]";
        if (std::isnan(v.lb) || std::isnan(v.ub)) throw SchemaError(here, "bounds must not be NaN");
        if (v.lb > v.ub) throw SchemaError(here, "lb > ub");
        if (v.type == VarType::binary && (v.lb != 0.0 || v.ub != 1.0))
            throw SchemaError(here, "binary variable must have bounds [0, 1]");
    }
    validate_terms(instance.objective, n, "objective");
    for (int j = 0; j < instance.num_constraints(); ++j) {
        const auto& c = instance.constraints[j];
        const std::string here = "constraints[" + std::to_string(j) + "]";
        if (c.terms.empty()) throw SchemaError(here, "empty constraint");
        if (!std::isfinite(c.rhs)) throw SchemaError(here + ".rhs", "rhs must be finite");
        validate_terms(c.terms, n, here);
    }
}

namespace {

const ordered_json& require(const ordered_json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path, std::string("missing key '") + key + "'");
    return *it;
}

double as_number(const ordered_json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path, "expected a number");
    return v.get<double>();
}

double as_bound(const ordered_json& v, const std::string& path) {
    // infinite bounds travel as the strings "inf" / "-inf"
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return HUGE_VAL;
        if (s == "-inf") return -HUGE_VAL;
        throw SchemaError(path, "expected a number or \"inf\"/\"-inf\"");
    }
    return as_number(v, path);
}

int as_index(const ordered_json& v, const std::string& path) {
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer index");
    const auto i = v.get<std::int64_t>();
    if (i < 0 || i > std::numeric_limits<int>::max())
        throw SchemaError(path, "index out of range");
    return static_cast<int>(i);
}

TermList parse_terms(const ordered_json& obj, const std::string& path) {
    TermList terms;
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    if (auto it = obj.find("linear"); it != obj.end()) {
        if (!it->is_array()) throw SchemaError(path + ".linear", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string here = path + ".linear[" + std::to_string(k) + "]";
            const auto& e = (*it)[k];
            if (!e.is_array() || e.size() != 2) throw SchemaError(here, "expected [idx, coef]");
            terms.linear.push_back({as_index(e[0], here + "[0]"), as_number(e[1], here + "[1]")});
        }
    }
    if (auto it = obj.find("quadratic"); it != obj.end()) {
        if (!it->is_array()) throw SchemaError(path + ".quadratic", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string here = path + ".quadratic[" + std::to_string(k) + "]";
            const auto& e = (*it)[k];
            if (!e.is_array() || e.size() != 3) throw SchemaError(here, "expected [i, j, coef]");
            terms.quadratic.push_back({as_index(e[0], here + "[0]"), as_index(e[1], here + "[1]"),
                                       as_number(e[2], here + "[2]")});
        }
    }
    return terms;
}

ordered_json dump_bound(double b) {
    if (std::isinf(b)) return b > 0 ? "inf" : "-inf";
    return b;
}

ordered_json dump_terms_into(ordered_json obj, const TermList& terms) {
    ordered_json lin = ordered_json::array();
    for (const auto& t : terms.linear) lin.push_back(ordered_json::array({t.var, t.coef}));
    ordered_json quad = ordered_json::array();
    for (const auto& t : terms.quadratic) quad.push_back(ordered_json::array({t.i, t.j, t.coef}));
    obj["linear"] = std::move(lin);
    obj["quadratic"] = std::move(quad);
    return obj;
}

const char* type_name(VarType t) {
    switch (t) {
        case VarType::binary: return "binary";
        case VarType::integer: return "integer";
        case VarType::continuous: return "continuous";
    }
    return "binary";
}

const char* sense_name(ConstraintSense s) {
    switch (s) {
        case ConstraintSense::le: return "le";
        case ConstraintSense::ge: return "ge";
        case ConstraintSense::eq: return "eq";
    }
    return "le";
}

}  // namespace

QcqpInstance load_instance(std::string_view json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("", std::string("malformed JSON: ") + e.what());
    }

    QcqpInstance inst;
    const auto& name = require(doc, "name", "");
    if (!name.is_string()) throw SchemaError("name", "expected a string");
    inst.name = name.get<std::string>();

    const auto& sense = require(doc, "sense", "");
    if (sense == "min") {
        inst.sense = ObjectiveSense::minimize;
    } else if (sense == "max") {
        inst.sense = ObjectiveSense::maximize;
    } else {
        throw SchemaError("sense", "expected \"min\" or \"max\"");
    }

    const auto& vars = require(doc, "vars", "");
    if (!vars.is_array()) throw SchemaError("vars", "expected an array");
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const std::string here = "vars[" + std::to_string(i) + "]";
        const auto& v = vars[i];
        VarInfo info;
        const auto& vname = require(v, "name", here);
        if (!vname.is_string()) throw SchemaError(here + ".name", "expected a string");
        info.name = vname.get<std::string>();
        info.lb = as_bound(require(v, "lb", here), here + ".lb");
        info.ub = as_bound(require(v, "ub", here), here + ".ub");
        const auto& type = require(v, "type", here);
        if (type == "binary") {
            info.type = VarType::binary;
        } else if (type == "integer") {
            info.type = VarType::integer;
        } else if (type == "continuous") {
            info.type = VarType::continuous;
        } else {
            throw SchemaError(here + ".type", "expected binary|integer|continuous");
        }
        inst.vars.push_back(std::move(info));
    }

    inst.objective = parse_terms(require(doc, "objective", ""), "objective");

    const auto& cons = require(doc, "constraints", "");
    if (!cons.is_array()) throw SchemaError("constraints", "expected an array");
    for (std::size_t j = 0; j < cons.size(); ++j) {
        const std::string here = "constraints[" + std::to_string(j) + "]";
        Constraint c;
        c.terms = parse_terms(cons[j], here);
        const auto& s = require(cons[j], "sense", here);
        if (s == "le") {
            c.sense = ConstraintSense::le;
        } else if (s == "ge") {
            c.sense = ConstraintSense::ge;
        } else if (s == "eq") {
            c.sense = ConstraintSense::eq;
        } else {
            throw SchemaError(here + ".sense", "expected le|ge|eq");
        }
        c.rhs = as_number(require(cons[j], "rhs", here), here + ".rhs");
        inst.constraints.push_back(std::move(c));
    }

    if (auto it = doc.find("seed"); it != doc.end()) {
        if (!it->is_number_unsigned()) throw SchemaError("seed", "expected an unsigned integer");
        inst.seed_provenance = it->get<std::uint64_t>();
    }

    validate(inst);
    return inst;
}

QcqpInstance load_instance_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open instance file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_instance(ss.str());
}

std::string save_instance(const QcqpInstance& instance) {
    ordered_json doc;
    doc["name"] = instance.name;
    doc["sense"] = instance.sense == ObjectiveSense::maximize ? "max" : "min";
    ordered_json vars = ordered_json::array();
    for (const auto& v : instance.vars) {
        ordered_json jv;
        jv["name"] = v.name;
        jv["lb"] = dump_bound(v.lb);
        jv["ub"] = dump_bound(v.ub);
        jv["type"] = type_name(v.type);
        vars.push_back(std::move(jv));
    }
    doc["vars"] = std::move(vars);
    doc["objective"] = dump_terms_into(ordered_json::object(), instance.objective);
    ordered_json cons = ordered_json::array();
    for (const auto& c : instance.constraints) {
        ordered_json jc = dump_terms_into(ordered_json::object(), c.terms);
        jc["sense"] = sense_name(c.sense);
        jc["rhs"] = c.rhs;
        cons.push_back(std::move(jc));
    }
    doc["constraints"] = std::move(cons);
    if (instance.seed_provenance) doc["seed"] = *instance.seed_provenance;
    return doc.dump() + "\n";
}

void save_instance_file(const QcqpInstance& instance, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write instance file " + path.string());
    out << save_instance(instance);
}

QcqpInstance normalize(const QcqpInstance& instance) {
    QcqpInstance out = instance;
    out.constraints.clear();
    out.constraints.reserve(instance.constraints.size());
    for (const auto& c : instance.constraints) {
        switch (c.sense) {
            case ConstraintSense::le:
                out.constraints.push_back(c);
                break;
            case ConstraintSense::ge:
                out.constraints.push_back({c.terms.scaled(-1.0), ConstraintSense::le, -c.rhs});
                break;
            case ConstraintSense::eq:
                out.constraints.push_back({c.terms, ConstraintSense::le, c.rhs});
                out.constraints.push_back({c.terms.scaled(-1.0), ConstraintSense::le, -c.rhs});
                break;
        }
    }
    return out;
}

double activity(const Constraint& constraint, const Assignment& x) noexcept {
    return constraint.terms.value(x);
}

EvalReport evaluate(const QcqpInstance& instance, const Assignment& x, double tol) {
    if (static_cast<int>(x.size()) != instance.num_vars())
        throw InvalidArgument("assignment length " + std::to_string(x.size()) +
                              " does not match variable count " +
                              std::to_string(instance.num_vars()));
    EvalReport r;
    r.objective = instance.objective.value(x);
    r.activities.reserve(instance.constraints.size());
    r.violations.reserve(instance.constraints.size());
    for (const auto& c : instance.constraints) {
        const double a = activity(c, x);
        double v = 0.0;
        switch (c.sense) {
            case ConstraintSense::le: v = std::max(a - c.rhs, 0.0); break;
            case ConstraintSense::ge: v = std::max(c.rhs - a, 0.0); break;
            case ConstraintSense::eq: v = std::abs(a - c.rhs); break;
        }
        r.activities.push_back(a);
        r.violations.push_back(v);
        r.max_violation = std::max(r.max_violation, v);
    }
    for (int i = 0; i < instance.num_vars(); ++i) {
        const auto& var = instance.vars[i];
        r.bound_violation = std::max({r.bound_violation, var.lb - x[i], x[i] - var.ub});
        if (var.type != VarType::continuous)
            r.integrality_violation =
                    std::max(r.integrality_violation, std::abs(x[i] - std::round(x[i])));
    }
    r.feasible = r.max_violation <= tol && r.bound_violation <= tol &&
                 r.integrality_violation <= kIntegralityTol;
    return r;
}

}  // namespace hyperqcqp

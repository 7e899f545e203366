#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "accltl/error.hpp"
#include "accltl/value.hpp"

namespace accltl {

// Positions are 1-based throughout.
struct Relation {
    std::string name;
    std::vector<DomainKind> positions;

    size_t arity() const { return positions.size(); }
};

struct AccessMethod {
    std::string name;
    std::string relation;
    std::set<size_t> inputs; // subset of {1..arity(relation)}
    bool exact = false;
    bool idempotent = false;
};

// A schema: relations, access methods over them, a constant set, and the
// optional schema-level groundedness requirement.
class Schema {
  public:
    Schema() = default;

    void add_relation(Relation r) {
        if (r.arity() == 0)
            throw Error(ErrorKind::Validation, "relation " + r.name + " must have arity >= 1");
        if (relations_.count(r.name))
            throw Error(ErrorKind::Validation, "duplicate relation " + r.name);
        relations_.emplace(r.name, std::move(r));
    }

    void add_method(AccessMethod m) {
        if (methods_.count(m.name))
            throw Error(ErrorKind::Validation, "duplicate access method " + m.name);
        const Relation& rel = relation(m.relation);
        for (size_t p : m.inputs)
            if (p < 1 || p > rel.arity())
                throw Error(ErrorKind::Schema, "access " + m.name + ": input position " +
                                                   std::to_string(p) + " out of range for " +
                                                   rel.name);
        methods_.emplace(m.name, std::move(m));
    }

    void add_constant(const Value& v) {
        bool typed = false;
        for (const auto& [_, rel] : relations_)
            for (const DomainKind& d : rel.positions)
                if (d.admits(v)) typed = true;
        if (!typed)
            throw Error(ErrorKind::Type,
                        "constant " + v.to_string() + " fits no position domain of the schema");
        constants_.insert(v);
    }

    void set_require_grounded(bool b) { require_grounded_ = b; }
    bool require_grounded() const { return require_grounded_; }

    bool has_relation(const std::string& name) const { return relations_.count(name) != 0; }
    bool has_method(const std::string& name) const { return methods_.count(name) != 0; }

    const Relation& relation(const std::string& name) const {
        auto it = relations_.find(name);
        if (it == relations_.end()) throw Error(ErrorKind::Schema, "unknown relation " + name);
        return it->second;
    }
    const AccessMethod& method(const std::string& name) const {
        auto it = methods_.find(name);
        if (it == methods_.end()) throw Error(ErrorKind::Schema, "unknown access method " + name);
        return it->second;
    }
    const Relation& relation_of_method(const std::string& method_name) const {
        return relation(method(method_name).relation);
    }

    const std::map<std::string, Relation>& relations() const { return relations_; }
    const std::map<std::string, AccessMethod>& methods() const { return methods_; }
    const std::set<Value>& constants() const { return constants_; }

    std::vector<std::string> method_names() const {
        std::vector<std::string> out;
        for (const auto& [name, _] : methods_) out.push_back(name);
        return out;
    }

    // A boolean access method takes every position as input.
    bool is_boolean_method(const std::string& name) const {
        const AccessMethod& m = method(name);
        return m.inputs.size() == relation(m.relation).arity();
    }

  private:
    std::map<std::string, Relation> relations_;
    std::map<std::string, AccessMethod> methods_;
    std::set<Value> constants_;
    bool require_grounded_ = false;
};

} // namespace accltl

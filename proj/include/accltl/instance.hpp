#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "accltl/schema.hpp"
#include "accltl/value.hpp"

namespace accltl {

using Tuple = std::vector<Value>;

inline std::string tuple_to_string(const Tuple& t) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i].to_string();
    os << ")";
    return os.str();
}

inline bool tuple_well_typed(const Relation& rel, const Tuple& t) {
    if (t.size() != rel.arity()) return false;
    for (size_t i = 0; i < t.size(); ++i)
        if (!rel.positions[i].admits(t[i])) return false;
    return true;
}

// A finite relational instance: relation name -> set of tuples. Relations
// absent from the map are empty.
class Instance {
  public:
    Instance() = default;

    void add(const std::string& relation, Tuple t) { contents_[relation].insert(std::move(t)); }

    bool contains(const std::string& relation, const Tuple& t) const {
        auto it = contents_.find(relation);
        return it != contents_.end() && it->second.count(t) != 0;
    }

    const std::set<Tuple>& tuples(const std::string& relation) const {
        static const std::set<Tuple> kEmpty;
        auto it = contents_.find(relation);
        return it == contents_.end() ? kEmpty : it->second;
    }

    const std::map<std::string, std::set<Tuple>>& contents() const { return contents_; }

    size_t total_size() const {
        size_t n = 0;
        for (const auto& [_, ts] : contents_) n += ts.size();
        return n;
    }

    bool empty() const { return total_size() == 0; }

    // Pointwise containment.
    bool subset_of(const Instance& other) const {
        for (const auto& [rel, ts] : contents_)
            for (const Tuple& t : ts)
                if (!other.contains(rel, t)) return false;
        return true;
    }

    Instance union_with(const Instance& other) const {
        Instance out = *this;
        for (const auto& [rel, ts] : other.contents_)
            for (const Tuple& t : ts) out.add(rel, t);
        return out;
    }

    std::set<Value> active_values() const {
        std::set<Value> out;
        for (const auto& [_, ts] : contents_)
            for (const Tuple& t : ts) out.insert(t.begin(), t.end());
        return out;
    }

    void check_typed(const Schema& schema) const {
        for (const auto& [rel, ts] : contents_) {
            const Relation& r = schema.relation(rel);
            for (const Tuple& t : ts)
                if (!tuple_well_typed(r, t))
                    throw Error(ErrorKind::Type,
                                "tuple " + tuple_to_string(t) + " is not well-typed for " + rel);
        }
    }

    friend bool operator==(const Instance& a, const Instance& b) {
        // Normalize away empty entries.
        auto norm = [](const Instance& x) {
            std::map<std::string, std::set<Tuple>> m;
            for (const auto& [rel, ts] : x.contents_)
                if (!ts.empty()) m.emplace(rel, ts);
            return m;
        };
        return norm(a) == norm(b);
    }
    friend bool operator!=(const Instance& a, const Instance& b) { return !(a == b); }
    friend bool operator<(const Instance& a, const Instance& b) {
        return a.contents_ < b.contents_;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << "{";
        bool first = true;
        for (const auto& [rel, ts] : contents_) {
            if (ts.empty()) continue;
            if (!first) os << "; ";
            first = false;
            os << rel << ": ";
            bool ft = true;
            for (const Tuple& t : ts) {
                if (!ft) os << ", ";
                ft = false;
                os << tuple_to_string(t);
            }
        }
        os << "}";
        return os.str();
    }

  private:
    std::map<std::string, std::set<Tuple>> contents_;
};

} // namespace accltl

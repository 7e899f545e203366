#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "accltl/error.hpp"

namespace accltl {

// A literal value. Enum literals are bare identifiers and live in their own
// kind so that they never collide with quoted strings.
class Value {
  public:
    enum class Kind : uint8_t { Int, Bool, Str, Sym };

    Value() : kind_(Kind::Bool), int_(0) {}

    static Value integer(int64_t v) {
        Value x;
        x.kind_ = Kind::Int;
        x.int_ = v;
        return x;
    }
    static Value boolean(bool v) {
        Value x;
        x.kind_ = Kind::Bool;
        x.int_ = v ? 1 : 0;
        return x;
    }
    static Value str(std::string v) {
        Value x;
        x.kind_ = Kind::Str;
        x.str_ = std::move(v);
        return x;
    }
    static Value sym(std::string v) {
        Value x;
        x.kind_ = Kind::Sym;
        x.str_ = std::move(v);
        return x;
    }

    Kind kind() const { return kind_; }
    int64_t as_int() const { return int_; }
    bool as_bool() const { return int_ != 0; }
    const std::string& as_string() const { return str_; }

    friend bool operator==(const Value& a, const Value& b) {
        return a.kind_ == b.kind_ && a.int_ == b.int_ && a.str_ == b.str_;
    }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
    friend bool operator<(const Value& a, const Value& b) {
        return std::tie(a.kind_, a.int_, a.str_) < std::tie(b.kind_, b.int_, b.str_);
    }

    // Literal syntax: integers plain, booleans true/false, strings quoted,
    // enum literals bare.
    std::string to_string() const {
        switch (kind_) {
        case Kind::Int:
            return std::to_string(int_);
        case Kind::Bool:
            return int_ ? "true" : "false";
        case Kind::Str: {
            std::string out = "\"";
            for (char c : str_) {
                if (c == '"' || c == '\\') out.push_back('\\');
                out.push_back(c);
            }
            out.push_back('"');
            return out;
        }
        case Kind::Sym:
            return str_;
        }
        return "?";
    }

    friend std::ostream& operator<<(std::ostream& os, const Value& v) {
        return os << v.to_string();
    }

  private:
    Kind kind_;
    int64_t int_ = 0;
    std::string str_;
};

// Position domain: integer, boolean, string, or a closed enum of literals.
class DomainKind {
  public:
    enum class Kind : uint8_t { Integer, Boolean, String, Enum };

    DomainKind() : kind_(Kind::String) {}
    explicit DomainKind(Kind k) : kind_(k) {}

    static DomainKind integer() { return DomainKind(Kind::Integer); }
    static DomainKind boolean() { return DomainKind(Kind::Boolean); }
    static DomainKind string() { return DomainKind(Kind::String); }
    static DomainKind enumeration(std::vector<std::string> literals) {
        DomainKind d(Kind::Enum);
        std::sort(literals.begin(), literals.end());
        literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
        if (literals.empty())
            throw Error(ErrorKind::Validation, "enum domain must list at least one literal");
        d.literals_ = std::move(literals);
        return d;
    }

    Kind kind() const { return kind_; }
    const std::vector<std::string>& literals() const { return literals_; }

    bool admits(const Value& v) const {
        switch (kind_) {
        case Kind::Integer:
            return v.kind() == Value::Kind::Int;
        case Kind::Boolean:
            return v.kind() == Value::Kind::Bool;
        case Kind::String:
            return v.kind() == Value::Kind::Str;
        case Kind::Enum:
            return v.kind() == Value::Kind::Sym &&
                   std::binary_search(literals_.begin(), literals_.end(), v.as_string());
        }
        return false;
    }

    friend bool operator==(const DomainKind& a, const DomainKind& b) {
        return a.kind_ == b.kind_ && a.literals_ == b.literals_;
    }
    friend bool operator!=(const DomainKind& a, const DomainKind& b) { return !(a == b); }

    std::string to_string() const {
        switch (kind_) {
        case Kind::Integer:
            return "int";
        case Kind::Boolean:
            return "bool";
        case Kind::String:
            return "string";
        case Kind::Enum: {
            std::ostringstream os;
            os << "enum{";
            for (size_t i = 0; i < literals_.size(); ++i)
                os << (i ? "," : "") << literals_[i];
            os << "}";
            return os.str();
        }
        }
        return "?";
    }

  private:
    Kind kind_;
    std::vector<std::string> literals_;
};

} // namespace accltl

#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "accltl/error.hpp"
#include "accltl/value.hpp"

namespace accltl {

// Minimal s-expression reader shared by the formula, query, and automaton
// formats. A `#` starts a comment only at line start or after whitespace, so
// names like Mobile# survive.
struct Sexp {
    enum class Kind : uint8_t { Sym, Str, Int, List };
    Kind kind = Kind::Sym;
    std::string text; // Sym/Str payload
    int64_t num = 0;  // Int payload
    std::vector<Sexp> kids;
    size_t line = 0, col = 0;

    bool is_sym(const char* s) const { return kind == Kind::Sym && text == s; }
    std::string where() const {
        return "line " + std::to_string(line) + ", col " + std::to_string(col);
    }
};

class SexpReader {
  public:
    explicit SexpReader(std::string text, std::string source = "<input>")
        : text_(std::move(text)), source_(std::move(source)) {}

    // Reads all top-level s-expressions.
    std::vector<Sexp> read_all() {
        std::vector<Sexp> out;
        skip_ws();
        while (!eof()) {
            out.push_back(read());
            skip_ws();
        }
        return out;
    }

    Sexp read() {
        skip_ws();
        if (eof()) throw err("unexpected end of input");
        size_t line = line_, col = col_;
        char c = peek();
        if (c == '(') {
            get();
            Sexp s;
            s.kind = Sexp::Kind::List;
            s.line = line;
            s.col = col;
            skip_ws();
            while (!eof() && peek() != ')') {
                s.kids.push_back(read());
                skip_ws();
            }
            if (eof()) throw err("missing ')'");
            get();
            return s;
        }
        if (c == ')') throw err("unexpected ')'");
        if (c == '"') return read_string(line, col);
        return read_token(line, col);
    }

  private:
    Sexp read_string(size_t line, size_t col) {
        get(); // opening quote
        Sexp s;
        s.kind = Sexp::Kind::Str;
        s.line = line;
        s.col = col;
        while (!eof() && peek() != '"') {
            char c = get();
            if (c == '\\' && !eof()) c = get();
            s.text.push_back(c);
        }
        if (eof()) throw err("unterminated string literal");
        get(); // closing quote
        return s;
    }

    Sexp read_token(size_t line, size_t col) {
        std::string tok;
        while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) && peek() != '(' &&
               peek() != ')' && peek() != '"')
            tok.push_back(get());
        Sexp s;
        s.line = line;
        s.col = col;
        bool numeric = !tok.empty();
        size_t start = (tok[0] == '-' && tok.size() > 1) ? 1 : 0;
        if (start == 1 && tok.size() == 1) numeric = false;
        for (size_t i = start; i < tok.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(tok[i]))) numeric = false;
        if (numeric) {
            s.kind = Sexp::Kind::Int;
            s.num = std::stoll(tok);
        } else {
            s.kind = Sexp::Kind::Sym;
            s.text = tok;
        }
        return s;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == '#' && at_comment_start_) {
                while (!eof() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char get() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
            at_comment_start_ = true;
        } else {
            ++col_;
            at_comment_start_ = std::isspace(static_cast<unsigned char>(c)) || c == '(';
        }
        return c;
    }

    Error err(const std::string& what) const {
        return Error::parse(source_ + ":" + std::to_string(line_) + ":" + std::to_string(col_),
                            what);
    }

    std::string text_;
    std::string source_;
    size_t pos_ = 0;
    size_t line_ = 1, col_ = 1;
    bool at_comment_start_ = true;
};

} // namespace accltl

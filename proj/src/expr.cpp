#include "qcap/expr.hpp"

#include "qcap/errors.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>

namespace qcap {

namespace {

class Parser {
public:
    Parser(std::string_view text, const ParamMap& params) : text_(text), params_(params) {}

    double parse() {
        skip_ws();
        if (at_end()) {
            throw ExprError("empty expression", pos_);
        }
        double value = parse_sum();
        skip_ws();
        if (!at_end()) {
            throw ExprError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
        }
        return value;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    double parse_sum() {
        double value = parse_product();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '+') {
                ++pos_;
                value += parse_product();
            } else if (c == '-') {
                ++pos_;
                value -= parse_product();
            } else {
                return value;
            }
        }
    }

    double parse_product() {
        double value = parse_unary();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '*') {
                ++pos_;
                value *= parse_unary();
            } else if (c == '/') {
                std::size_t op_pos = pos_++;
                double divisor = parse_unary();
                if (divisor == 0.0) {
                    throw ExprError("division by zero", op_pos);
                }
                value /= divisor;
            } else {
                return value;
            }
        }
    }

    double parse_unary() {
        skip_ws();
        char c = peek();
        if (c == '-') {
            ++pos_;
            return -parse_unary();
        }
        if (c == '+') {
            ++pos_;
            return parse_unary();
        }
        return parse_primary();
    }

    double parse_primary() {
        skip_ws();
        if (at_end()) {
            throw ExprError("unexpected end of expression", pos_);
        }
        char c = peek();
        if (c == '(') {
            std::size_t open = pos_++;
            double value = parse_sum();
            skip_ws();
            if (peek() != ')') {
                throw ExprError("missing ')' for '(' opened at " + std::to_string(open), pos_);
            }
            ++pos_;
            return value;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            std::string_view name = text_.substr(start, pos_ - start);
            auto it = params_.find(name);
            if (it == params_.end()) {
                throw ExprError("unknown identifier '" + std::string(name) + "'", start);
            }
            return it->second;
        }
        throw ExprError(std::string("unexpected character '") + c + "'", pos_);
    }

    double parse_number() {
        std::size_t start = pos_;
        while (!at_end() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            ++pos_;
        }
        if (!at_end() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (!at_end() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                ++pos_;
            }
            if (at_end() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                pos_ = save;
            } else {
                while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    ++pos_;
                }
            }
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            throw ExprError("malformed number '" + std::string(first, last) + "'", start);
        }
        return value;
    }

    std::string_view text_;
    const ParamMap& params_;
    std::size_t pos_ = 0;
};

} // namespace

double eval_param_expr(std::string_view expr, const ParamMap& params) {
    return Parser(expr, params).parse();
}

bool is_identifier(std::string_view name) {
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) {
        return false;
    }
    for (char c : name) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return true;
}

} // namespace qcap
